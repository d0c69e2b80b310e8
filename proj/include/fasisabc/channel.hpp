// SPDX-License-Identifier: Apache-2.0
//
// Port geometry of a planar fluid antenna, Jakes spatial correlation between
// ports, and the marginal statistics of the per-port equivalent gain
// g_eq = A' + D (direct link plus tag cascade) with its Gamma moment match.

#ifndef FASISABC_CHANNEL_HPP
#define FASISABC_CHANNEL_HPP

#include <Eigen/Core>

#include <string_view>

namespace fas {

enum class User { Near, Far };

std::string_view to_string(User user);

/// Planar port grid: n1 x n2 ports spread over w1 x w2 wavelengths.
struct FasGeometry
{
  int n1 = 1;
  int n2 = 1;
  double w1 = 0.0;
  double w2 = 0.0;

  int port_count() const { return n1 * n2; }
  /// Throws std::invalid_argument on non-positive counts or negative widths.
  void validate() const;

  static FasGeometry single_port() { return {}; }
};

/// 1-based row-major grid position of a port.
struct GridIndex
{
  int i1 = 1;
  int i2 = 1;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Ports are numbered 1..N row-major: port = (i1 - 1) * n2 + i2.
/// Both throw std::out_of_range for indices outside the grid.
GridIndex port_to_grid(int port, const FasGeometry& geom);
int grid_to_port(GridIndex index, const FasGeometry& geom);

/// j0(2 pi * normalized distance) between two ports. A dimension with a
/// single port contributes no distance.
double jakes_correlation(const FasGeometry& geom, int port_a, int port_b);

/// Raw N x N Jakes matrix. It can be numerically indefinite for dense grids;
/// see build_correlation_model for the regularized version.
Eigen::MatrixXd correlation_matrix(const FasGeometry& geom);

/// Link budget shared by both users. Everything is linear (no dB).
struct SystemParams
{
  double p_un = 0.3;
  double p_uf = 0.7;
  double mu_c = 0.5;
  double mu_s = 0.5;
  double zeta = 0.8;
  double alpha = 2.1;
  double d_b_un = 1.0;
  double d_b_uf = 1.3;
  double d_b_t = 1.0;
  double d_t_un = 1.0;
  double d_t_uf = 1.0;
  double abar = 1.0;
  double bbar = 1.0;
  double cbar = 1.0;
  double ebar = 1.0;
  double gamma_hat_sic = 1.0;
  double gamma_hat_un = 1.0;
  double gamma_hat_uf = 1.0;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  double path_gain(double distance) const;
  double bs_user_distance(User user) const { return user == User::Near ? d_b_un : d_b_uf; }
  double tag_user_distance(User user) const { return user == User::Near ? d_t_un : d_t_uf; }
};

/// Mean of the direct term A' and scale (= mean) of the cascade term D for
/// one user.
struct EquivalentGainModel
{
  double direct_mean = 1.0;
  double cascade_scale = 0.0;

  double mean() const { return direct_mean + cascade_scale; }
  double variance() const { return direct_mean * direct_mean + 3.0 * cascade_scale * cascade_scale; }
};

EquivalentGainModel equivalent_gain_model(const SystemParams& params, User user);

/// Gamma(shape kappa, scale varpi) with the mean and variance of A' + D.
struct GammaMoments
{
  double kappa = 1.0;
  double varpi = 1.0;

  double mean() const { return kappa * varpi; }
  double variance() const { return kappa * varpi * varpi; }
};

GammaMoments gamma_moments(const EquivalentGainModel& model);
GammaMoments gamma_moments(const SystemParams& params, User user);

/// Gamma-approximate CDF / PDF of the per-port gain.
double marginal_cdf_geq(double g, const GammaMoments& gm);
double marginal_pdf_geq(double g, const GammaMoments& gm);

/// Exact law of D = scale * B * C with B, C unit-mean exponentials:
/// F(d) = 1 - 2 sqrt(d/scale) K1(2 sqrt(d/scale)), f(d) = (2/scale) K0(2 sqrt(d/scale)).
double product_exp_cdf(double d, double scale);
double product_exp_pdf(double d, double scale);

/// Exact CDF of A' + D, by numerically convolving the exponential direct
/// term with product_exp_pdf. Used to measure the moment-matching error.
double equivalent_gain_cdf_exact(double g, const EquivalentGainModel& model);

}  // namespace fas

#endif  // FASISABC_CHANNEL_HPP
