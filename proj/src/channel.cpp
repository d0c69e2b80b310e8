// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/channel.hpp"

#include "fasisabc/quadrature.hpp"
#include "fasisabc/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fas {

std::string_view to_string(User user)
{
  return user == User::Near ? "near" : "far";
}

void FasGeometry::validate() const
{
  if (n1 < 1 || n2 < 1) {
    throw std::invalid_argument("FasGeometry: port counts must be >= 1");
  }
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) {
    throw std::invalid_argument("FasGeometry: widths must be >= 0");
  }
}

GridIndex port_to_grid(int port, const FasGeometry& geom)
{
  if (port < 1 || port > geom.port_count()) {
    throw std::out_of_range("port_to_grid: port " + std::to_string(port) + " outside 1.." +
                            std::to_string(geom.port_count()));
  }
  const int zero_based = port - 1;
  return {zero_based / geom.n2 + 1, zero_based % geom.n2 + 1};
}

int grid_to_port(GridIndex index, const FasGeometry& geom)
{
  if (index.i1 < 1 || index.i1 > geom.n1 || index.i2 < 1 || index.i2 > geom.n2) {
    throw std::out_of_range("grid_to_port: (" + std::to_string(index.i1) + ", " +
                            std::to_string(index.i2) + ") outside the grid");
  }
  return (index.i1 - 1) * geom.n2 + index.i2;
}

double jakes_correlation(const FasGeometry& geom, int port_a, int port_b)
{
  const GridIndex a = port_to_grid(port_a, geom);
  const GridIndex b = port_to_grid(port_b, geom);
  const double t1 = geom.n1 > 1 ? (a.i1 - b.i1) * geom.w1 / (geom.n1 - 1) : 0.0;
  const double t2 = geom.n2 > 1 ? (a.i2 - b.i2) * geom.w2 / (geom.n2 - 1) : 0.0;
  return spherical_bessel_j0(2.0 * std::numbers::pi * std::hypot(t1, t2));
}

Eigen::MatrixXd correlation_matrix(const FasGeometry& geom)
{
  geom.validate();
  const int n = geom.port_count();
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      r(i, j) = r(j, i) = jakes_correlation(geom, i + 1, j + 1);
    }
  }
  return r;
}

namespace {

void require(bool ok, const char* what)
{
  if (!ok) {
    throw std::invalid_argument(std::string("SystemParams: ") + what);
  }
}

}  // namespace

void SystemParams::validate() const
{
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  require(unit(p_un) && unit(p_uf), "power allocation factors must lie in [0, 1]");
  require(std::abs(p_un + p_uf - 1.0) <= 1e-12, "p_un + p_uf must equal 1");
  require(unit(mu_c) && unit(mu_s), "power split factors must lie in [0, 1]");
  require(std::abs(mu_c + mu_s - 1.0) <= 1e-12, "mu_c + mu_s must equal 1");
  require(unit(zeta), "zeta must lie in [0, 1]");
  require(alpha > 2.0, "alpha must exceed 2");
  for (double d : {d_b_un, d_b_uf, d_b_t, d_t_un, d_t_uf}) {
    require(d > 0.0 && std::isfinite(d), "distances must be positive");
  }
  for (double m : {abar, bbar, cbar, ebar}) {
    require(m > 0.0 && std::isfinite(m), "mean channel gains must be positive");
  }
  for (double g : {gamma_hat_sic, gamma_hat_un, gamma_hat_uf}) {
    require(g >= 0.0 && std::isfinite(g), "thresholds must be non-negative");
  }
}

double SystemParams::path_gain(double distance) const
{
  return std::pow(distance, -alpha);
}

EquivalentGainModel equivalent_gain_model(const SystemParams& params, User user)
{
  EquivalentGainModel model;
  model.direct_mean = params.path_gain(params.bs_user_distance(user)) * params.abar;
  model.cascade_scale = params.zeta * params.path_gain(params.d_b_t) *
                        params.path_gain(params.tag_user_distance(user)) * params.bbar * params.cbar;
  return model;
}

GammaMoments gamma_moments(const EquivalentGainModel& model)
{
  const double mean = model.mean();
  const double variance = model.variance();
  if (!(mean > 0.0) || !(variance > 0.0)) {
    throw std::invalid_argument("gamma_moments: degenerate gain model (zero mean)");
  }
  return {mean * mean / variance, variance / mean};
}

GammaMoments gamma_moments(const SystemParams& params, User user)
{
  return gamma_moments(equivalent_gain_model(params, user));
}

double marginal_cdf_geq(double g, const GammaMoments& gm)
{
  if (g <= 0.0) {
    return 0.0;
  }
  return gamma_p(gm.kappa, g / gm.varpi);
}

double marginal_pdf_geq(double g, const GammaMoments& gm)
{
  if (g <= 0.0) {
    return 0.0;
  }
  const double log_pdf = (gm.kappa - 1.0) * std::log(g) - g / gm.varpi - std::lgamma(gm.kappa) -
                         gm.kappa * std::log(gm.varpi);
  return std::exp(log_pdf);
}

double product_exp_cdf(double d, double scale)
{
  if (!(scale > 0.0)) {
    throw std::domain_error("product_exp_cdf: scale must be positive");
  }
  if (d <= 0.0) {
    return 0.0;
  }
  const double x = 2.0 * std::sqrt(d / scale);
  return 1.0 - x * bessel_k1(x);
}

double product_exp_pdf(double d, double scale)
{
  if (!(scale > 0.0)) {
    throw std::domain_error("product_exp_pdf: scale must be positive");
  }
  if (d <= 0.0) {
    throw std::domain_error("product_exp_pdf: argument must be positive");
  }
  return 2.0 / scale * bessel_k0(2.0 * std::sqrt(d / scale));
}

double equivalent_gain_cdf_exact(double g, const EquivalentGainModel& model)
{
  if (g <= 0.0) {
    return 0.0;
  }
  const double a_mean = model.direct_mean;
  if (model.cascade_scale <= 0.0) {
    return -std::expm1(-g / a_mean);
  }
  // F(g) = int_0^g F_A'(g - d) f_D(d) dd. The log singularity of f_D at 0
  // is removed with d = s^2.
  const double scale = model.cascade_scale;
  const Integrand integrand = [&](double s) {
    const double d = s * s;
    if (d <= 0.0) {
      return 0.0;
    }
    return -std::expm1(-(g - d) / a_mean) * product_exp_pdf(d, scale) * 2.0 * s;
  };
  return integrate(integrand, 0.0, std::sqrt(g), {1e-13, 1e-12, 4000}).value;
}

}  // namespace fas
