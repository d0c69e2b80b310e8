// SPDX-License-Identifier: Apache-2.0
//
// Closed-form performance of the FAS-aided NOMA backscatter ISAC downlink:
// best-port gain CDF/PDF, outage (exact and high-SNR), ergodic communication
// rate by Gauss-Laguerre quadrature, and the ergodic sensing rate bound.

#ifndef FASISABC_ANALYSIS_HPP
#define FASISABC_ANALYSIS_HPP

#include "fasisabc/channel.hpp"
#include "fasisabc/copula.hpp"
#include "fasisabc/quadrature.hpp"
#include "fasisabc/specfun.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace fas {

/// Radar pulse duration T (s), duty cycle beta and time-delay-fluctuation
/// variance.
struct SensingParams
{
  double T = 0.01;
  double beta = 0.5;
  double sigma2_tdf = 0.1;

  void validate() const;
};

enum class BenchmarkMode { FasIsabc, FasIsac, TasIsabc, TasIsac };

std::string_view to_string(BenchmarkMode mode);
/// Accepts FAS_ISABC, fas-isabc, ... Throws std::invalid_argument otherwise.
BenchmarkMode parse_benchmark_mode(std::string_view text);

/// Per-user bundle consumed by every closed form.
struct UserLink
{
  User user = User::Near;
  FasGeometry geometry;
  GammaMoments moments;
  CorrelationModel correlation;

  int ports() const { return correlation.dim; }
};

UserLink make_user_link(const SystemParams& params, User user, const FasGeometry& geometry,
                        double eps = kDefaultEigenFloor);

/// Throws std::invalid_argument if link.moments were not derived from params.
void check_link(const UserLink& link, const SystemParams& params);

/// CDF of the best-port gain: Phi_R evaluated at phi^{-1}(F_geq(g)) in every
/// coordinate.
double fas_cdf(double g, const UserLink& link, const MvnOptions& mvn = {});

/// Density of the best-port gain in the closed form [f_geq(g)]^N c(u, ..., u).
/// For N > 1 this is the joint density of the port gains on the diagonal,
/// not the derivative of fas_cdf; fas_pdf_numeric gives the latter.
double fas_pdf(double g, const UserLink& link);

/// Central-difference derivative of fas_cdf using a fixed QMC point set.
double fas_pdf_numeric(double g, const UserLink& link, const MvnOptions& mvn = {});

/// Which density the ergodic-rate integrals use.
enum class PdfModel {
  CopulaDiagonal,  // fas_pdf
  CdfDerivative,   // fas_pdf_numeric
};

std::string_view to_string(PdfModel model);

struct NearThresholds
{
  double sic;
  double un;
  double max;
};

/// Gain thresholds below which the near user is in outage; nullopt when
/// p_uf <= gamma_hat_sic * p_un (SIC can never succeed).
std::optional<NearThresholds> thresholds_near(const SystemParams& params, double gamma_bar);

/// Far-user gain threshold; nullopt when p_uf <= gamma_hat_uf * p_un.
std::optional<double> threshold_far(const SystemParams& params, double gamma_bar);

double outage_near(const SystemParams& params, const UserLink& link, double gamma_bar,
                   const MvnOptions& mvn = {});
double outage_far(const SystemParams& params, const UserLink& link, double gamma_bar,
                  const MvnOptions& mvn = {});
/// Dispatches on link.user.
double outage(const SystemParams& params, const UserLink& link, double gamma_bar,
              const MvnOptions& mvn = {});

/// High-SNR outage: P(kappa, x) replaced by x^kappa / (kappa Gamma(kappa)).
/// Returns 1 when that replacement exceeds 1.
double outage_asymptotic(const SystemParams& params, const UserLink& link, double gamma_bar,
                         const MvnOptions& mvn = {});

/// log2(1 + SINR) as a function of the best-port gain.
double rate_integrand(const SystemParams& params, User user, double gamma_bar, double g);

/// Ergodic rate by Gauss-Laguerre: sum_m w_m e^{x_m} log2(1 + SINR(x_m)) f(x_m).
double ecr_glq(const SystemParams& params, const UserLink& link, double gamma_bar,
               const QuadratureRule<double>& rule, PdfModel pdf = PdfModel::CopulaDiagonal,
               const MvnOptions& mvn = {});

/// Adaptive-quadrature value of the same integral, used as the GLQ oracle.
/// Throws QuadratureError if abs_tol is not reached.
IntegrationResult ecr_integral_reference(const SystemParams& params, const UserLink& link,
                                         double gamma_bar, double abs_tol = 1e-8,
                                         PdfModel pdf = PdfModel::CopulaDiagonal,
                                         const MvnOptions& mvn = {});

/// Scale of the echo SNR, (pi^2/3) gamma_bar zeta d_bt^{-alpha} bbar ebar sigma2_tdf;
/// the echo SNR is that scale times a product of two unit exponentials.
double echo_snr_scale(const SystemParams& params, const SensingParams& sensing, double gamma_bar);
double mean_echo_snr(const SystemParams& params, const SensingParams& sensing, double gamma_bar);
double echo_snr_pdf(double x, const SystemParams& params, const SensingParams& sensing,
                    double gamma_bar);

/// (beta / 2T) log2(1 + 2T E[gamma_echo]); the Jensen upper bound on the
/// ergodic sensing rate.
double esr_closed_form(const SystemParams& params, const SensingParams& sensing, double gamma_bar);

/// Parameters and geometries for one benchmark: the communication side and
/// the sensing side can use different reflection coefficients.
struct BenchmarkSetup
{
  SystemParams communication;
  SystemParams sensing;
  FasGeometry near_geometry;
  FasGeometry far_geometry;
};

BenchmarkSetup apply_benchmark(const SystemParams& params, const FasGeometry& near_geometry,
                               const FasGeometry& far_geometry, BenchmarkMode mode);

struct TradeoffPoint
{
  double mu;
  double esr;
  double sum_ecr;
};

/// Sweeps mu_c = mu, mu_s = 1 - mu. The sensing budget scales the echo SNR by
/// mu_s; the communication rates use mu_c.
std::vector<TradeoffPoint> rate_tradeoff(const BenchmarkSetup& setup, const UserLink& near,
                                         const UserLink& far, const SensingParams& sensing,
                                         double gamma_bar, const std::vector<double>& mu_grid,
                                         const QuadratureRule<double>& rule,
                                         PdfModel pdf = PdfModel::CopulaDiagonal,
                                         const MvnOptions& mvn = {});

}  // namespace fas

#endif  // FASISABC_ANALYSIS_HPP
