// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fas {

void SensingParams::validate() const
{
  if (!(T > 0.0) || !(sigma2_tdf > 0.0)) {
    throw std::invalid_argument("SensingParams: T and sigma2_tdf must be positive");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("SensingParams: beta must lie in (0, 1]");
  }
}

std::string_view to_string(BenchmarkMode mode)
{
  switch (mode) {
    case BenchmarkMode::FasIsabc:
      return "FAS_ISABC";
    case BenchmarkMode::FasIsac:
      return "FAS_ISAC";
    case BenchmarkMode::TasIsabc:
      return "TAS_ISABC";
    case BenchmarkMode::TasIsac:
      return "TAS_ISAC";
  }
  return "?";
}

BenchmarkMode parse_benchmark_mode(std::string_view text)
{
  std::string key;
  for (char c : text) {
    key.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (BenchmarkMode mode : {BenchmarkMode::FasIsabc, BenchmarkMode::FasIsac, BenchmarkMode::TasIsabc,
                             BenchmarkMode::TasIsac}) {
    if (key == to_string(mode)) {
      return mode;
    }
  }
  throw std::invalid_argument("unknown benchmark mode '" + std::string(text) + "'");
}

std::string_view to_string(PdfModel model)
{
  return model == PdfModel::CopulaDiagonal ? "copula_diagonal" : "cdf_derivative";
}

UserLink make_user_link(const SystemParams& params, User user, const FasGeometry& geometry, double eps)
{
  params.validate();
  geometry.validate();
  UserLink link;
  link.user = user;
  link.geometry = geometry;
  link.moments = gamma_moments(params, user);
  link.correlation = build_correlation_model(correlation_matrix(geometry), eps);
  return link;
}

void check_link(const UserLink& link, const SystemParams& params)
{
  const GammaMoments expected = gamma_moments(params, link.user);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (!close(expected.kappa, link.moments.kappa) || !close(expected.varpi, link.moments.varpi)) {
    throw std::invalid_argument("UserLink: Gamma moments do not match the system parameters");
  }
  if (link.geometry.port_count() != link.correlation.dim) {
    throw std::invalid_argument("UserLink: geometry and correlation model disagree on port count");
  }
}

namespace {

// Phi_R(phi^{-1}(u), ...) for a common marginal probability u.
double copula_diagonal_cdf(double u, const UserLink& link, const MvnOptions& mvn)
{
  if (u <= 0.0) {
    return 0.0;
  }
  if (u >= 1.0) {
    return 1.0;
  }
  if (link.ports() == 1) {
    return u;
  }
  return mvn_cdf_equicoordinate(normal_score(u), link.correlation, mvn).value;
}

constexpr int kDerivativePoints = 1024;

}  // namespace

double fas_cdf(double g, const UserLink& link, const MvnOptions& mvn)
{
  if (g <= 0.0) {
    return 0.0;
  }
  return copula_diagonal_cdf(marginal_cdf_geq(g, link.moments), link, mvn);
}

double fas_pdf(double g, const UserLink& link)
{
  if (g <= 0.0) {
    return 0.0;
  }
  const double u = marginal_cdf_geq(g, link.moments);
  if (u <= 0.0 || u >= 1.0) {
    return 0.0;
  }
  const double f = marginal_pdf_geq(g, link.moments);
  if (f <= 0.0) {
    return 0.0;
  }
  const int n = link.ports();
  if (n == 1) {
    return f;
  }
  const double density = gaussian_copula_density(Eigen::VectorXd::Constant(n, u), link.correlation);
  return std::exp(n * std::log(f)) * density;
}

double fas_pdf_numeric(double g, const UserLink& link, const MvnOptions& mvn)
{
  if (g <= 0.0) {
    return 0.0;
  }
  if (link.ports() == 1) {
    return marginal_pdf_geq(g, link.moments);
  }
  MvnOptions fixed = mvn;
  if (fixed.fixed_points <= 0) {
    fixed.fixed_points = kDerivativePoints;
  }
  const double h = std::min(1e-4 * g, 0.5 * g);
  return (fas_cdf(g + h, link, fixed) - fas_cdf(g - h, link, fixed)) / (2.0 * h);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// threshold / (gamma_bar mu_c * denom_factor), treating a vanishing
// denominator as an unreachable threshold.
double gain_threshold(double threshold, double gamma_bar, double mu_c, double denom_factor)
{
  const double denom = gamma_bar * mu_c * denom_factor;
  if (threshold == 0.0) {
    return 0.0;
  }
  return denom > 0.0 ? threshold / denom : kInf;
}

void check_gamma_bar(double gamma_bar)
{
  if (!(gamma_bar > 0.0)) {
    throw std::invalid_argument("average SNR must be positive");
  }
}

}  // namespace

std::optional<NearThresholds> thresholds_near(const SystemParams& params, double gamma_bar)
{
  check_gamma_bar(gamma_bar);
  const double sic_margin = params.p_uf - params.gamma_hat_sic * params.p_un;
  if (!(sic_margin > 0.0)) {
    return std::nullopt;
  }
  NearThresholds t;
  t.sic = gain_threshold(params.gamma_hat_sic, gamma_bar, params.mu_c, sic_margin);
  t.un = gain_threshold(params.gamma_hat_un, gamma_bar, params.mu_c, params.p_un);
  t.max = std::max(t.sic, t.un);
  return t;
}

std::optional<double> threshold_far(const SystemParams& params, double gamma_bar)
{
  check_gamma_bar(gamma_bar);
  const double margin = params.p_uf - params.gamma_hat_uf * params.p_un;
  if (!(margin > 0.0)) {
    return std::nullopt;
  }
  return gain_threshold(params.gamma_hat_uf, gamma_bar, params.mu_c, margin);
}

namespace {

std::optional<double> user_threshold(const SystemParams& params, User user, double gamma_bar)
{
  if (user == User::Near) {
    const auto t = thresholds_near(params, gamma_bar);
    return t ? std::optional<double>(t->max) : std::nullopt;
  }
  return threshold_far(params, gamma_bar);
}

}  // namespace

double outage_near(const SystemParams& params, const UserLink& link, double gamma_bar, const MvnOptions& mvn)
{
  const auto t = thresholds_near(params, gamma_bar);
  return t ? fas_cdf(t->max, link, mvn) : 1.0;
}

double outage_far(const SystemParams& params, const UserLink& link, double gamma_bar, const MvnOptions& mvn)
{
  const auto t = threshold_far(params, gamma_bar);
  return t ? fas_cdf(*t, link, mvn) : 1.0;
}

double outage(const SystemParams& params, const UserLink& link, double gamma_bar, const MvnOptions& mvn)
{
  return link.user == User::Near ? outage_near(params, link, gamma_bar, mvn)
                                 : outage_far(params, link, gamma_bar, mvn);
}

double outage_asymptotic(const SystemParams& params, const UserLink& link, double gamma_bar,
                         const MvnOptions& mvn)
{
  const auto t = user_threshold(params, link.user, gamma_bar);
  if (!t || std::isinf(*t)) {
    return 1.0;
  }
  if (*t <= 0.0) {
    return 0.0;
  }
  const double kappa = link.moments.kappa;
  const double log_u = kappa * std::log(*t / link.moments.varpi) - std::log(kappa) - std::lgamma(kappa);
  if (log_u >= 0.0) {
    return 1.0;
  }
  return copula_diagonal_cdf(std::exp(log_u), link, mvn);
}

double rate_integrand(const SystemParams& params, User user, double gamma_bar, double g)
{
  const double scale = gamma_bar * params.mu_c;
  if (user == User::Near) {
    return std::log1p(scale * params.p_un * g) / std::numbers::ln2;
  }
  const double sinr = scale * params.p_uf * g / (scale * params.p_un * g + 1.0);
  return std::log1p(sinr) / std::numbers::ln2;
}

namespace {

double pdf_value(double g, const UserLink& link, PdfModel pdf, const MvnOptions& mvn)
{
  return pdf == PdfModel::CopulaDiagonal ? fas_pdf(g, link) : fas_pdf_numeric(g, link, mvn);
}

}  // namespace

double ecr_glq(const SystemParams& params, const UserLink& link, double gamma_bar,
               const QuadratureRule<double>& rule, PdfModel pdf, const MvnOptions& mvn)
{
  if (!(gamma_bar >= 0.0)) {
    throw std::invalid_argument("ecr_glq: average SNR must be non-negative");
  }
  const double value = rule.integrate([&](double x) {
    const double rate = rate_integrand(params, link.user, gamma_bar, x);
    return rate == 0.0 ? 0.0 : rate * pdf_value(x, link, pdf, mvn);
  });
  return std::max(value, 0.0);
}

IntegrationResult ecr_integral_reference(const SystemParams& params, const UserLink& link, double gamma_bar,
                                         double abs_tol, PdfModel pdf, const MvnOptions& mvn)
{
  const Integrand integrand = [&](double g) {
    const double rate = rate_integrand(params, link.user, gamma_bar, g);
    return rate == 0.0 ? 0.0 : rate * pdf_value(g, link, pdf, mvn);
  };
  return integrate_to_infinity(integrand, 0.0, {abs_tol, 1e-9, 4000});
}

double echo_snr_scale(const SystemParams& params, const SensingParams& sensing, double gamma_bar)
{
  return std::numbers::pi * std::numbers::pi / 3.0 * gamma_bar * params.zeta * params.path_gain(params.d_b_t) *
         params.bbar * params.ebar * sensing.sigma2_tdf;
}

double mean_echo_snr(const SystemParams& params, const SensingParams& sensing, double gamma_bar)
{
  // E[B E] = bbar ebar for independent exponentials; the scale already holds both means.
  return echo_snr_scale(params, sensing, gamma_bar);
}

double echo_snr_pdf(double x, const SystemParams& params, const SensingParams& sensing, double gamma_bar)
{
  return product_exp_pdf(x, echo_snr_scale(params, sensing, gamma_bar));
}

double esr_closed_form(const SystemParams& params, const SensingParams& sensing, double gamma_bar)
{
  const double two_t = 2.0 * sensing.T;
  return sensing.beta / two_t * std::log1p(two_t * mean_echo_snr(params, sensing, gamma_bar)) /
         std::numbers::ln2;
}

BenchmarkSetup apply_benchmark(const SystemParams& params, const FasGeometry& near_geometry,
                               const FasGeometry& far_geometry, BenchmarkMode mode)
{
  BenchmarkSetup setup{params, params, near_geometry, far_geometry};
  if (mode == BenchmarkMode::FasIsac || mode == BenchmarkMode::TasIsac) {
    setup.communication.zeta = 0.0;
    setup.sensing.zeta = 1.0;
  }
  if (mode == BenchmarkMode::TasIsabc || mode == BenchmarkMode::TasIsac) {
    setup.near_geometry = FasGeometry::single_port();
    setup.far_geometry = FasGeometry::single_port();
  }
  return setup;
}

std::vector<TradeoffPoint> rate_tradeoff(const BenchmarkSetup& setup, const UserLink& near, const UserLink& far,
                                         const SensingParams& sensing, double gamma_bar,
                                         const std::vector<double>& mu_grid, const QuadratureRule<double>& rule,
                                         PdfModel pdf, const MvnOptions& mvn)
{
  if (!std::is_sorted(mu_grid.begin(), mu_grid.end())) {
    throw std::invalid_argument("rate_tradeoff: mu grid must be sorted");
  }
  check_link(near, setup.communication);
  check_link(far, setup.communication);

  std::vector<TradeoffPoint> out;
  out.reserve(mu_grid.size());
  for (double mu : mu_grid) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
      throw std::invalid_argument("rate_tradeoff: mu must lie in [0, 1]");
    }
    SystemParams comm = setup.communication;
    comm.mu_c = mu;
    comm.mu_s = 1.0 - mu;
    const double sum_ecr = ecr_glq(comm, near, gamma_bar, rule, pdf, mvn) + ecr_glq(comm, far, gamma_bar, rule, pdf, mvn);
    const double esr = esr_closed_form(setup.sensing, sensing, gamma_bar * (1.0 - mu));
    out.push_back({mu, esr, sum_ecr});
  }
  return out;
}

}  // namespace fas
