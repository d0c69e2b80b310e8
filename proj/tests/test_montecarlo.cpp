#include "fasisabc/montecarlo.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace fas;

namespace {

const FasGeometry kGrid{2, 2, 1.0, 1.0};

TrialConfig trials(std::int64_t n, std::uint64_t seed = 11, int shards = 1)
{
  TrialConfig cfg;
  cfg.trials = n;
  cfg.base_seed = seed;
  cfg.shards = shards;
  return cfg;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("estimates do not depend on the shard count")
{
  const SystemParams p;
  const auto near = make_user_link(p, User::Near, kGrid);
  const auto far = make_user_link(p, User::Far, kGrid);
  const auto a = mc_ecr(p, near, far, 10.0, trials(20000, 3, 1));
  const auto b = mc_ecr(p, near, far, 10.0, trials(20000, 3, 3));
  CHECK(a.near.mean == b.near.mean);
  CHECK(a.far.ci_halfwidth_99 == b.far.ci_halfwidth_99);
  const auto c = mc_ecr(p, near, far, 10.0, trials(20000, 4, 1));
  CHECK(a.near.mean != c.near.mean);
}

TEST_CASE("confidence half-width formula")
{
  const auto est = run_trials(trials(4), 1, [](std::int64_t t, double* out) { out[0] = static_cast<double>(t); });
  REQUIRE(est.size() == 1);
  CHECK(est[0].mean == 1.5);
  CHECK(est[0].ci_halfwidth_99 == doctest::Approx(2.576 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(est[0].trials_used == 4);
  CHECK_THROWS_AS(run_trials(trials(0), 1, [](std::int64_t, double*) {}), std::invalid_argument);
}

TEST_CASE("direct-only port gains are exponential")
{
  SystemParams p;
  p.zeta = 0.0;
  const auto link = make_user_link(p, User::Far, FasGeometry::single_port());
  const auto ecdf = empirical_fas_cdf(link, p, 100000, 5);
  const double mean = p.path_gain(p.d_b_uf) * p.abar;
  CHECK(ks_distance(ecdf, [&](double g) { return -std::expm1(-g / mean); }) <= 0.01);
}

TEST_CASE("sample mean of the gain sum matches the moment match")
{
  const SystemParams p;
  const auto link = make_user_link(p, User::Near, kGrid);
  const McEstimate m = mc_port_gain_mean(p, link, trials(1000000, 21));
  CHECK(m.mean == doctest::Approx(link.moments.mean()).epsilon(0.01));
}

TEST_CASE("direct-link port correlation follows Jakes")
{
  SystemParams p;
  p.zeta = 0.0;
  const FasGeometry g{2, 2, 0.3, 0.3};
  const auto link = make_user_link(p, User::Near, g);
  const double mean = p.path_gain(p.d_b_un) * p.abar;
  const int n = 200000;
  // Pearson correlation of the normal scores of a_n, which is what the
  // Gaussian copula prescribes.
  Eigen::MatrixXd scores(n, 4);
  for (int t = 0; t < n; ++t) {
    Rng rng = make_stream(9, t, StreamId::Gains);
    const Eigen::VectorXd a = sample_equivalent_gains(link, p, rng);
    for (int k = 0; k < 4; ++k) {
      scores(t, k) = normal_quantile(-std::expm1(-a[k] / mean));
    }
  }
  const Eigen::RowVectorXd mu = scores.colwise().mean();
  const Eigen::MatrixXd c = scores.rowwise() - mu;
  const Eigen::MatrixXd cov = c.transpose() * c / (n - 1.0);
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  const Eigen::MatrixXd pearson = cov.cwiseQuotient(sd * sd.transpose());
  const Eigen::MatrixXd rho = correlation_matrix(g);
  CHECK((pearson - rho).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("outage edge cases")
{
  SystemParams p;
  p.gamma_hat_sic = p.gamma_hat_un = p.gamma_hat_uf = 0.0;
  auto near = make_user_link(p, User::Near, kGrid);
  auto far = make_user_link(p, User::Far, kGrid);
  auto r = mc_outage(p, near, far, 10.0, trials(5000));
  CHECK(r.near.mean == 0.0);
  CHECK(r.far.mean == 0.0);

  p = {};
  p.gamma_hat_sic = 3.0;
  p.gamma_hat_uf = 3.0;
  r = mc_outage(p, near, far, 1e6, trials(5000));
  CHECK(r.near.mean == 1.0);
  CHECK(r.far.mean == 1.0);
  CHECK_THROWS_AS(mc_outage(p, far, near, 1.0, trials(10)), std::invalid_argument);
}

TEST_CASE("ergodic rate edge cases")
{
  const SystemParams p;
  const auto near = make_user_link(p, User::Near, kGrid);
  const auto far = make_user_link(p, User::Far, kGrid);
  const auto zero = mc_ecr(p, near, far, 0.0, trials(1000));
  CHECK(zero.near.mean == 0.0);
  CHECK(zero.far.mean == 0.0);
  const auto high = mc_ecr(p, near, far, 1e9, trials(5000));
  CHECK(high.far.mean <= std::log2(1 + p.p_uf / p.p_un));
}

TEST_CASE("sensing simulation")
{
  SystemParams p;
  const SensingParams s;
  const McEstimate echo = mc_echo_snr(p, s, 10.0, trials(1000000, 17));
  CHECK(echo.mean == doctest::Approx(mean_echo_snr(p, s, 10.0)).epsilon(0.01));
  const McEstimate esr = mc_esr(p, s, 10.0, trials(100000));
  CHECK(esr_closed_form(p, s, 10.0) >= esr.mean - esr.ci_halfwidth_99);
  p.zeta = 0.0;
  CHECK(mc_esr(p, s, 10.0, trials(1000)).mean == 0.0);
}

TEST_CASE("identical ports: the best port is the single port")
{
  const SystemParams p;
  const FasGeometry tight{2, 2, 1e-9, 1e-9};
  const auto grid = make_user_link(p, User::Near, tight);
  const auto one = make_user_link(p, User::Near, FasGeometry::single_port());
  const auto e_grid = empirical_fas_cdf(grid, p, 50000, 2);
  const auto e_one = empirical_fas_cdf(one, p, 50000, 3);
  CHECK(ks_distance(e_grid, [&](double g) { return e_one(g); }) <= 0.02);
}

TEST_CASE("KS checkpoints give an upper bound")
{
  const SystemParams p;
  const auto link = make_user_link(p, User::Near, FasGeometry::single_port());
  const auto ecdf = empirical_fas_cdf(link, p, 20000, 4);
  const auto cdf = [&](double g) { return marginal_cdf_geq(g, link.moments); };
  const double full = ks_distance(ecdf, cdf);
  const double bound = ks_distance(ecdf, cdf, 200);
  CHECK(bound >= full);
  CHECK(bound <= full + 0.01);
}

TEST_CASE("confidence interval coverage of the echo-SNR mean")
{
  const SystemParams p;
  const SensingParams s;
  const double truth = mean_echo_snr(p, s, 3.0);
  int covered = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const McEstimate e = mc_echo_snr(p, s, 3.0, trials(10000, seed));
    covered += std::abs(e.mean - truth) <= e.ci_halfwidth_99;
  }
  CHECK(covered >= 95);
}

TEST_CASE("coherent and gain-sum channel modes differ")
{
  const SystemParams p;
  const auto link = make_user_link(p, User::Near, kGrid);
  TrialConfig cfg = trials(200000, 8);
  const McEstimate sum = mc_port_gain_mean(p, link, cfg);
  cfg.coherent_mode = true;
  const McEstimate coh = mc_port_gain_mean(p, link, cfg);
  MESSAGE("mean port gain: gain-sum " << sum.mean << ", coherent " << coh.mean);
  CHECK(std::abs(sum.mean - coh.mean) > 3 * (sum.ci_halfwidth_99 + coh.ci_halfwidth_99));
}

}  // TEST_SUITE
