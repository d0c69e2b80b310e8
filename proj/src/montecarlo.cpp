// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace fas {

void TrialConfig::validate() const
{
  if (trials < 1) {
    throw std::invalid_argument("TrialConfig: trials must be >= 1");
  }
  if (shards < 1) {
    throw std::invalid_argument("TrialConfig: shards must be >= 1");
  }
}

namespace {

constexpr std::int64_t kBlockSize = 4096;
constexpr double kZ99 = 2.576;

// Unit-mean exponential from a standard normal score: -ln(1 - Phi(x)).
double exponential_from_score(double x)
{
  return -std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
}

struct Moments
{
  double sum = 0.0;
  double sum_sq = 0.0;
};

Moments pairwise_sum(const std::vector<Moments>& blocks, std::size_t first, std::size_t last)
{
  if (last - first == 1) {
    return blocks[first];
  }
  const std::size_t mid = first + (last - first) / 2;
  const Moments a = pairwise_sum(blocks, first, mid);
  const Moments b = pairwise_sum(blocks, mid, last);
  return {a.sum + b.sum, a.sum_sq + b.sum_sq};
}

McEstimate finish(const Moments& m, std::int64_t n)
{
  McEstimate est;
  est.trials_used = n;
  est.mean = m.sum / static_cast<double>(n);
  if (n < 2) {
    est.ci_halfwidth_99 = std::numeric_limits<double>::infinity();
    return est;
  }
  const double var = std::max(0.0, (m.sum_sq - n * est.mean * est.mean) / static_cast<double>(n - 1));
  est.ci_halfwidth_99 = kZ99 * std::sqrt(var / static_cast<double>(n));
  return est;
}

double path_gain_product(const SystemParams& params, User user)
{
  return params.zeta * params.path_gain(params.d_b_t) * params.path_gain(params.tag_user_distance(user));
}

}  // namespace

std::vector<McEstimate> run_trials(const TrialConfig& cfg, int outputs,
                                   const std::function<void(std::int64_t, double*)>& trial)
{
  cfg.validate();
  if (outputs < 1) {
    throw std::invalid_argument("run_trials: need at least one output");
  }
  const std::int64_t blocks = (cfg.trials + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<Moments>> per_output(outputs, std::vector<Moments>(blocks));

  auto run_block = [&](std::int64_t block) {
    std::vector<double> values(outputs);
    std::vector<Moments> acc(outputs);
    const std::int64_t end = std::min(cfg.trials, (block + 1) * kBlockSize);
    for (std::int64_t t = block * kBlockSize; t < end; ++t) {
      trial(t, values.data());
      for (int k = 0; k < outputs; ++k) {
        acc[k].sum += values[k];
        acc[k].sum_sq += values[k] * values[k];
      }
    }
    for (int k = 0; k < outputs; ++k) {
      per_output[k][block] = acc[k];
    }
  };

  const int shards = static_cast<int>(std::min<std::int64_t>(cfg.shards, blocks));
  if (shards <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) {
      run_block(b);
    }
  } else {
    std::vector<std::exception_ptr> errors(shards);
    std::vector<std::thread> workers;
    workers.reserve(shards);
    for (int s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] {
        try {
          for (std::int64_t b = s; b < blocks; b += shards) {
            run_block(b);
          }
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) {
      w.join();
    }
    for (const auto& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  std::vector<McEstimate> out;
  out.reserve(outputs);
  for (int k = 0; k < outputs; ++k) {
    out.push_back(finish(pairwise_sum(per_output[k], 0, per_output[k].size()), cfg.trials));
  }
  return out;
}

Eigen::VectorXd sample_equivalent_gains(const UserLink& link, const SystemParams& params, double bt_gain,
                                        Rng& rng)
{
  const Eigen::VectorXd xa = sample_correlated_normals(link.correlation, rng);
  const Eigen::VectorXd xc = sample_correlated_normals(link.correlation, rng);
  const double direct = params.path_gain(params.bs_user_distance(link.user)) * params.abar;
  const double cascade = path_gain_product(params, link.user) * params.bbar * params.cbar * bt_gain;
  Eigen::VectorXd g(link.ports());
  for (int n = 0; n < link.ports(); ++n) {
    g[n] = direct * exponential_from_score(xa[n]) + cascade * exponential_from_score(xc[n]);
  }
  return g;
}

Eigen::VectorXd sample_equivalent_gains(const UserLink& link, const SystemParams& params, Rng& rng)
{
  const double b = standard_exponential(rng);
  return sample_equivalent_gains(link, params, b, rng);
}

Eigen::VectorXd sample_coherent_gains(const UserLink& link, const SystemParams& params,
                                      std::complex<double> h_bt, Rng& rng)
{
  const int n = link.ports();
  const double s = std::sqrt(0.5);
  const Eigen::VectorXd d_re = sample_correlated_normals(link.correlation, rng);
  const Eigen::VectorXd d_im = sample_correlated_normals(link.correlation, rng);
  const Eigen::VectorXd t_re = sample_correlated_normals(link.correlation, rng);
  const Eigen::VectorXd t_im = sample_correlated_normals(link.correlation, rng);
  const double direct = params.path_gain(params.bs_user_distance(link.user)) * std::sqrt(params.abar) * s;
  const std::complex<double> cascade =
      path_gain_product(params, link.user) * std::sqrt(params.bbar * params.cbar) * s * h_bt;
  Eigen::VectorXd g(n);
  for (int k = 0; k < n; ++k) {
    const std::complex<double> h = direct * std::complex<double>(d_re[k], d_im[k]) +
                                   cascade * std::complex<double>(t_re[k], t_im[k]);
    g[k] = std::norm(h);
  }
  return g;
}

Eigen::VectorXd sample_coherent_gains(const UserLink& link, const SystemParams& params, Rng& rng)
{
  const double s = std::sqrt(0.5);
  const double re = standard_normal(rng);
  const double im = standard_normal(rng);
  return sample_coherent_gains(link, params, {s * re, s * im}, rng);
}

namespace {

struct JointGains
{
  double near;
  double far;
};

// Best-port gains of both users in one trial, sharing the BS-tag link.
JointGains joint_best_gains(const SystemParams& params, const UserLink& near, const UserLink& far,
                            std::int64_t t, const TrialConfig& cfg)
{
  Rng rng = make_stream(cfg.base_seed, static_cast<std::uint64_t>(t), StreamId::Gains);
  if (cfg.coherent_mode) {
    const double s = std::sqrt(0.5);
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    const std::complex<double> h_bt(s * re, s * im);
    const double gn = sample_coherent_gains(near, params, h_bt, rng).maxCoeff();
    const double gf = sample_coherent_gains(far, params, h_bt, rng).maxCoeff();
    return {gn, gf};
  }
  const double b = standard_exponential(rng);
  const double gn = sample_equivalent_gains(near, params, b, rng).maxCoeff();
  const double gf = sample_equivalent_gains(far, params, b, rng).maxCoeff();
  return {gn, gf};
}

struct Sinr
{
  double sic;   // far message decoded at the near user
  double un;    // near user after SIC
  double uf;    // far user
};

Sinr link_sinr(const SystemParams& params, double gamma_bar, JointGains g)
{
  const double s = gamma_bar * params.mu_c;
  return {s * params.p_uf * g.near / (s * params.p_un * g.near + 1.0), s * params.p_un * g.near,
          s * params.p_uf * g.far / (s * params.p_un * g.far + 1.0)};
}

void check_pair(const UserLink& near, const UserLink& far)
{
  if (near.user != User::Near || far.user != User::Far) {
    throw std::invalid_argument("Monte Carlo: expected a near link and a far link");
  }
}

}  // namespace

UserPairEstimate mc_outage(const SystemParams& params, const UserLink& near, const UserLink& far,
                           double gamma_bar, const TrialConfig& cfg)
{
  params.validate();
  check_pair(near, far);
  const auto est = run_trials(cfg, 2, [&](std::int64_t t, double* out) {
    const Sinr s = link_sinr(params, gamma_bar, joint_best_gains(params, near, far, t, cfg));
    out[0] = (s.sic <= params.gamma_hat_sic || s.un <= params.gamma_hat_un) ? 1.0 : 0.0;
    out[1] = s.uf <= params.gamma_hat_uf ? 1.0 : 0.0;
  });
  return {est[0], est[1]};
}

UserPairEstimate mc_ecr(const SystemParams& params, const UserLink& near, const UserLink& far,
                        double gamma_bar, const TrialConfig& cfg)
{
  params.validate();
  check_pair(near, far);
  const auto est = run_trials(cfg, 2, [&](std::int64_t t, double* out) {
    const Sinr s = link_sinr(params, gamma_bar, joint_best_gains(params, near, far, t, cfg));
    out[0] = std::log1p(s.un) / std::numbers::ln2;
    out[1] = std::log1p(s.uf) / std::numbers::ln2;
  });
  return {est[0], est[1]};
}

namespace {

double echo_snr_sample(const SystemParams& params, const SensingParams& sensing, double gamma_bar,
                       std::int64_t t, const TrialConfig& cfg)
{
  Rng rng = make_stream(cfg.base_seed, static_cast<std::uint64_t>(t), StreamId::Echo);
  const double g_bt = params.bbar * standard_exponential(rng);
  const double g_tb = params.ebar * standard_exponential(rng);
  return std::numbers::pi * std::numbers::pi / 3.0 * gamma_bar * params.zeta * params.path_gain(params.d_b_t) *
         g_tb * g_bt * sensing.sigma2_tdf;
}

}  // namespace

McEstimate mc_esr(const SystemParams& params, const SensingParams& sensing, double gamma_bar,
                  const TrialConfig& cfg)
{
  params.validate();
  sensing.validate();
  const double two_t = 2.0 * sensing.T;
  return run_trials(cfg, 1, [&](std::int64_t t, double* out) {
    const double echo = echo_snr_sample(params, sensing, gamma_bar, t, cfg);
    out[0] = sensing.beta / two_t * std::log1p(two_t * echo) / std::numbers::ln2;
  })[0];
}

McEstimate mc_echo_snr(const SystemParams& params, const SensingParams& sensing, double gamma_bar,
                       const TrialConfig& cfg)
{
  params.validate();
  sensing.validate();
  return run_trials(cfg, 1, [&](std::int64_t t, double* out) {
    out[0] = echo_snr_sample(params, sensing, gamma_bar, t, cfg);
  })[0];
}

McEstimate mc_port_gain_mean(const SystemParams& params, const UserLink& link, const TrialConfig& cfg)
{
  params.validate();
  return run_trials(cfg, 1, [&](std::int64_t t, double* out) {
    Rng rng = make_stream(cfg.base_seed, static_cast<std::uint64_t>(t), StreamId::Gains);
    const Eigen::VectorXd g = cfg.coherent_mode ? sample_coherent_gains(link, params, rng)
                                                : sample_equivalent_gains(link, params, rng);
    out[0] = g.mean();
  })[0];
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
  if (sorted_.empty()) {
    throw std::invalid_argument("EmpiricalCdf: no samples");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const
{
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_fas_cdf(const UserLink& link, const SystemParams& params, std::int64_t samples,
                               std::uint64_t base_seed)
{
  params.validate();
  if (samples < 1) {
    throw std::invalid_argument("empirical_fas_cdf: samples must be >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(samples));
  for (std::int64_t t = 0; t < samples; ++t) {
    Rng rng = make_stream(base_seed, static_cast<std::uint64_t>(t), StreamId::Ecdf);
    g[t] = sample_equivalent_gains(link, params, rng).maxCoeff();
  }
  return EmpiricalCdf(std::move(g));
}

double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf, int checkpoints)
{
  const auto& x = ecdf.sorted();
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double ks = 0.0;
  if (checkpoints <= 0 || static_cast<std::size_t>(checkpoints) >= n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double f = cdf(x[i]);
      ks = std::max({ks, f - i * inv_n, (i + 1) * inv_n - f});
    }
    return ks;
  }
  // Between checkpoints a < b the model CDF lies in [F(x_a), F(x_b)] and the
  // ECDF in [(a+1)/n, b/n] just before x_b.
  std::vector<std::size_t> idx(checkpoints);
  for (int k = 0; k < checkpoints; ++k) {
    idx[k] = static_cast<std::size_t>(std::llround(static_cast<double>(k) * (n - 1) / (checkpoints - 1)));
  }
  double f_prev = 0.0;
  std::size_t i_prev = 0;
  bool first = true;
  for (std::size_t i : idx) {
    const double f = cdf(x[i]);
    ks = std::max({ks, f - i * inv_n, (i + 1) * inv_n - f});
    const double lo_ecdf = first ? 0.0 : (i_prev + 1) * inv_n;
    const double lo_f = first ? 0.0 : f_prev;
    ks = std::max({ks, f - lo_ecdf, i * inv_n - lo_f});
    f_prev = f;
    i_prev = i;
    first = false;
  }
  ks = std::max(ks, 1.0 - f_prev);
  return ks;
}

}  // namespace fas
