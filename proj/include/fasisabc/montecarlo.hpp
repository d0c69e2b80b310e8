// SPDX-License-Identifier: Apache-2.0
//
// Seeded link-level simulator. Each trial owns its engine, seeded from
// (base_seed, trial index, stream), so estimates do not depend on how the
// trials are split across threads.

#ifndef FASISABC_MONTECARLO_HPP
#define FASISABC_MONTECARLO_HPP

#include "fasisabc/analysis.hpp"
#include "fasisabc/random.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace fas {

struct TrialConfig
{
  std::int64_t trials = 100000;
  std::uint64_t base_seed = 1;
  int shards = 1;
  /// Complex-amplitude channel instead of the gain-sum model. For comparison only.
  bool coherent_mode = false;

  void validate() const;
};

struct McEstimate
{
  double mean = 0.0;
  double ci_halfwidth_99 = 0.0;  // 2.576 * sample sd / sqrt(trials)
  std::int64_t trials_used = 0;
};

struct UserPairEstimate
{
  McEstimate near;
  McEstimate far;
};

/// Per-port equivalent gains for one user. `bt_gain` is the unit-mean
/// BS-tag power gain shared by every port (and by both users in a joint
/// trial); the overload without it draws one from rng.
Eigen::VectorXd sample_equivalent_gains(const UserLink& link, const SystemParams& params, double bt_gain,
                                        Rng& rng);
Eigen::VectorXd sample_equivalent_gains(const UserLink& link, const SystemParams& params, Rng& rng);

/// |d^-alpha h_d + zeta d_bt^-alpha d_ti^-alpha h_bt h_t|^2 per port with
/// correlated complex Gaussian h_d, h_t and a single unit-power h_bt.
Eigen::VectorXd sample_coherent_gains(const UserLink& link, const SystemParams& params,
                                      std::complex<double> h_bt, Rng& rng);
Eigen::VectorXd sample_coherent_gains(const UserLink& link, const SystemParams& params, Rng& rng);

UserPairEstimate mc_outage(const SystemParams& params, const UserLink& near, const UserLink& far,
                           double gamma_bar, const TrialConfig& cfg);
UserPairEstimate mc_ecr(const SystemParams& params, const UserLink& near, const UserLink& far,
                        double gamma_bar, const TrialConfig& cfg);

McEstimate mc_esr(const SystemParams& params, const SensingParams& sensing, double gamma_bar,
                  const TrialConfig& cfg);
/// Same draws as mc_esr, averaging the echo SNR itself.
McEstimate mc_echo_snr(const SystemParams& params, const SensingParams& sensing, double gamma_bar,
                       const TrialConfig& cfg);

/// Mean per-port gain over cfg.trials draws (ports pooled), in either channel mode.
McEstimate mc_port_gain_mean(const SystemParams& params, const UserLink& link, const TrialConfig& cfg);

class EmpiricalCdf
{
public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

private:
  std::vector<double> sorted_;
};

/// ECDF of the best-port gain over `samples` independent draws.
EmpiricalCdf empirical_fas_cdf(const UserLink& link, const SystemParams& params, std::int64_t samples,
                               std::uint64_t base_seed);

/// sup |F - ecdf|. With checkpoints > 0 the model CDF is evaluated only at
/// that many evenly spaced order statistics and the result is an upper bound
/// that uses the monotonicity of F between them.
double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf, int checkpoints = 0);

/// Generic driver: `trial` writes `outputs` values for trial index t; each
/// output is averaged with a 99% confidence half-width. Reduction order is
/// fixed, so the result is bit-identical for any shard count.
std::vector<McEstimate> run_trials(const TrialConfig& cfg, int outputs,
                                   const std::function<void(std::int64_t, double*)>& trial);

}  // namespace fas

#endif  // FASISABC_MONTECARLO_HPP
