// SPDX-License-Identifier: Apache-2.0
//
// Gaussian copula machinery: regularized correlation models, the
// multivariate normal CDF (Genz separation of variables with randomized
// lattice QMC), the copula density, and correlated-uniform sampling.

#ifndef FASISABC_COPULA_HPP
#define FASISABC_COPULA_HPP

#include "fasisabc/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fas {

inline constexpr double kDefaultEigenFloor = 1e-10;

/// Immutable after construction. `matrix` is the input; `regularized` has
/// its eigenvalues floored and its diagonal reset to one, and is what the
/// factor, inverse and log-determinant describe.
struct CorrelationModel
{
  int dim = 0;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd regularized;
  Eigen::MatrixXd factor;  // lower Cholesky factor of `regularized`
  Eigen::MatrixXd inverse;
  double log_det = 0.0;
  double eps_regularization = 0.0;  // floor actually applied, 0 if none was needed
};

/// Throws std::invalid_argument for non-square, non-symmetric, non-unit
/// diagonal or out-of-range input.
CorrelationModel build_correlation_model(const Eigen::MatrixXd& matrix,
                                         double eps = kDefaultEigenFloor);

inline constexpr double kNormalScoreLimit = 8.2;

/// phi^{-1}(u) = sqrt(2) erfinv(2u - 1), saturated to -/+8.2 for
/// u <= 1e-15 and u >= 1 - 1e-15.
double normal_score(double u);

inline constexpr std::uint64_t kDefaultMvnSeed = 0x5EED;

struct MvnOptions
{
  double abs_tol = 1e-4;
  /// Sampling continues past abs_tol until error <= rel_tol * estimate or the
  /// budget runs out; only abs_tol is a hard requirement.
  double rel_tol = 1e-3;
  std::uint64_t seed = kDefaultMvnSeed;
  int max_points = 1 << 20;  // lattice points summed over all random shifts
  int shifts = 12;
  /// When > 0, use exactly this many lattice points per shift and skip the
  /// adaptive loop. Gives an estimator that is smooth in the limits.
  int fixed_points = 0;
};

struct MvnResult
{
  double value = 0.0;
  double error = 0.0;  // 3 standard errors over the random shifts
  int points = 0;
};

class MvnConvergenceError : public std::runtime_error
{
public:
  MvnConvergenceError(const std::string& what, MvnResult best)
      : std::runtime_error(what), best_(best)
  {
  }
  const MvnResult& best() const noexcept { return best_; }

private:
  MvnResult best_;
};

/// P(X_j <= upper_j for all j), X ~ N(0, regularized R). Entries may be
/// +/-infinity.
MvnResult mvn_cdf(const Eigen::Ref<const Eigen::VectorXd>& upper, const CorrelationModel& model,
                  const MvnOptions& options = {});

/// Phi_R(t, ..., t). Exactly 0 at t = -inf and 1 at t = +inf.
MvnResult mvn_cdf_equicoordinate(double t, const CorrelationModel& model,
                                 const MvnOptions& options = {});

/// C(u) = Phi_R(phi^{-1}(u_1), ..., phi^{-1}(u_N)). Components equal to 0 or
/// 1 map to -/+infinity.
double gaussian_copula_cdf(const Eigen::Ref<const Eigen::VectorXd>& u, const CorrelationModel& model,
                           const MvnOptions& options = {});

/// c(u) = exp(-z^T (R^{-1} - I) z / 2) / sqrt(det R), z = phi^{-1}(u).
/// Throws std::domain_error when any component is 0 or 1.
double gaussian_copula_density(const Eigen::Ref<const Eigen::VectorXd>& u,
                               const CorrelationModel& model);

/// L z with z ~ N(0, I): correlated standard normal scores.
Eigen::VectorXd sample_correlated_normals(const CorrelationModel& model, Rng& rng);

/// Phi(L z): uniform marginals with Gaussian-copula dependence.
Eigen::VectorXd sample_correlated_uniforms(const CorrelationModel& model, Rng& rng);

}  // namespace fas

#endif  // FASISABC_COPULA_HPP
