// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/copula.hpp"

#include "fasisabc/specfun.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_correlation_input(const Eigen::MatrixXd& m)
{
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("build_correlation_model: matrix must be square and non-empty");
  }
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("build_correlation_model: diagonal must be 1");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j)) || std::abs(m(i, j)) > 1.0 + 1e-12) {
        throw std::invalid_argument("build_correlation_model: entries must lie in [-1, 1]");
      }
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) {
        throw std::invalid_argument("build_correlation_model: matrix must be symmetric");
      }
    }
  }
}

// Rescales a symmetric positive matrix to unit diagonal.
Eigen::MatrixXd to_unit_diagonal(const Eigen::MatrixXd& a)
{
  const Eigen::VectorXd inv_sqrt = a.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  out.diagonal().setOnes();
  return 0.5 * (out + out.transpose());
}

}  // namespace

CorrelationModel build_correlation_model(const Eigen::MatrixXd& matrix, double eps)
{
  check_correlation_input(matrix);
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("build_correlation_model: eps must be >= 0");
  }

  CorrelationModel model;
  model.dim = static_cast<int>(matrix.rows());
  model.matrix = 0.5 * (matrix + matrix.transpose());
  model.regularized = model.matrix;

  // Clip and renormalize until the floor holds after renormalization;
  // the diagonal rescale can push the smallest eigenvalue slightly back down.
  double floor = eps;
  for (int round = 0; round < 20; ++round) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.regularized);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig >= eps) {
      break;
    }
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
    model.regularized = to_unit_diagonal(eig.eigenvectors() * clipped.asDiagonal() *
                                         eig.eigenvectors().transpose());
    model.eps_regularization = eps;
    floor *= 2.0;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(model.regularized);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("build_correlation_model: regularized matrix is not positive definite");
  }
  model.factor = llt.matrixL();
  model.inverse = llt.solve(Eigen::MatrixXd::Identity(model.dim, model.dim));
  model.log_det = 2.0 * model.factor.diagonal().array().log().sum();
  return model;
}

double normal_score(double u)
{
  if (u <= 1e-15) {
    return -kNormalScoreLimit;
  }
  if (u >= 1.0 - 1e-15) {
    return kNormalScoreLimit;
  }
  return normal_quantile(u);
}

namespace {

// Separation-of-variables form of one MVN probability, after dropping
// unconstrained coordinates and reordering the rest.
struct GenzProblem
{
  Eigen::MatrixXd chol;  // lower factor of the permuted covariance
  Eigen::VectorXd upper;
  double first_factor = 0.0;
};

// Chooses at each step the coordinate with the smallest conditional
// probability (Gibson, Glasbey and Elston ordering) while building the
// Cholesky factor column by column.
GenzProblem prepare_genz(const Eigen::MatrixXd& cov, Eigen::VectorXd upper)
{
  const Eigen::Index n = upper.size();
  Eigen::MatrixXd sigma = cov;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = i;
    double best_prob = kInf;
    for (Eigen::Index k = i; k < n; ++k) {
      double var = sigma(k, k);
      double shift = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) {
        var -= l(k, j) * l(k, j);
        shift += l(k, j) * y[j];
      }
      const double sd = std::sqrt(std::max(var, 1e-300));
      const double prob = normal_cdf((upper[k] - shift) / sd);
      if (prob < best_prob) {
        best_prob = prob;
        best = k;
      }
    }
    if (best != i) {
      sigma.row(i).swap(sigma.row(best));
      sigma.col(i).swap(sigma.col(best));
      l.row(i).swap(l.row(best));
      std::swap(upper[i], upper[best]);
    }

    double diag = sigma(i, i);
    for (Eigen::Index j = 0; j < i; ++j) {
      diag -= l(i, j) * l(i, j);
    }
    l(i, i) = std::sqrt(std::max(diag, 1e-300));
    for (Eigen::Index k = i + 1; k < n; ++k) {
      double v = sigma(k, i);
      for (Eigen::Index j = 0; j < i; ++j) {
        v -= l(k, j) * l(i, j);
      }
      l(k, i) = v / l(i, i);
    }

    double shift = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      shift += l(i, j) * y[j];
    }
    const double b = (upper[i] - shift) / l(i, i);
    const double p = normal_cdf(b);
    // Mean of a standard normal truncated above at b.
    y[i] = p > 1e-300 ? -std::exp(-0.5 * b * b) / (std::sqrt(2.0 * std::numbers::pi) * p) : b;
  }

  GenzProblem problem;
  problem.chol = std::move(l);
  problem.upper = std::move(upper);
  problem.first_factor = normal_cdf(problem.upper[0] / problem.chol(0, 0));
  return problem;
}

double genz_integrand(const GenzProblem& problem, const double* w, std::vector<double>& y)
{
  const Eigen::Index n = problem.upper.size();
  double e = problem.first_factor;
  double f = e;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (e <= 0.0) {
      return 0.0;
    }
    const double u = std::clamp(w[i - 1] * e, 1e-300, 1.0 - 1e-16);
    y[i - 1] = normal_quantile(u);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      shift += problem.chol(i, j) * y[j];
    }
    e = normal_cdf((problem.upper[i] - shift) / problem.chol(i, i));
    f *= e;
  }
  return f;
}

std::vector<double> richtmyer_generator(int dims)
{
  std::vector<double> z;
  z.reserve(dims);
  for (int candidate = 2; static_cast<int>(z.size()) < dims; ++candidate) {
    bool prime = true;
    for (int d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) {
      const double root = std::sqrt(static_cast<double>(candidate));
      z.push_back(root - std::floor(root));
    }
  }
  return z;
}

// One randomly shifted lattice rule with n points, tent-periodized and
// antithetic.
double shifted_lattice_mean(const GenzProblem& problem, const std::vector<double>& generator,
                            const double* shift, int n, std::vector<double>& w,
                            std::vector<double>& w_anti, std::vector<double>& y)
{
  const std::size_t dims = generator.size();
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (std::size_t d = 0; d < dims; ++d) {
      double x = k * generator[d] + shift[d];
      x -= std::floor(x);
      const double tent = std::abs(2.0 * x - 1.0);
      w[d] = tent;
      w_anti[d] = 1.0 - tent;
    }
    sum += 0.5 * (genz_integrand(problem, w.data(), y) + genz_integrand(problem, w_anti.data(), y));
  }
  return sum / n;
}

}  // namespace

MvnResult mvn_cdf(const Eigen::Ref<const Eigen::VectorXd>& upper, const CorrelationModel& model,
                  const MvnOptions& options)
{
  if (upper.size() != model.dim) {
    throw std::invalid_argument("mvn_cdf: dimension mismatch");
  }
  if (!(options.abs_tol > 0.0)) {
    throw std::invalid_argument("mvn_cdf: tolerance must be positive");
  }

  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < upper.size(); ++j) {
    if (std::isnan(upper[j])) {
      throw std::invalid_argument("mvn_cdf: NaN limit");
    }
    if (upper[j] == -kInf) {
      return {0.0, 0.0, 0};
    }
    if (upper[j] != kInf) {
      kept.push_back(j);
    }
  }
  const auto n = static_cast<Eigen::Index>(kept.size());
  if (n == 0) {
    return {1.0, 0.0, 0};
  }
  if (n == 1) {
    return {normal_cdf(upper[kept[0]]), 0.0, 0};
  }

  Eigen::MatrixXd cov(n, n);
  Eigen::VectorXd limits(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    limits[a] = upper[kept[a]];
    for (Eigen::Index b = 0; b < n; ++b) {
      cov(a, b) = model.regularized(kept[a], kept[b]);
    }
  }
  const GenzProblem problem = prepare_genz(cov, std::move(limits));

  const int dims = static_cast<int>(n - 1);
  const int shifts = std::max(options.shifts, 2);
  const std::vector<double> generator = richtmyer_generator(dims);
  std::vector<double> shift_table(static_cast<std::size_t>(shifts) * dims);
  Rng rng(hash64(options.seed, static_cast<std::uint64_t>(StreamId::MvnShifts)));
  for (double& s : shift_table) {
    s = uniform01(rng);
  }

  std::vector<double> w(dims);
  std::vector<double> w_anti(dims);
  std::vector<double> y(dims);
  std::vector<double> estimates(shifts);

  auto run = [&](int points) {
    MvnResult r;
    for (int s = 0; s < shifts; ++s) {
      estimates[s] = shifted_lattice_mean(problem, generator, &shift_table[static_cast<std::size_t>(s) * dims],
                                          points, w, w_anti, y);
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / shifts;
    double ss = 0.0;
    for (double e : estimates) {
      ss += (e - mean) * (e - mean);
    }
    r.value = std::clamp(mean, 0.0, 1.0);
    r.error = 3.0 * std::sqrt(ss / (static_cast<double>(shifts) * (shifts - 1)));
    r.points = points * shifts;
    return r;
  };

  if (options.fixed_points > 0) {
    return run(options.fixed_points);
  }

  int points = 64;
  MvnResult result = run(points);
  while (!(result.error <= options.abs_tol && result.error <= options.rel_tol * result.value)) {
    if (static_cast<long long>(2 * points) * shifts > options.max_points) {
      break;
    }
    points *= 2;
    result = run(points);
  }
  if (result.error > options.abs_tol) {
    throw MvnConvergenceError("mvn_cdf: error estimate " + std::to_string(result.error) +
                                  " exceeds tolerance " + std::to_string(options.abs_tol),
                              result);
  }
  return result;
}

MvnResult mvn_cdf_equicoordinate(double t, const CorrelationModel& model, const MvnOptions& options)
{
  if (t == -kInf) {
    return {0.0, 0.0, 0};
  }
  if (t == kInf) {
    return {1.0, 0.0, 0};
  }
  return mvn_cdf(Eigen::VectorXd::Constant(model.dim, t), model, options);
}

namespace {

double copula_argument(double u)
{
  if (u <= 0.0) {
    return -kInf;
  }
  if (u >= 1.0) {
    return kInf;
  }
  return normal_score(u);
}

}  // namespace

double gaussian_copula_cdf(const Eigen::Ref<const Eigen::VectorXd>& u, const CorrelationModel& model,
                           const MvnOptions& options)
{
  if (u.size() != model.dim) {
    throw std::invalid_argument("gaussian_copula_cdf: dimension mismatch");
  }
  Eigen::VectorXd t(u.size());
  bool equal = true;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (!(u[j] >= 0.0 && u[j] <= 1.0)) {
      throw std::invalid_argument("gaussian_copula_cdf: components must lie in [0, 1]");
    }
    t[j] = copula_argument(u[j]);
    equal = equal && u[j] == u[0];
  }
  if (equal) {
    return mvn_cdf_equicoordinate(t[0], model, options).value;
  }
  return mvn_cdf(t, model, options).value;
}

double gaussian_copula_density(const Eigen::Ref<const Eigen::VectorXd>& u, const CorrelationModel& model)
{
  if (u.size() != model.dim) {
    throw std::invalid_argument("gaussian_copula_density: dimension mismatch");
  }
  Eigen::VectorXd z(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (!(u[j] > 0.0 && u[j] < 1.0)) {
      throw std::domain_error("gaussian_copula_density: components must lie strictly inside (0, 1)");
    }
    z[j] = normal_score(u[j]);
  }
  const double quad = z.dot(model.inverse * z) - z.squaredNorm();
  return std::exp(-0.5 * quad - 0.5 * model.log_det);
}

Eigen::VectorXd sample_correlated_normals(const CorrelationModel& model, Rng& rng)
{
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(model.dim);
  for (int j = 0; j < model.dim; ++j) {
    z[j] = normal(rng);
  }
  return model.factor.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_correlated_uniforms(const CorrelationModel& model, Rng& rng)
{
  return sample_correlated_normals(model, rng).unaryExpr([](double x) { return normal_cdf(x); });
}

}  // namespace fas
