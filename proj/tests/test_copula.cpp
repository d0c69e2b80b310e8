#include "fasisabc/channel.hpp"
#include "fasisabc/copula.hpp"
#include "fasisabc/specfun.hpp"

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

using namespace fas;

namespace {

CorrelationModel bivariate(double rho)
{
  Eigen::Matrix2d r;
  r << 1.0, rho, rho, 1.0;
  return build_correlation_model(r);
}

}  // namespace

TEST_SUITE("copula") {

TEST_CASE("normal score saturates near the boundary")
{
  CHECK(normal_score(0.5) == 0.0);
  CHECK(normal_score(1e-16) == -kNormalScoreLimit);
  CHECK(normal_score(1e-15) == -kNormalScoreLimit);
  CHECK(normal_score(1.0 - 1e-16) == kNormalScoreLimit);
  CHECK(normal_score(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_score(1e-10) > -kNormalScoreLimit);
}

TEST_CASE("bivariate orthant probability")
{
  const auto m = bivariate(0.5);
  CHECK(mvn_cdf_equicoordinate(0.0, m).value == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(mvn_cdf_equicoordinate(-std::numeric_limits<double>::infinity(), m).value == 0.0);
  CHECK(mvn_cdf_equicoordinate(std::numeric_limits<double>::infinity(), m).value == 1.0);
}

TEST_CASE("independent coordinates factorize")
{
  const auto m = build_correlation_model(Eigen::MatrixXd::Identity(4, 4));
  Eigen::Vector4d t(-0.3, 0.2, 1.0, -1.5);
  double expected = 1.0;
  for (int j = 0; j < 4; ++j) {
    expected *= normal_cdf(t[j]);
  }
  const MvnResult r = mvn_cdf(t, m);
  CHECK(std::abs(r.value - expected) <= std::max(r.error, 1e-6));
  CHECK(r.error <= 1e-4);
}

TEST_CASE("infinite limits drop or zero the problem")
{
  const auto m = bivariate(0.3);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(mvn_cdf(Eigen::Vector2d(0.4, inf), m).value == doctest::Approx(normal_cdf(0.4)).epsilon(1e-14));
  CHECK(mvn_cdf(Eigen::Vector2d(0.4, -inf), m).value == 0.0);
}

TEST_CASE("MVN result is reproducible for a fixed seed")
{
  const auto m = build_correlation_model(correlation_matrix({2, 2, 0.5, 0.5}));
  const Eigen::Vector4d t(0.1, -0.2, 0.3, 0.0);
  CHECK(mvn_cdf(t, m).value == mvn_cdf(t, m).value);
  MvnOptions other;
  other.seed = 99;
  CHECK(std::abs(mvn_cdf(t, m).value - mvn_cdf(t, m, other).value) < 3e-4);
}

TEST_CASE("correlation model rejects malformed input")
{
  Eigen::Matrix2d bad;
  bad << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(build_correlation_model(bad), std::invalid_argument);
  bad << 2.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(build_correlation_model(bad), std::invalid_argument);
  bad << 1.0, 1.5, 1.5, 1.0;
  CHECK_THROWS_AS(build_correlation_model(bad), std::invalid_argument);
  CHECK_THROWS_AS(build_correlation_model(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("dense grids are regularized to positive definite")
{
  const Eigen::MatrixXd r = correlation_matrix({1, 12, 0.0, 0.5});
  const double min_raw = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff();
  const auto m = build_correlation_model(r);
  CHECK(min_raw < kDefaultEigenFloor);
  CHECK(m.eps_regularization > 0.0);
  CHECK((m.regularized.diagonal().array() - 1.0).abs().maxCoeff() < 1e-14);
  const double min_reg = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.regularized).eigenvalues().minCoeff();
  CHECK(min_reg > 0.0);
  CHECK((m.factor * m.factor.transpose() - m.regularized).cwiseAbs().maxCoeff() < 1e-12);

  const auto well = build_correlation_model(correlation_matrix({2, 2, 1.0, 1.0}));
  CHECK(well.eps_regularization == 0.0);
  CHECK(well.regularized == well.matrix);
}

TEST_CASE("copula density")
{
  const auto id = build_correlation_model(Eigen::MatrixXd::Identity(3, 3));
  CHECK(gaussian_copula_density(Eigen::Vector3d(0.2, 0.5, 0.9), id) == doctest::Approx(1.0).epsilon(1e-14));

  const double rho = 0.6;
  const auto m = bivariate(rho);
  const double z1 = normal_quantile(0.3);
  const double z2 = normal_quantile(0.8);
  const double expected = std::exp(-(rho * rho * (z1 * z1 + z2 * z2) - 2 * rho * z1 * z2) /
                                   (2 * (1 - rho * rho))) /
                          std::sqrt(1 - rho * rho);
  CHECK(gaussian_copula_density(Eigen::Vector2d(0.3, 0.8), m) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(gaussian_copula_density(Eigen::Vector2d(0.0, 0.8), m), std::domain_error);
  CHECK_THROWS_AS(gaussian_copula_density(Eigen::Vector2d(0.3, 1.0), m), std::domain_error);
}

TEST_CASE("copula CDF boundary values")
{
  const auto m = bivariate(0.4);
  CHECK(gaussian_copula_cdf(Eigen::Vector2d(0.0, 0.7), m) == 0.0);
  CHECK(gaussian_copula_cdf(Eigen::Vector2d(1.0, 0.7), m) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(gaussian_copula_cdf(Eigen::Vector2d(1.0, 1.0), m) == 1.0);
  CHECK_THROWS_AS(gaussian_copula_cdf(Eigen::Vector2d(1.2, 0.7), m), std::invalid_argument);
}

TEST_CASE("sampled normals carry the target correlation")
{
  const auto m = bivariate(-0.7);
  Rng rng(7);
  const int n = 100000;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd z = sample_correlated_normals(m, rng);
    sxy += z[0] * z[1];
    sxx += z[0] * z[0];
    syy += z[1] * z[1];
  }
  CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(-0.7).epsilon(0.02));
  const Eigen::VectorXd u = sample_correlated_uniforms(m, rng);
  CHECK(((u.array() > 0.0) && (u.array() < 1.0)).all());
}

}  // TEST_SUITE
