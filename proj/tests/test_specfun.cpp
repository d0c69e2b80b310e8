#include "fasisabc/specfun.hpp"

#include "doctest.h"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

using namespace fas;

namespace {

double rel_err(double a, double b)
{
  return std::abs(a - b) / std::abs(b);
}

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("j0 reference values")
{
  CHECK(spherical_bessel_j0(0.0) == 1.0);
  CHECK(rel_err(spherical_bessel_j0(1.0), 0.84147098480789650665) < 1e-15);
  CHECK(rel_err(spherical_bessel_j0(2.0 * std::numbers::pi * std::sqrt(2.0)), 0.05776523985682891593) < 1e-13);
  CHECK(std::abs(spherical_bessel_j0(std::numbers::pi)) < 1e-15);
  // series and quotient agree at the switch point
  const double x = 1e-4;
  CHECK(rel_err(spherical_bessel_j0(x * (1 - 1e-12)), std::sin(x) / x) < 1e-15);
  CHECK(spherical_bessel_j0(-2.5) == spherical_bessel_j0(2.5));
}

TEST_CASE("erf_inv and erfc_inv")
{
  CHECK(rel_err(erf_inv(0.5), 0.47693627620446987338) < 1e-15);
  CHECK(erf_inv(0.0) == 0.0);
  CHECK(erf_inv(-0.5) == -erf_inv(0.5));
  for (double p : {1e-12, 1e-6, 0.1, 0.3, 0.7, 0.9, 0.999, 1 - 1e-12}) {
    CAPTURE(p);
    CHECK(rel_err(erf_inv(p), boost::math::erf_inv(p)) < 1e-14);
  }
  for (double q : {1e-300, 1e-100, 1e-20, 1e-8, 0.01, 0.5, 1.0, 1.5, 1.99}) {
    CAPTURE(q);
    const double ref = boost::math::erfc_inv(q);
    if (ref == 0.0) {
      CHECK(std::abs(erfc_inv(q)) < 1e-16);
    } else {
      CHECK(rel_err(erfc_inv(q), ref) < 1e-14);
    }
  }
  CHECK_THROWS_AS(erf_inv(1.0), std::domain_error);
  CHECK_THROWS_AS(erf_inv(-1.5), std::domain_error);
  CHECK_THROWS_AS(erfc_inv(0.0), std::domain_error);
}

TEST_CASE("normal quantile inverts the normal cdf")
{
  for (double u : {1e-300, 1e-15, 1e-5, 0.025, 0.5, 0.975, 1 - 1e-10}) {
    CAPTURE(u);
    const double ref = -std::numbers::sqrt2 * boost::math::erfc_inv(2 * u);
    if (ref == 0.0) {
      CHECK(normal_quantile(u) == doctest::Approx(0.0));
    } else {
      CHECK(rel_err(normal_quantile(u), ref) < 1e-14);
    }
  }
  for (double x : {-8.0, -3.0, -0.2, 0.0, 1.0, 4.0}) {
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("regularized lower incomplete gamma")
{
  CHECK(rel_err(gamma_p(2.5, 2.5), 0.58411981300449207972) < 1e-14);
  const double kappa = 1.10958904109589041096;
  CHECK(rel_err(gamma_p(kappa, kappa), 0.62562400655718621274) < 1e-14);
  CHECK(gamma_p(1.0, 0.0) == 0.0);
  for (double s : {0.2, 0.84, 1.0, 3.7, 25.0}) {
    for (double x : {1e-8, 0.01, 0.5, 1.0, 4.0, 30.0, 200.0}) {
      CAPTURE(s);
      CAPTURE(x);
      const double ref = boost::math::gamma_p(s, x);
      if (ref > 1e-300) {
        CHECK(rel_err(gamma_p(s, x), ref) < 1e-12);
      }
    }
  }
  // exponential special case
  CHECK(rel_err(gamma_p(1.0, 0.3), -std::expm1(-0.3)) < 1e-15);
}

TEST_CASE("modified Bessel K0 and K1")
{
  CHECK(rel_err(bessel_k0(1.0), 0.42102443824070833334) < 1e-14);
  CHECK(rel_err(bessel_k1(2.0), 0.13986588181652242728) < 1e-14);
  for (double x : {1e-6, 1e-3, 0.1, 0.9, 2.0, 2.0001, 5.0, 20.0, 100.0, 600.0}) {
    CAPTURE(x);
    CHECK(rel_err(bessel_k0(x), boost::math::cyl_bessel_k(0, x)) < 1e-13);
    CHECK(rel_err(bessel_k1(x), boost::math::cyl_bessel_k(1, x)) < 1e-13);
  }
  CHECK(bessel_k(0, 3.0) == bessel_k0(3.0));
  CHECK(bessel_k(1, 3.0) == bessel_k1(3.0));
  CHECK_THROWS(bessel_k(2, 1.0));
  CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
}

TEST_CASE("Gauss-Laguerre two-point rule")
{
  const auto rule = gauss_laguerre(2);
  REQUIRE(rule.order == 2);
  CHECK(rule.nodes[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-15));
  CHECK(rule.nodes[1] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(rule.weights[0] == doctest::Approx((2 + std::sqrt(2.0)) / 4).epsilon(1e-15));
  CHECK(rule.weights[1] == doctest::Approx((2 - std::sqrt(2.0)) / 4).epsilon(1e-15));
}

TEST_CASE("Gauss-Laguerre is exact for polynomials of degree below 2M")
{
  for (int m : {5, 10, 20}) {
    const auto rule = gauss_laguerre(m);
    for (int k = 0; k < 2 * m; ++k) {
      CAPTURE(m);
      CAPTURE(k);
      const double got = rule.weighted_sum([k](double x) { return std::pow(x, k); });
      CHECK(rel_err(got, std::tgamma(k + 1.0)) < 1e-10);
    }
  }
}

TEST_CASE("Gauss-Laguerre smooth integrand")
{
  const auto rule = gauss_laguerre(kDefaultLaguerreOrder);
  const double got = rule.weighted_sum([](double x) { return std::log1p(x); });
  CHECK(std::abs(got - 0.59634736232319407434) < 1e-9);
  CHECK(std::abs(rule.integrate([](double x) { return std::exp(-2 * x); }) - 0.5) < 1e-11);
}

TEST_CASE("Gauss-Laguerre order limits")
{
  CHECK_THROWS(gauss_laguerre(0));
  CHECK_THROWS(gauss_laguerre(kMaxLaguerreOrder + 1));
  const auto rule = gauss_laguerre(kMaxLaguerreOrder);
  CHECK(rule.nodes.allFinite());
  CHECK(rule.log_weights.allFinite());
  CHECK(rule.scaled_weights.allFinite());
  CHECK(std::abs(rule.weights.sum() - 1.0) < 1e-10);
}

}  // TEST_SUITE
