#include "fasisabc/quadrature.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace fas;

TEST_SUITE("quadrature") {

TEST_CASE("finite interval")
{
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.abs_error <= 1e-10);
  CHECK(r.evaluations % 15 == 0);
}

TEST_CASE("integrable endpoint singularity")
{
  const auto r = integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, {1e-9, 1e-9, 4000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("semi-infinite interval")
{
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, {1e-9, 1e-9, 4000}).value ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 2.0).value ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("reversed and empty intervals")
{
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0).value == doctest::Approx(-0.5));
  CHECK(integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("budget exhaustion reports the best estimate")
{
  const Integrand wild = [](double x) { return std::sin(1.0 / (x + 1e-6)); };
  try {
    integrate(wild, 0.0, 1.0, {1e-14, 1e-14, 3});
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.best().value));
    CHECK(e.best().abs_error > 1e-14);
  }
}

}  // TEST_SUITE
