// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive Gauss-Kronrod (7/15) integration on finite and
// semi-infinite intervals.

#ifndef FASISABC_QUADRATURE_HPP
#define FASISABC_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace fas {

struct IntegrationResult
{
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
};

/// Raised when the requested tolerance is not met within the interval budget.
/// Carries the best estimate reached.
class QuadratureError : public std::runtime_error
{
public:
  QuadratureError(const std::string& what, IntegrationResult best)
      : std::runtime_error(what), best_(best)
  {
  }
  const IntegrationResult& best() const noexcept { return best_; }

private:
  IntegrationResult best_;
};

struct IntegrationOptions
{
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 2000;
};

using Integrand = std::function<double(double)>;

IntegrationResult integrate(const Integrand& f, double a, double b,
                            const IntegrationOptions& options = {});

/// int_a^inf f(x) dx through the map x = a + t / (1 - t).
IntegrationResult integrate_to_infinity(const Integrand& f, double a,
                                        const IntegrationOptions& options = {});

}  // namespace fas

#endif  // FASISABC_QUADRATURE_HPP
