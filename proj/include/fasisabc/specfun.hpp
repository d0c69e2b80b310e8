// SPDX-License-Identifier: Apache-2.0
//
// Special functions and Gauss-Laguerre quadrature used by every statistical
// formula in the library. Everything here is a pure function of its inputs.

#ifndef FASISABC_SPECFUN_HPP
#define FASISABC_SPECFUN_HPP

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace fas {

/// j0(x) = sin(x)/x with j0(0) = 1. A short Taylor series is used for
/// |x| < 1e-4 so the quotient never cancels.
template <typename Scalar>
Scalar spherical_bessel_j0(Scalar x)
{
  using std::abs;
  using std::sin;
  if (abs(x) < Scalar(1e-4)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) + x2 * x2 / Scalar(120);
  }
  return sin(x) / x;
}

/// Inverse error function on (-1, 1). Throws std::domain_error outside.
double erf_inv(double p);

/// Inverse complementary error function on (0, 2). Accurate in the tails
/// where erf_inv(1 - q) would lose digits.
double erfc_inv(double q);

/// Standard normal CDF.
inline double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Standard normal quantile on (0, 1), full double precision in both tails.
double normal_quantile(double u);

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
/// Series for x < s + 1, Lentz continued fraction otherwise.
double gamma_p(double s, double x);

/// Modified Bessel function of the second kind, orders 0 and 1.
double bessel_k0(double x);
double bessel_k1(double x);
/// Dispatches to bessel_k0 / bessel_k1; throws for any other order.
double bessel_k(int nu, double x);

/// Gauss-Laguerre rule for the weight e^{-x} on [0, inf).
///
/// `weights` are the classical weights; for large orders the tail weights
/// underflow in double precision, so `log_weights` and the pre-multiplied
/// `scaled_weights` (w_m e^{x_m}) are kept alongside and are always finite.
template <typename Scalar = double>
struct QuadratureRule
{
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  int order = 0;
  Vector nodes;
  Vector weights;
  Vector log_weights;
  Vector scaled_weights;

  /// sum_m w_m f(x_m), i.e. approximates int_0^inf e^{-x} f(x) dx.
  template <typename F>
  Scalar weighted_sum(F&& f) const
  {
    Scalar acc = 0;
    for (int m = 0; m < order; ++m) {
      acc += weights[m] * f(nodes[m]);
    }
    return acc;
  }

  /// sum_m w_m e^{x_m} g(x_m), i.e. approximates int_0^inf g(x) dx.
  template <typename F>
  Scalar integrate(F&& g) const
  {
    Scalar acc = 0;
    for (int m = 0; m < order; ++m) {
      acc += scaled_weights[m] * g(nodes[m]);
    }
    return acc;
  }
};

inline constexpr int kMaxLaguerreOrder = 256;
inline constexpr int kDefaultLaguerreOrder = 64;

/// Nodes from the eigenvalues of the Laguerre Jacobi matrix (Golub-Welsch),
/// polished by Newton steps on L_M; weights from
/// w_m = x_m / ((M + 1)^2 L_{M+1}(x_m)^2), evaluated in log space.
/// Throws std::domain_error unless 1 <= order <= 256.
QuadratureRule<double> gauss_laguerre(int order);

}  // namespace fas

#endif  // FASISABC_SPECFUN_HPP
