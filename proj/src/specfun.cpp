// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fas {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;  // 2/sqrt(pi)

// Giles' single-precision approximation of erfinv, written in terms of
// w = -log((1-x)(1+x)) so callers can supply w without forming 1 - x.
double erf_inv_initial(double w, double x)
{
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * x;
}

// Halley step for F(y) = target with F'' = -2 y F' (holds for erf and erfc).
inline double halley_step(double residual, double derivative, double y)
{
  const double d = residual / derivative;
  return d / (1.0 + y * d);
}

}  // namespace

double erfc_inv(double q)
{
  if (!(q > 0.0 && q < 2.0)) {
    throw std::domain_error("erfc_inv: argument must lie in (0, 2), got " + std::to_string(q));
  }
  if (q == 1.0) {
    return 0.0;
  }
  if (q > 1.0) {
    return -erfc_inv(2.0 - q);
  }
  if (q < 1e-10) {
    // Deep tail: Newton on log erfc(y) = log q from the asymptotic guess.
    const double log_q = std::log(q);
    double y = std::sqrt(-log_q - 0.5 * std::log(-std::numbers::pi * log_q));
    for (int it = 0; it < 50; ++it) {
      const double e = std::erfc(y);
      const double slope = -kTwoOverSqrtPi * std::exp(-y * y) / e;
      const double step = (std::log(e) - log_q) / slope;
      y -= step;
      if (std::abs(step) <= 1e-16 * y) {
        break;
      }
    }
    return y;
  }
  // q in (0, 1): y >= 0.  1 - x = q and 1 + x = 2 - q.
  const double w = -std::log(q * (2.0 - q));
  double y = erf_inv_initial(w, 1.0 - q);
  for (int it = 0; it < 12; ++it) {
    const double residual = std::erfc(y) - q;
    const double derivative = -kTwoOverSqrtPi * std::exp(-y * y);
    if (derivative == 0.0) {
      break;
    }
    const double step = halley_step(residual, derivative, y);
    y -= step;
    if (std::abs(step) <= 1e-16 * std::abs(y)) {
      break;
    }
  }
  return y;
}

double erf_inv(double p)
{
  if (!(std::abs(p) < 1.0)) {
    throw std::domain_error("erf_inv: argument must lie in (-1, 1), got " + std::to_string(p));
  }
  if (p == 0.0) {
    return 0.0;
  }
  if (std::abs(p) > 0.5) {
    // 1 - |p| is exact here, and erfc keeps the tail digits.
    const double y = erfc_inv(1.0 - std::abs(p));
    return p < 0 ? -y : y;
  }
  double y = erf_inv_initial(-std::log1p(-p * p), p);
  for (int it = 0; it < 2; ++it) {
    const double residual = std::erf(y) - p;
    const double derivative = kTwoOverSqrtPi * std::exp(-y * y);
    y -= halley_step(residual, derivative, y);
  }
  return y;
}

double normal_quantile(double u)
{
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("normal_quantile: argument must lie in (0, 1), got " + std::to_string(u));
  }
  // Wichura, AS241 (PPND16).
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
            45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
         133.14166789178437745) * r + 3.387132872796366608;
    const double den =
        ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
            21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
         42.313330701600911252) * r + 1.0;
    return q * num / den;
  }
  double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
            1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
         4.6303378461565452959) * r + 1.42343711074968357734;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
            0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
         2.05319162663775882187) * r + 1.0;
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
            0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
         5.4637849111641143699) * r + 6.6579046435011037772;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
            7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
         0.59983220655588793769) * r + 1.0;
    x = num / den;
  }
  return q < 0.0 ? -x : x;
}

double gamma_p(double s, double x)
{
  if (!(s > 0.0) || !(x >= 0.0)) {
    throw std::domain_error("gamma_p: requires s > 0 and x >= 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return 1.0;
  }
  const double log_prefactor = -x + s * std::log(x) - std::lgamma(s);
  constexpr double eps = 1e-17;
  constexpr int max_iter = 100000;

  if (x < s + 1.0) {
    double denom = s;
    double term = 1.0 / s;
    double sum = term;
    for (int n = 0; n < max_iter; ++n) {
      denom += 1.0;
      term *= x / denom;
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) {
        break;
      }
    }
    return std::min(1.0, sum * std::exp(log_prefactor));
  }

  // Modified Lentz evaluation of the continued fraction for Q(s, x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = b + an / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) {
      break;
    }
  }
  return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

struct BesselKPair
{
  double k0;
  double k1;
};

// Power series about the origin, used for 0 < x <= 2.
BesselKPair bessel_k_series(double x)
{
  const double y = 0.25 * x * x;
  const double log_half_x = std::log(0.5 * x);

  // k-th terms: y^k/(k!)^2 and y^k/(k!(k+1)!), with psi(k+1) = -gamma + H_k.
  double t0 = 1.0;
  double t1 = 1.0;
  double psi_k1 = -kEulerGamma;        // psi(k+1)
  double psi_k2 = 1.0 - kEulerGamma;   // psi(k+2)
  double sum0 = 0.0;
  double sum1 = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double c0 = t0 * (psi_k1 - log_half_x);
    const double c1 = t1 * (log_half_x - 0.5 * (psi_k1 + psi_k2));
    sum0 += c0;
    sum1 += c1;
    if (std::abs(c0) < 1e-17 * std::abs(sum0) && std::abs(c1) < 1e-17 * std::abs(sum1)) {
      break;
    }
    const double kp1 = k + 1.0;
    t0 *= y / (kp1 * kp1);
    t1 *= y / (kp1 * (kp1 + 1.0));
    psi_k1 += 1.0 / kp1;
    psi_k2 += 1.0 / (kp1 + 1.0);
  }
  return {sum0, 1.0 / x + 0.5 * x * sum1};
}

// Steed's continued fraction (Temme's CF2) for x > 2.
BesselKPair bessel_k_continued_fraction(double x)
{
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) {
      break;
    }
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

BesselKPair bessel_k_pair(double x)
{
  if (!(x > 0.0)) {
    throw std::domain_error("bessel_k: argument must be positive");
  }
  if (std::isinf(x)) {
    return {0.0, 0.0};
  }
  return x <= 2.0 ? bessel_k_series(x) : bessel_k_continued_fraction(x);
}

}  // namespace

double bessel_k0(double x)
{
  return bessel_k_pair(x).k0;
}

double bessel_k1(double x)
{
  return bessel_k_pair(x).k1;
}

double bessel_k(int nu, double x)
{
  switch (nu) {
    case 0:
      return bessel_k0(x);
    case 1:
      return bessel_k1(x);
    default:
      throw std::domain_error("bessel_k: only orders 0 and 1 are supported");
  }
}

namespace {

// L_n(x) and L_{n-1}(x) up to a common scale factor exp(log_scale).
struct ScaledLaguerre
{
  double value;
  double previous;
  double log_scale;
};

ScaledLaguerre laguerre_scaled(int n, double x)
{
  double p_prev = 1.0;  // L_0
  double p = 1.0 - x;   // L_1
  double log_scale = 0.0;
  if (n == 0) {
    return {1.0, 0.0, 0.0};
  }
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = next;
    if (std::abs(p) > 1e150) {
      p *= 1e-150;
      p_prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  return {p, p_prev, log_scale};
}

}  // namespace

QuadratureRule<double> gauss_laguerre(int order)
{
  if (order < 1 || order > kMaxLaguerreOrder) {
    throw std::domain_error("gauss_laguerre: order must lie in [1, " +
                            std::to_string(kMaxLaguerreOrder) + "], got " +
                            std::to_string(order));
  }
  const int m = order;

  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) {
    diag[k] = 2.0 * k + 1.0;
  }
  for (int k = 0; k + 1 < m; ++k) {
    sub[k] = k + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_laguerre: tridiagonal eigensolver failed");
  }

  QuadratureRule<double> rule;
  rule.order = m;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(m);
  rule.log_weights.resize(m);
  rule.scaled_weights.resize(m);

  for (int i = 0; i < m; ++i) {
    double x = rule.nodes[i];
    // Newton on L_M, using x L_M' = M (L_M - L_{M-1}).
    for (int it = 0; it < 8; ++it) {
      const ScaledLaguerre l = laguerre_scaled(m, x);
      const double denom = m * (l.value - l.previous);
      if (denom == 0.0) {
        break;
      }
      const double step = x * l.value / denom;
      x -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * x) {
        break;
      }
    }
    rule.nodes[i] = x;

    const ScaledLaguerre next = laguerre_scaled(m + 1, x);
    const double log_abs_next = std::log(std::abs(next.value)) + next.log_scale;
    const double log_w = std::log(x) - 2.0 * std::log(m + 1.0) - 2.0 * log_abs_next;
    rule.log_weights[i] = log_w;
    rule.weights[i] = std::exp(log_w);
    rule.scaled_weights[i] = std::exp(log_w + x);
  }
  return rule;
}

}  // namespace fas
