// SPDX-License-Identifier: Apache-2.0

#include "fasisabc/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace fas {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the 7-point rule, matching kKronrodNodes[1], [3], [5], [7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b, int& evaluations)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = kKronrodWeights[7] * f_center;
  double gauss = kGaussWeights[3] * f_center;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) {
      gauss += kGaussWeights[i / 2] * sum;
    }
  }
  evaluations += 15;
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

IntegrationResult integrate(const Integrand& f, double a, double b,
                            const IntegrationOptions& options)
{
  IntegrationResult result;
  if (a == b) {
    return result;
  }
  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(f, a, b, result.evaluations));
  double total = heap.top().value;
  double error = heap.top().error;

  int intervals = 1;
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
    if (intervals >= options.max_intervals) {
      result.value = total;
      result.abs_error = error;
      throw QuadratureError("integrate: tolerance not reached within " +
                                std::to_string(options.max_intervals) + " intervals",
                            result);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gauss_kronrod(f, worst.a, mid, result.evaluations);
    const Segment right = gauss_kronrod(f, mid, worst.b, result.evaluations);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Re-sum from the leaves so the running updates leave no drift.
  total = 0.0;
  error = 0.0;
  std::vector<Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  for (auto it = leaves.rbegin(); it != leaves.rend(); ++it) {
    total += it->value;
    error += it->error;
  }
  result.value = total;
  result.abs_error = error;
  return result;
}

IntegrationResult integrate_to_infinity(const Integrand& f, double a,
                                        const IntegrationOptions& options)
{
  const Integrand mapped = [&f, a](double t) {
    if (t >= 1.0) {
      return 0.0;
    }
    const double one_minus = 1.0 - t;
    const double value = f(a + t / one_minus);
    return value == 0.0 ? 0.0 : value / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, options);
}

}  // namespace fas
