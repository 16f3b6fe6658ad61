#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace anisodrop {

/// Gauss-Legendre rule on [-1,1]. Nodes/weights are computed once per order
/// by Newton iteration on the Legendre polynomial and cached, so no
/// hard-coded coefficient tables are involved.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

template <class F>
double fixed_gauss(F&& f, double a, double b, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    acc += g.weights[i] * f(mid + half * g.nodes[i]);
  return acc * half;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
};

namespace detail {

template <class F>
void adaptive_rec(F& f, double a, double b, double rel_tol, double floor_abs,
                  int depth, QuadResult& out) {
  const double coarse = fixed_gauss(f, a, b, 7);
  const double fine = fixed_gauss(f, a, b, 15);
  out.evals += 22;
  const double err = std::abs(fine - coarse);
  if (depth <= 0 || err <= rel_tol * std::abs(fine) + floor_abs) {
    out.value += fine;
    out.error += err;
    return;
  }
  const double mid = 0.5 * (a + b);
  adaptive_rec(f, a, mid, rel_tol, 0.5 * floor_abs, depth - 1, out);
  adaptive_rec(f, mid, b, rel_tol, 0.5 * floor_abs, depth - 1, out);
}

}  // namespace detail

/// Adaptive bisection with nested 7/15-point Gauss estimates. The accept
/// threshold is relative, plus an interval-proportional absolute floor that
/// the caller scales to the expected magnitude of the whole integral (keeps
/// refinement decisions scale covariant and stops over-refinement of
/// sign-changing integrands near their zeros).
template <class F>
QuadResult adaptive_gauss(F&& f, double a, double b, double rel_tol,
                          double floor_abs = 0.0, int max_depth = 32) {
  QuadResult out;
  if (!(b > a) && !(a > b)) return out;
  detail::adaptive_rec(f, a, b, rel_tol, floor_abs, max_depth, out);
  return out;
}

}  // namespace anisodrop
