#pragma once

#include <cmath>
#include <utility>

namespace anisodrop {

/// Golden-section minimization on [a,b]; returns (argmin, min). Assumes a
/// bracket (caller pre-scans when unimodality is not guaranteed).
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b,
                                     double x_tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b,
                                     double x_tol) {
  auto neg = [&f](double x) { return -f(x); };
  auto [x, v] = golden_min(neg, a, b, x_tol);
  return {x, -v};
}

}  // namespace anisodrop
