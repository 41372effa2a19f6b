/// @file rootfind.hpp
/// @brief Bracketing root finders used on strictly monotone scalar maps.

#pragma once

#include <cmath>
#include <functional>

#include "capstokes/errors.hpp"

namespace capstokes {

/// Bisects f on [lo, hi] (f(lo), f(hi) of opposite sign) until the bracket
/// width falls below width_tol; returns the final bracket midpoint.
template <class F>
double bisect(F&& f, double lo, double hi, double width_tol,
              int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw SolverError("bisection: endpoints do not bracket a root");
  for (int it = 0; it < max_iter && (hi - lo) > width_tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

/// Fixed number of secant refinements from two seed points; falls back to the
/// better seed when the secant step degenerates or leaves [lo, hi].
template <class F>
double secant_refine(F&& f, double x0, double x1, int steps, double lo,
                     double hi) {
  double f0 = f(x0);
  double f1 = f(x1);
  for (int it = 0; it < steps; ++it) {
    double denom = f1 - f0;
    if (denom == 0.0) break;
    double x2 = x1 - f1 * (x1 - x0) / denom;
    if (!(x2 >= lo && x2 <= hi) || !std::isfinite(x2)) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f(x1);
    if (f1 == 0.0) break;
  }
  return std::abs(f1) <= std::abs(f0) ? x1 : x0;
}

} // namespace capstokes
