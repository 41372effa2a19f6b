/// @file quadrature.hpp
/// @brief Adaptive integration (Gauss-Kronrod with a double-exponential
///        fallback, absolute tolerance 1e-12 by default) and composite rules
///        on uniform sample grids.

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "capstokes/errors.hpp"

namespace capstokes {

inline constexpr double kQuadAbsTol = 1e-12;

/// Adaptive (G7,K15) integration of f over [a,b] to absolute tolerance.
/// Integrands with steep boundary layers defeat the Kronrod error estimator
/// long before the value degrades; those fall back to tanh-sinh, whose node
/// clustering at the endpoints handles them at machine precision.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = kQuadAbsTol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double error = 0.0;
  // boost's termination is relative to the L1 norm; request a tight relative
  // tolerance and verify the absolute error estimate afterwards.
  double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/15, /*rel_tol=*/1e-14, &error);
  if (error <= abs_tol || error <= 1e-13 * (1.0 + std::abs(val)))
    return sign * val;

  // Construction precomputes node tables; share one instance per thread.
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double l1 = 0.0;
  val = ts.integrate(f, a, b, 1e-13, &error, &l1);
  const double abs_err = error * l1; // tanh_sinh reports relative to L1
  if (!(abs_err <= abs_tol || abs_err <= 1e-12 * (1.0 + std::abs(val))))
    throw SolverError("adaptive quadrature failed to reach tolerance");
  return sign * val;
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed to machine
/// precision by Newton iteration on the Legendre recurrence and cached.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
  if (n < 1 || n > 128) throw ValidationError("Gauss-Legendre order out of range");
  static thread_local std::vector<std::pair<std::vector<double>, std::vector<double>>>
      cache(129);
  auto& entry = cache[static_cast<std::size_t>(n)];
  if (!entry.first.empty()) return entry;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        break;
      }
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  entry = {std::move(x), std::move(w)};
  return entry;
}

/// Composite Simpson weights for n+1 uniformly spaced samples (n even
/// required for the pure rule; odd n falls back to Simpson + trailing 3/8).
inline std::vector<double> simpson_weights(std::size_t n_samples, double dx) {
  if (n_samples < 2) throw ValidationError("Simpson rule needs >= 2 samples");
  std::size_t n = n_samples - 1;
  std::vector<double> w(n_samples, 0.0);
  std::size_t m = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= m; i += 2) {
    w[i] += dx / 3.0;
    w[i + 1] += 4.0 * dx / 3.0;
    w[i + 2] += dx / 3.0;
  }
  if (n % 2 != 0) {
    if (n < 3) { // single interval: trapezoid
      w[0] += dx / 2.0;
      w[1] += dx / 2.0;
      return w;
    }
    // Simpson 3/8 on the last three intervals.
    w[n - 3] += 3.0 * dx / 8.0;
    w[n - 2] += 9.0 * dx / 8.0;
    w[n - 1] += 9.0 * dx / 8.0;
    w[n] += 3.0 * dx / 8.0;
  }
  return w;
}

inline double simpson_integrate(std::span<const double> samples, double dx) {
  auto w = simpson_weights(samples.size(), dx);
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += w[i] * samples[i];
  return s;
}

} // namespace capstokes
