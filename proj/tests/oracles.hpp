/// @file oracles.hpp
/// @brief Self-contained reference numerics for the test suite: quadrature,
///        root finding, and regression fits that do not reuse library code.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// 64-point Gauss-Legendre rule on [-1, 1], built with Newton iteration on
/// the Legendre recurrence. Independent of the library quadrature module.
inline const std::array<std::array<double, 2>, 64>& gl64() {
  static const auto rule = [] {
    std::array<std::array<double, 2>, 64> r{};
    constexpr int n = 64;
    for (int k = 0; k < n; ++k) {
      double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r[k][0] = x;
      r[k][1] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

/// Composite 64-point Gauss-Legendre integration of f over [a, b].
inline double gl_integrate(const std::function<double(double)>& f, double a,
                           double b, int panels = 1) {
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (const auto& nw : gl64()) s += nw[1] * f(mid + 0.5 * h * nw[0]);
    total += 0.5 * h * s;
  }
  return total;
}

/// Plain bisection; requires a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, int iters = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::runtime_error("bisect: no sign change on the bracket");
  }
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (x, y); r_squared is the usual coefficient of
/// determination (1 for a perfect fit).
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::runtime_error("fit_line: need matching series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::runtime_error("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

/// Convergence order from error-vs-h data: slope of log err against log h.
inline double fit_order(const std::vector<double>& h,
                        const std::vector<double>& err) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < h.size(); ++i) {
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(err[i]));
  }
  return fit_line(lx, ly).slope;
}

namespace detail {

inline double tensor_gl4(const std::function<double(double, double)>& f,
                         double x0, double x1, double y0, double y1) {
  // 4-point Gauss-Legendre per axis: exact through degree 7 polynomials.
  static const double n4[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double w4[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      s += w4[i] * w4[j] * f(cx + hx * n4[i], cy + hy * n4[j]);
    }
  }
  return s * hx * hy;
}

inline double quad2d_rec(const std::function<double(double, double)>& f,
                         double x0, double x1, double y0, double y1,
                         double tol, int depth) {
  const double whole = tensor_gl4(f, x0, x1, y0, y1);
  const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  const double split = tensor_gl4(f, x0, xm, y0, ym) +
                       tensor_gl4(f, xm, x1, y0, ym) +
                       tensor_gl4(f, x0, xm, ym, y1) +
                       tensor_gl4(f, xm, x1, ym, y1);
  if (depth <= 0 || std::abs(split - whole) <= tol) return split;
  return quad2d_rec(f, x0, xm, y0, ym, 0.25 * tol, depth - 1) +
         quad2d_rec(f, xm, x1, y0, ym, 0.25 * tol, depth - 1) +
         quad2d_rec(f, x0, xm, ym, y1, 0.25 * tol, depth - 1) +
         quad2d_rec(f, xm, x1, ym, y1, 0.25 * tol, depth - 1);
}

} // namespace detail

/// Adaptive quadtree integration of f over the rectangle
/// [x0, x1] x [y0, y1]; handles mild corner singularities like dist^(2d).
inline double integrate2d(const std::function<double(double, double)>& f,
                          double x0, double x1, double y0, double y1,
                          double tol = 1e-10, int depth = 18) {
  return detail::quad2d_rec(f, x0, x1, y0, y1, tol, depth);
}

} // namespace oracle
