/// @file interp.hpp
/// @brief Monotone cubic Hermite interpolation (Fritsch-Carlson slopes) for
///        strictly monotone tabulated data. Interpolant preserves monotonicity.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "capstokes/errors.hpp"

namespace capstokes {

class MonotoneCubic {
public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw ValidationError("monotone interpolation needs >= 2 matched samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i + 1] > x_[i]))
        throw ValidationError("interpolation abscissae must be strictly increasing");
    std::vector<double> d(n - 1);
    bool increasing = y_[1] > y_[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
      if ((increasing && d[i] <= 0.0) || (!increasing && d[i] >= 0.0))
        throw ValidationError("tabulated data is not strictly monotone");
    }
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      // Harmonic-mean slope limiter keeps the cubic monotone on each cell.
      double h0 = x_[i] - x_[i - 1];
      double h1 = x_[i + 1] - x_[i];
      double w0 = 2.0 * h1 + h0;
      double w1 = h1 + 2.0 * h0;
      m_[i] = (w0 + w1) / (w0 / d[i - 1] + w1 / d[i]);
    }
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  double y_min() const { return std::min(y_.front(), y_.back()); }
  double y_max() const { return std::max(y_.front(), y_.back()); }

  double eval(double x) const {
    auto [i, t, h] = locate(x);
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
  }

  double deriv(double x) const {
    auto [i, t, h] = locate(x);
    double dh00 = 6 * t * (t - 1);
    double dh10 = (1 - t) * (1 - 3 * t);
    double dh01 = -dh00;
    double dh11 = t * (3 * t - 2);
    return (dh00 * y_[i] + h * dh10 * m_[i] + dh01 * y_[i + 1] +
            h * dh11 * m_[i + 1]) / h;
  }

private:
  struct Loc { std::size_t i; double t; double h; };

  Loc locate(double x) const {
    if (x < x_.front() || x > x_.back())
      throw ValidationError("tabulated evaluation out of range");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  std::vector<double> x_, y_, m_;
};

} // namespace capstokes
