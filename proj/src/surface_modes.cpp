#include "capstokes/surface_modes.hpp"

#include <cmath>

#include "capstokes/errors.hpp"
#include "capstokes/quadrature.hpp"

namespace capstokes {

SurfaceField::SurfaceField(double ell, int n) : ell_(ell), n_(n) {
  if (!(ell > 0.0)) throw ValidationError("surface grid needs ell > 0");
  if (n < 8) throw ValidationError("surface grid needs >= 8 intervals");
  dx_ = 2.0 * ell_ / n_;
  samples_.assign(n_ + 1, 0.0);
  coef_.assign(n_ + 1, 0.0);
  weights_ = simpson_weights(n_ + 1, dx_);
}

double SurfaceField::wavenumber(int k) const {
  return M_PI * k / (2.0 * ell_);
}

void SurfaceField::refresh() {
  // Type-I discrete cosine transform of the even-reflected sequence.
  const int n = n_;
  for (int k = 0; k <= n; ++k) {
    double acc = 0.5 * samples_[0];
    for (int j = 1; j < n; ++j)
      acc += samples_[j] * std::cos(M_PI * j * k / double(n));
    acc += 0.5 * ((k % 2 == 0) ? samples_[n] : -samples_[n]);
    double ck = (k == 0 || k == n) ? 1.0 : 2.0;
    coef_[k] = ck * acc / double(n);
  }
}

double SurfaceField::eval(double x) const {
  const double u = x + ell_;
  double acc = 0.0;
  for (int k = 0; k <= n_; ++k)
    acc += coef_[k] * std::cos(wavenumber(k) * u);
  return acc;
}

double SurfaceField::eval_d1(double x) const {
  const double u = x + ell_;
  double acc = 0.0;
  for (int k = 1; k <= n_; ++k) {
    double w = wavenumber(k);
    acc -= coef_[k] * w * std::sin(w * u);
  }
  return acc;
}

double SurfaceField::eval_d2(double x) const {
  const double u = x + ell_;
  double acc = 0.0;
  for (int k = 1; k <= n_; ++k) {
    double w = wavenumber(k);
    acc -= coef_[k] * w * w * std::cos(w * u);
  }
  return acc;
}

double SurfaceField::mass() const {
  double acc = 0.0;
  for (int j = 0; j <= n_; ++j) acc += weights_[j] * samples_[j];
  return acc;
}

double SurfaceField::project_zero_mean() {
  double mean = mass() / (2.0 * ell_);
  for (double& v : samples_) v -= mean;
  coef_[0] -= mean;
  return mean;
}

} // namespace capstokes
