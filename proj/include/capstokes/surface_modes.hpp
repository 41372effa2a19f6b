/// @file surface_modes.hpp
/// @brief Surface perturbation eta on the uniform grid over [-ell, ell],
///        represented through its even reflection to a 4*ell-periodic
///        function. The cosine coefficients drive the harmonic extension and
///        give spectral derivatives of the trace.

#pragma once

#include <vector>

namespace capstokes {

class SurfaceField {
public:
  SurfaceField() = default;

  /// n grid intervals (n + 1 samples), initialized to zero.
  SurfaceField(double ell, int n);

  double ell() const { return ell_; }
  int n() const { return n_; }
  double dx() const { return dx_; }
  const std::vector<double>& samples() const { return samples_; }
  std::vector<double>& mutable_samples() { return samples_; }
  double grid_x(int j) const { return -ell_ + j * dx_; }

  /// Recomputes the cosine coefficients from the samples. Must be called
  /// after mutating samples; evaluation uses the coefficients only.
  void refresh();

  /// Coefficients a_k of eta(x) = sum_k a_k cos(k_wave (x + ell)),
  /// k_wave = pi k / (2 ell), k = 0..n.
  const std::vector<double>& coef() const { return coef_; }

  /// Wavenumber of mode k: pi k / (2 ell); equals 2 pi (k / (4 ell)).
  double wavenumber(int k) const;

  double eval(double x) const;
  double eval_d1(double x) const;
  double eval_d2(double x) const;

  /// Grid quadrature of the samples (composite Simpson); defines the mass
  /// functional used by the zero-mean constraint.
  double mass() const;
  const std::vector<double>& mass_weights() const { return weights_; }

  /// Subtracts the mean so the grid mass vanishes; returns the removed mean.
  double project_zero_mean();

private:
  double ell_ = 1.0;
  int n_ = 0;
  double dx_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> coef_;
  std::vector<double> weights_;
};

} // namespace capstokes
