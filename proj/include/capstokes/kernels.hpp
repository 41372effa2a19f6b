/// @file kernels.hpp
/// @brief Perturbation kernels of the curvature operator and the contact law:
///        the Taylor remainder R(y,z) of t -> t/sqrt(1+t^2) about y, its
///        potential Q(y,z) = int_0^z R(y,r) dr, the normalized contact
///        nonlinearity What(z) = W(z)/kappa - z, and kappa = W'(0).

#pragma once

#include "capstokes/params.hpp"

namespace capstokes {

/// Closed form: R(y,z) = (y+z)/sqrt(1+(y+z)^2) - y/sqrt(1+y^2) - z/(1+y^2)^{3/2}.
double R_eval(double y, double z);

/// dR/dz = (1+(y+z)^2)^{-3/2} - (1+y^2)^{-3/2}.
double R_dz(double y, double z);

/// dR/dy = dR/dz + 3*y*z/(1+y^2)^{5/2}.
double R_dy(double y, double z);

/// Integral (Taylor remainder) form, kept as a cross-check of the closed
/// form: 3 * int_0^z (s-z)(s+y) (1+(y+s)^2)^{-5/2} ds, adaptive quadrature.
double R_integral_form(double y, double z);

/// Q(y,z) = int_0^z R(y,r) dr by adaptive quadrature; dQ/dz = R(y,z).
double Q_eval(double y, double z);

/// kappa = W'(0) where W is the inverse of the response V. Analytic for the
/// closed forms; 4th-order central differences of W for tabulated data.
double kappa_of(const ResponseFunction& response);

/// W(v) = V^{-1}(v). Tabulated responses invert by monotone bisection on the
/// interpolant; evaluation outside [V(z_min), V(z_max)] is an error.
double W_of(const ResponseFunction& response, double v);

/// Normalized deviation of the contact law from its linearization.
/// What(z) = W(z)/kappa - z; identically zero for linear responses.
class WHat {
public:
  explicit WHat(const ResponseFunction& response);

  double kappa() const { return kappa_; }
  bool is_linear() const { return response_->is_linear(); }

  double eval(double z) const;

  /// What'(z) = W'(z)/kappa - 1 with W'(v) = 1/V'(W(v)).
  double deriv(double z) const;

private:
  const ResponseFunction* response_;
  double kappa_;
};

} // namespace capstokes
