/// @file params.hpp
/// @brief Physical parameters of the vessel problem and the contact-line
///        response law V (contact-point velocity as a function of angle
///        perturbation). V must be strictly increasing with V(0) = 0.

#pragma once

#include <string>
#include <vector>

#include "capstokes/interp.hpp"

namespace capstokes {

enum class ResponseKind { Linear, Sinh, Tabulated };

struct ResponseFunction {
  ResponseKind kind = ResponseKind::Linear;

  // Linear: V(z) = z / kappa0, so the inverse law is W(z) = kappa0 * z.
  double kappa0 = 1.0;

  // Sinh (Blake-Haynes form): V(z) = A * sinh(B * z).
  double A = 1.0;
  double B = 1.0;

  // Tabulated: strictly monotone samples (z_i, V(z_i)) bracketing z = 0.
  std::vector<double> table_z;
  std::vector<double> table_v;

  static ResponseFunction linear(double kappa0);
  static ResponseFunction sinh_law(double A, double B);
  static ResponseFunction tabulated(std::vector<double> z, std::vector<double> v);
  /// Loads a tabulated response from a two-column CSV (z, V(z)).
  static ResponseFunction from_csv(const std::string& path);

  /// Throws ValidationError unless V is strictly increasing with V(0) = 0.
  void validate() const;

  bool is_linear() const { return kind == ResponseKind::Linear; }

  /// V(z); tabulated responses use the monotone cubic interpolant and refuse
  /// to extrapolate outside the table.
  double eval_v(double z) const;
  double eval_v_deriv(double z) const;

  /// Interpolant access for tabulated responses (built lazily by validate()).
  const MonotoneCubic& interpolant() const;

private:
  mutable MonotoneCubic interp_;
  mutable bool interp_built_ = false;
};

struct PhysicalParams {
  double g = 1.0;           // gravity
  double sigma = 1.0;       // surface tension
  double mu = 1.0;          // viscosity
  double beta = 1.0;        // Navier slip coefficient
  double gamma_jump = 0.0;  // wetting-energy jump, |gamma_jump| < sigma
  double ell = 1.0;         // vessel half-width
  double wall_height = 2.0; // vessel wall height above x2 = 0
  double m_top = 1.0;       // prescribed fluid mass above x2 = 0
  ResponseFunction response;

  /// Throws ValidationError on any violated bound.
  void validate() const;
};

} // namespace capstokes
