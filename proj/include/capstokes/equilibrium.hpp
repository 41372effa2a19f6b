/// @file equilibrium.hpp
/// @brief Equilibrium capillary surface of the open vessel: the shape
///        constant C, the reparametrization Xi and its inverse, the surface
///        profile zeta0 with analytic derivatives, contact angles, the
///        equilibrium energy functional, and residual diagnostics.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "capstokes/params.hpp"

namespace capstokes {

/// h(r) = int_0^{arcsin(|gamma|/sigma)} cos(psi)/sqrt(r - cos(psi)) dpsi,
/// strictly decreasing on (1, inf) with h(1+) = inf and h(inf) = 0.
double h_of(const PhysicalParams& p, double r);

struct ComputeCResult {
  bool flat = false; // gamma_jump == 0: no shape constant, zeta0 is constant
  double c = 0.0;    // solves h(c) = ell * sqrt(2 g / sigma) when not flat
};

/// Solves h(C) = ell sqrt(2g/sigma): bracketing bisection to width 1e-8,
/// then 5 secant refinements on the monotone map.
ComputeCResult compute_C(const PhysicalParams& p);

/// Xi(z) = sqrt(sigma/(2g)) int_0^z cos(psi)/sqrt(C - cos(psi)) dpsi, an odd
/// increasing bijection [-z*, z*] -> [-ell, ell], z* = arcsin(|gamma|/sigma).
double xi_map(const PhysicalParams& p, double c, double z);

/// Monotone bisection + Newton polish; |xi_inverse(xi_map(z)) - z| <= 1e-10.
double xi_inverse(const PhysicalParams& p, double c, double x);

class EquilibriumSurface {
public:
  PhysicalParams params;
  bool flat = true;
  double c_const = 0.0;     // shape constant (unused when flat)
  double zstar = 0.0;       // arcsin(|gamma|/sigma)
  double p0 = 0.0;          // equilibrium pressure constant
  double m_min = 0.0;       // minimal admissible mass above x2 = 0
  double omega = 0.0;       // interior wedge angle at the contact corners
  double theta_eq = 0.0;    // equilibrium contact angle, theta_eq + omega = pi
  double delta_omega = 0.0; // critical corner weight max{0, 2 - pi/omega}
  double min_zeta0 = 0.0;
  double chi_lift = 0.0;    // zeta0 = chi + chi_lift on the curved branch

  // Dense samples on the uniform grid x_j = -ell + j dx, j = 0..n.
  int n = 0;
  double dx = 0.0;
  std::vector<double> x, zeta0, dzeta0, ddzeta0;

  // Analytic pointwise evaluation (exact up to the Xi inversion tolerance).
  double zeta0_at(double x1) const;
  double dzeta0_at(double x1) const;
  double ddzeta0_at(double x1) const;
};

/// Builds the equilibrium surface and validates it against the vessel:
/// throws ValidationError("insufficient mass ...") when m_top <= m_min and
/// ValidationError("equilibrium spills ...") when zeta0(+-ell) >= wall_height.
EquilibriumSurface build_equilibrium(const PhysicalParams& p, int n = 2048);

/// H(zeta) = d/dx [ zeta' / sqrt(1 + zeta'^2) ] from samples: 4th-order
/// centered differences in the interior, one-sided at the ends.
std::vector<double> mean_curvature(std::span<const double> zeta, double dx);

/// I(zeta) = int (g/2) zeta^2 + sigma sqrt(1 + zeta'^2) dx
///           - gamma_jump (zeta(ell) + zeta(-ell)), from uniform samples.
double energy_functional(const PhysicalParams& p, std::span<const double> zeta,
                         double dx);

struct EquilibriumResidual {
  double ode_res;  // sup |g zeta0 - sigma H(zeta0) - p0| over the grid
  double bc_res;   // max endpoint flux mismatch vs +-gamma_jump
  double mass_res; // |int zeta0 - m_top| with the grid quadrature
};

EquilibriumResidual equilibrium_residual(const EquilibriumSurface& s);

/// CSV with columns x,zeta0,dzeta0,ddzeta0 and a parameter echo header.
void export_equilibrium_csv(const EquilibriumSurface& s, std::ostream& out);

} // namespace capstokes
