/// @file geometry.hpp
/// @brief Flattening-map geometry: harmonic extension of the surface
///        perturbation via the even-reflection cosine series, the vertical
///        cutoff, and the coefficient fields A, J, K of the pulled-back
///        operators. The flattened domain is the equilibrium domain; all
///        time dependence enters through these fields.

#pragma once

#include <vector>

#include "capstokes/equilibrium.hpp"
#include "capstokes/mesh.hpp"
#include "capstokes/surface_modes.hpp"

namespace capstokes {

/// Vertical cutoff: phi(z) = 0 for z <= m/4, phi(z) = z for z >= m/2,
/// septic smoothstep blend in between (C^3 at both seams, monotone). The
/// extra seam smoothness keeps second derivatives of the flattening map
/// Lipschitz, so nodal gradient recovery converges at full order.
struct CutoffPhi {
  double m = 1.0; // min of zeta0
  double phi(double z) const;
  double dphi(double z) const;
};

/// Pointwise geometry data at x = (x1, x2), all from exact per-mode formulas.
/// d1/d2 are partials of the composed field eta_bar(x) = (P E eta)(x1, x2 - zeta0(x1)).
struct GeometryPoint {
  double eta_bar = 0.0, d1_eta_bar = 0.0, d2_eta_bar = 0.0;
  double W = 0.0; // phi(x2) / zeta0(x1)
  double A = 0.0; // W d1(eta_bar) - (W/zeta0) zeta0' eta_bar
  double J = 1.0; // 1 + W d2(eta_bar) + phi'(x2) eta_bar / zeta0
  double K = 1.0; // 1/J
  // grad(Phi) = [[1, 0], [A, J]]; calA = [[1, -A K], [0, K]]; M = [[K, 0], [K A, 1]].
};

/// Surface (1D) data at x1: trace derivatives and normals. N0 = (-zeta0', 1)
/// is the equilibrium scaled normal, N = N0 - (d1 eta) e1 the perturbed one.
struct SurfacePoint {
  double eta = 0.0, deta = 0.0, ddeta = 0.0;
  double zeta0 = 0.0, dzeta0 = 0.0, ddzeta0 = 0.0;
  double N0[2] = {0.0, 1.0};
  double N[2] = {0.0, 1.0};
  double dN1 = 0.0; // d/dx1 of N_1 = -(zeta0'' + ddeta)
  double T[2] = {1.0, 0.0}; // unit tangent of the equilibrium surface
};

class GeometryEvaluator {
public:
  GeometryEvaluator(const EquilibriumSurface& eq, const SurfaceField& eta);

  const CutoffPhi& cutoff() const { return cutoff_; }
  const EquilibriumSurface& equilibrium() const { return *eq_; }
  const SurfaceField& eta() const { return *eta_; }

  /// Fast path: equilibrium data at x1 supplied by the caller (cached per
  /// mesh). Throws SolverError("flattening map degenerate") when J <= 0.
  GeometryPoint at_cached(double x1, double x2, double zeta0,
                          double dzeta0) const;

  /// Convenience path evaluating zeta0 analytically.
  GeometryPoint at(double x1, double x2) const;

  SurfacePoint surface_at_cached(double x1, double zeta0, double dzeta0,
                                 double ddzeta0) const;
  SurfacePoint surface_at(double x1) const;

private:
  const EquilibriumSurface* eq_;
  const SurfaceField* eta_;
  CutoffPhi cutoff_;
};

/// Harmonic extension sampled at all mesh nodes. Errors when a node lies
/// above the zeta0 graph by more than the recorded chord sag of the mesh.
std::vector<double> poisson_extend(const SurfaceField& eta,
                                   const EquilibriumSurface& eq,
                                   const Mesh& mesh);

/// Equilibrium data cached per mesh node: {zeta0, dzeta0} at the node's x1.
std::vector<std::array<double, 2>> equilibrium_node_cache(
    const EquilibriumSurface& eq, const Mesh& mesh);

struct GeometryFields {
  std::vector<double> eta_bar, W, A, J, K, phi2; // per mesh node
  double worst_J_dev = 0.0;
  double worst_A = 0.0;
  bool ok = true; // small-data gate: worst_J_dev + worst_A <= 1/2
};

GeometryFields coefficient_fields(const Mesh& mesh, const GeometryEvaluator& ev,
                                  const std::vector<std::array<double, 2>>& node_cache);

struct GeometryGate {
  bool ok;
  double worst_J_dev;
  double worst_A;
};

/// Smallness gate from the nodal fields: ok iff
/// ||J - 1||_inf + ||A||_inf <= 1/2.
GeometryGate validate_geometry(const GeometryFields& f);

/// Max over interior nodes of |div_x (J calA)| rows, computed with the same
/// discrete operator used elsewhere (patch-averaged P2 nodal gradients).
/// The exact fields are divergence free, so this measures discretization.
double piola_residual(const Mesh& mesh, const GeometryFields& f);

} // namespace capstokes
