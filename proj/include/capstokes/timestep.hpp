/// @file timestep.hpp
/// @brief Semi-implicit time stepping: geometry lagged at eta^n, surface
///        update eliminated into the Stokes solve, Newton iteration for the
///        nonlinear contact response, energy bookkeeping, checkpoints.

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "capstokes/assemble.hpp"
#include "capstokes/surface_modes.hpp"

namespace capstokes {

struct SimulationState {
  double time = 0.0;
  int step = 0;
  SurfaceField eta;
  Eigen::VectorXd u, p; // most recent solve (u in full node layout)
  std::array<double, 2> contact_velocity{0.0, 0.0};
  double lambda_p = 0.0, lambda_s = 0.0;

  // Newest-first rings (capacity 4) for backward time differences.
  std::vector<std::vector<double>> eta_history; // sample vectors
  std::vector<Eigen::VectorXd> u_history, p_history;
  std::vector<std::array<double, 2>> contact_history;

  static constexpr size_t history_cap = 4;
};

/// Fresh state at t = 0 holding eta0; the history ring starts with eta0.
SimulationState make_initial_state(const SurfaceField& eta0);

struct StepOptions {
  double dt = 1e-2;
  double newton_tol = 1e-10;
  int newton_max_iter = 10;
  bool picard_curvature = false; // one corrector pass on the lagged remainder
};

struct StepReport {
  int newton_iters = 0;
  double drift_pre = 0.0;        // mass change of the update before projection
  double mean_correction = 0.0;  // zero-mean shift applied after the update
  DissipationParts dissipation;  // evaluated at the step's lagged geometry
  double w_bracket = 0.0;        // kappa sum of V What(V) at the corners
  double energy_surface = 0.0;   // quadratic + remainder energy of eta^{n+1}
  double energy_full = 0.0;      // I(zeta0 + eta^{n+1})
  std::array<double, 2> contact_velocity{0.0, 0.0};
  double gate_value = 0.0;       // ||J - 1||_inf + ||A||_inf at eta^n
  double lambda_p = 0.0, lambda_s = 0.0;
  double rel_residual = 0.0;
};

/// One step eta^n -> eta^{n+1}. Throws SolverError when the smallness gate
/// trips ("left small-data regime") or the contact Newton loop diverges.
StepReport advance(SimulationState& state, const AssemblyCache& cache,
                   const std::vector<std::array<double, 2>>& node_cache,
                   const EquilibriumSurface& eq, const PhysicalParams& params,
                   const WHat& what, const StepOptions& opts);

/// Quadratic surface energy plus the cubic remainder:
/// int (g/2) eta^2 + (sigma/2) (eta')^2 (1 + zeta0'^2)^{-3/2}
///   + sigma Q(zeta0', eta') dx1 on the uniform grid.
double surface_energy(const AssemblyCache& cache, const PhysicalParams& params,
                      const SurfaceField& eta);

/// Full interface energy I(zeta0 + eta) on the uniform grid.
double full_energy(const AssemblyCache& cache, const PhysicalParams& params,
                   const SurfaceField& eta);

/// Centered energy-balance residuals. energies has one entry per state
/// (0..N); dissipations and brackets one per solve (1..N). Residual n
/// (1 <= n <= N-1) pairs the centered energy slope with the averaged
/// dissipation of the two adjacent solves; O(dt) for smooth data.
std::vector<double> energy_audit_residuals(const std::vector<double>& energies,
                                           const std::vector<double>& dissipations,
                                           const std::vector<double>& brackets,
                                           double dt);

/// Versioned deterministic text checkpoints (full history rings included,
/// so a resumed run reproduces the direct run bit for bit).
void write_checkpoint(std::ostream& out, const SimulationState& state);
SimulationState read_checkpoint(std::istream& in);

} // namespace capstokes
