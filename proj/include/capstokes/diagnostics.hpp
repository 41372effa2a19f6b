/// @file diagnostics.hpp
/// @brief Per-step diagnostics rows, report finalization (balance residuals,
///        decay fit), CSV/JSON serialization, surface snapshots, and gnuplot
///        script emission.

#pragma once

#include <string>
#include <vector>

#include "capstokes/equilibrium.hpp"
#include "capstokes/norms.hpp"
#include "capstokes/surface_modes.hpp"

namespace capstokes {

/// One row per completed time step. All fields are serialized as doubles in
/// the fixed order of diagnostics_columns().
struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;             // grid mass of eta after projection
  double mean_correction = 0.0;  // mean removed by the zero-mean projection
  double drift_pre = 0.0;        // update mass drift before projection
  double energy_i = 0.0;         // I(zeta0 + eta)
  double energy_surface = 0.0;   // relative energy I(zeta0 + eta) - I(zeta0)
  double dissipation_viscous = 0.0;
  double dissipation_slip = 0.0;
  double dissipation_contact = 0.0; // kappa sum V^2
  double w_bracket = 0.0;           // kappa sum V What(V)
  double balance_residual = 0.0;    // backward one-step energy balance
  double e_parallel = 0.0;
  double d_bar_parallel = 0.0;
  double d_parallel = 0.0;
  double d_surrogate = 0.0;        // full dissipation with weighted terms
  double third_order_valid = 0.0;  // 1 when the d_t^3 eta term was available
  double v_left = 0.0, v_right = 0.0;
  double gate_value = 0.0;
  double newton_iters = 0.0;
  double lambda_p = 0.0, lambda_s = 0.0;
  double rel_residual = 0.0;
};

/// Final-state weighted norms for one weight exponent.
struct WeightedNormRow {
  double delta = 0.0;
  double u_w2 = 0.0;    // ||u||_{W^2_delta}
  double p_w1 = 0.0;    // ||p||_{W^1_delta}
  double eta_w52 = 0.0; // ||eta||_{W^{5/2}_delta} surrogate
};

struct DiagnosticsReport {
  std::vector<StepDiagnostics> steps;
  std::vector<WeightedNormRow> weighted_table;
  double initial_energy_i = 0.0;
  double initial_energy_surface = 0.0;
  DecayFit decay;
  bool decay_fitted = false;
  double max_balance_residual = 0.0;  // max |backward residual|
  double max_centered_residual = 0.0; // max |centered audit residual|
};

/// Fixed CSV column order (shared by the writer, the audit reader, and the
/// plot scripts).
const std::vector<std::string>& diagnostics_columns();

/// Fills the backward balance residuals from the relative-energy series,
/// records the residual maxima, and fits the decay rate of e_parallel when
/// the series is long enough and positive (fit failures leave decay_fitted
/// false rather than throwing).
void finalize_report(DiagnosticsReport& report, double dt);

void write_diagnostics_csv(const DiagnosticsReport& report,
                           const std::string& path);

/// Deterministic JSON summary of the run (final values, residual maxima,
/// decay fit, weighted norm table).
void write_summary_json(const DiagnosticsReport& report, double dt,
                        const std::string& path);

struct SurfaceSnapshot {
  double time = 0.0;
  std::vector<double> x, zeta0, eta;
};

SurfaceSnapshot take_snapshot(const EquilibriumSurface& eq,
                              const SurfaceField& eta, double time);

/// Blocks of time,x1,zeta0,eta,height rows separated by blank lines (gnuplot
/// index-addressable).
void write_snapshots_csv(const std::vector<SurfaceSnapshot>& snaps,
                         const std::string& path);

/// Writes the four gnuplot scripts (energy, log decay, balance residual,
/// surface snapshots) into report_dir. The scripts reference the CSVs by
/// relative path; throws ValidationError naming any missing CSV.
std::vector<std::string> emit_plots(const std::string& report_dir);

} // namespace capstokes
