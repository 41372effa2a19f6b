/// @file runner.hpp
/// @brief Subcommand implementations behind the CLI: equilibrium export,
///        simulation runs with diagnostics, energy audits, corner probes.
///        All throw ValidationError (CLI exit 2) or SolverError (exit 3).

#pragma once

#include <string>

#include "capstokes/config.hpp"

namespace capstokes {

/// Effective worker count: CAPSTOKES_THREADS (when set to a positive integer)
/// wins over the flag; nonpositive values fall back to 1. Applies the count
/// to Eigen's internal parallelism and returns it.
int apply_thread_count(int flag_value);

/// Profile CSV (equilibrium.csv) plus a residual/angle report
/// (equilibrium_report.json) in out_dir.
void run_equilibrium(const ScenarioConfig& cfg, const std::string& out_dir);

/// Time loop with per-step diagnostics: diagnostics.csv, summary.json,
/// snapshots.csv, checkpoints, and the gnuplot scripts in out_dir. A
/// nonempty resume_checkpoint continues that state to t_end.
void run_simulate(const ScenarioConfig& cfg, const std::string& out_dir,
                  const std::string& resume_checkpoint);

/// Recomputes energy-balance residuals from out_dir/diagnostics.csv and
/// writes audit.csv alongside it.
void run_audit(const std::string& out_dir);

/// Weighted second-derivative norms on corner patches across refinement
/// levels; writes probe.csv in out_dir.
void run_probe_corner(const ScenarioConfig& cfg, const std::string& out_dir);

} // namespace capstokes
