/// @file config.hpp
/// @brief Scenario configuration: INI-style text file with [params],
///        [initial], [mesh], [stepping], [diagnostics] sections. Parse errors
///        carry file:line anchors; the canonical writer round-trips stably.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capstokes/params.hpp"
#include "capstokes/surface_modes.hpp"

namespace capstokes {

/// Initial surface perturbation: either a cosine mode list (k, amplitude) or
/// a two-column x,eta CSV profile resampled onto the uniform grid. The loaded
/// field is projected to zero mean and the removed mean is reported.
struct InitialBlock {
  std::vector<std::pair<int, double>> modes;
  std::string profile_csv;
};

struct MeshBlock {
  int n_surface = 32;
  int n_depth = 0; // 0 derives from the aspect ratio
  double depth = 1.0;
  int grading = 0;
  int eta_grid = 128;
};

struct SteppingBlock {
  double dt = 1e-2;
  double t_end = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 10;
  bool picard_curvature = false;
};

struct DiagnosticsBlock {
  std::vector<double> deltas{0.75};
  int snapshot_every = 0;   // 0 picks ~10 snapshots over the run
  int checkpoint_every = 0; // 0 writes only the final checkpoint
  std::string out_dir;      // overridden by --out-dir when given
};

struct ScenarioConfig {
  PhysicalParams params;
  std::string response_csv; // source of a tabulated response (resolved path)
  InitialBlock initial;
  MeshBlock mesh;
  SteppingBlock stepping;
  DiagnosticsBlock diagnostics;
};

/// Parses a scenario file. Unknown sections/keys, malformed values, and
/// violated parameter bounds throw ValidationError with "path:line:" anchors.
/// Relative response/profile CSV paths resolve against the config directory.
ScenarioConfig load_config(const std::string& path);

/// Canonical text form: fixed section and key order, shortest round-trip
/// number formatting. load(write(cfg)) reproduces write(cfg) byte for byte.
std::string canonical_config(const ScenarioConfig& cfg);

/// Builds the initial perturbation on the uniform grid (zero mean enforced).
/// The removed mean is written to *correction when non-null.
SurfaceField build_initial_eta(const ScenarioConfig& cfg,
                               double* correction = nullptr);

} // namespace capstokes
