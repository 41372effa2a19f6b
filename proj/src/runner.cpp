/// @file runner.cpp
/// @brief CLI subcommand bodies: wiring config -> equilibrium -> mesh ->
///        time loop -> reports.

#include "capstokes/runner.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "capstokes/csvio.hpp"
#include "capstokes/diagnostics.hpp"
#include "capstokes/equilibrium.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/geometry.hpp"
#include "capstokes/kernels.hpp"
#include "capstokes/mesh.hpp"
#include "capstokes/norms.hpp"
#include "capstokes/timestep.hpp"

namespace capstokes {

namespace fs = std::filesystem;

int apply_thread_count(int flag_value) {
  int n = flag_value;
  if (const char* env = std::getenv("CAPSTOKES_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<int>(v);
  }
  if (n < 1) n = 1;
  Eigen::setNbThreads(n);
  return n;
}

namespace {

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory: " + out_dir + " (" +
                          ec.message() + ")");
  }
}

std::string checkpoint_name(int step) {
  std::ostringstream os;
  os << "checkpoint_" << std::setw(6) << std::setfill('0') << step << ".txt";
  return os.str();
}

} // namespace

void run_equilibrium(const ScenarioConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const EquilibriumSurface eq = build_equilibrium(cfg.params);
  const EquilibriumResidual res = equilibrium_residual(eq);

  {
    std::ofstream out(out_dir + "/equilibrium.csv", std::ios::binary);
    if (!out) {
      throw ValidationError("cannot open profile output: " + out_dir +
                            "/equilibrium.csv");
    }
    export_equilibrium_csv(eq, out);
  }
  {
    std::ofstream out(out_dir + "/equilibrium_report.json", std::ios::binary);
    if (!out) {
      throw ValidationError("cannot open report output: " + out_dir +
                            "/equilibrium_report.json");
    }
    const double young = std::cos(eq.theta_eq) +
                         cfg.params.gamma_jump / cfg.params.sigma;
    out << "{\n";
    out << "  \"flat\": " << (eq.flat ? "true" : "false") << ",\n";
    out << "  \"c_const\": " << format_double(eq.c_const) << ",\n";
    out << "  \"p0\": " << format_double(eq.p0) << ",\n";
    out << "  \"m_min\": " << format_double(eq.m_min) << ",\n";
    out << "  \"min_zeta0\": " << format_double(eq.min_zeta0) << ",\n";
    out << "  \"omega\": " << format_double(eq.omega) << ",\n";
    out << "  \"theta_eq\": " << format_double(eq.theta_eq) << ",\n";
    out << "  \"delta_omega\": " << format_double(eq.delta_omega) << ",\n";
    out << "  \"young_residual\": " << format_double(young) << ",\n";
    out << "  \"ode_res\": " << format_double(res.ode_res) << ",\n";
    out << "  \"bc_res\": " << format_double(res.bc_res) << ",\n";
    out << "  \"mass_res\": " << format_double(res.mass_res) << "\n";
    out << "}\n";
  }
  std::cout << "equilibrium: " << (eq.flat ? "flat" : "curved")
            << " profile, theta_eq = " << format_double(eq.theta_eq)
            << ", delta_omega = " << format_double(eq.delta_omega) << "\n";
  std::cout << "residuals: ode = " << format_double(res.ode_res)
            << ", bc = " << format_double(res.bc_res)
            << ", mass = " << format_double(res.mass_res) << "\n";
}

void run_simulate(const ScenarioConfig& cfg, const std::string& out_dir,
                  const std::string& resume_checkpoint) {
  ensure_out_dir(out_dir);
  const EquilibriumSurface eq = build_equilibrium(cfg.params);
  MeshConfig mc;
  mc.n_surface = cfg.mesh.n_surface;
  mc.n_depth = cfg.mesh.n_depth;
  mc.depth = cfg.mesh.depth;
  mc.grading = cfg.mesh.grading;
  const Mesh mesh = build_mesh(eq, mc);
  const AssemblyCache cache = build_assembly_cache(mesh, eq, cfg.mesh.eta_grid);
  const auto node_cache = equilibrium_node_cache(eq, mesh);
  const WHat what(cfg.params.response);
  const double kappa = kappa_of(cfg.params.response);

  SimulationState state;
  double mean_corr0 = 0.0;
  if (!resume_checkpoint.empty()) {
    std::ifstream in(resume_checkpoint, std::ios::binary);
    if (!in) {
      throw ValidationError("cannot open checkpoint: " + resume_checkpoint);
    }
    state = read_checkpoint(in);
    if (std::abs(state.eta.ell() - cfg.params.ell) > 1e-12) {
      throw ValidationError(
          "checkpoint half-width does not match the config ell");
    }
    if (state.eta.n() != cfg.mesh.eta_grid) {
      throw ValidationError(
          "checkpoint eta grid does not match the config eta_grid");
    }
  } else {
    state = make_initial_state(build_initial_eta(cfg, &mean_corr0));
  }

  StepOptions opts;
  opts.dt = cfg.stepping.dt;
  opts.newton_tol = cfg.stepping.newton_tol;
  opts.newton_max_iter = cfg.stepping.newton_max_iter;
  opts.picard_curvature = cfg.stepping.picard_curvature;

  const double remaining = cfg.stepping.t_end - state.time;
  const int n_steps =
      remaining > 0.5 * opts.dt
          ? static_cast<int>(std::llround(remaining / opts.dt))
          : 0;

  std::cout << "simulate: steps = " << n_steps
            << ", dt = " << format_double(opts.dt)
            << ", elements = " << mesh.tris.size()
            << ", eta grid = " << cfg.mesh.eta_grid << "\n";
  if (resume_checkpoint.empty()) {
    std::cout << "initial zero-mean correction = " << format_double(mean_corr0)
              << "\n";
  } else {
    std::cout << "resumed at step " << state.step
              << ", t = " << format_double(state.time) << "\n";
  }

  DiagnosticsReport report;
  report.initial_energy_i = full_energy(cache, cfg.params, state.eta);
  report.initial_energy_surface = surface_energy(cache, cfg.params, state.eta);

  std::vector<SurfaceSnapshot> snaps;
  const int snap_every = cfg.diagnostics.snapshot_every > 0
                             ? cfg.diagnostics.snapshot_every
                             : std::max(1, n_steps / 10);
  snaps.push_back(take_snapshot(eq, state.eta, state.time));

  const double delta0 =
      cfg.diagnostics.deltas.empty() ? 0.75 : cfg.diagnostics.deltas.front();

  for (int i = 1; i <= n_steps; ++i) {
    const StepReport rep =
        advance(state, cache, node_cache, eq, cfg.params, what, opts);
    StepDiagnostics row;
    row.step = state.step;
    row.time = state.time;
    row.mass = state.eta.mass();
    row.mean_correction = rep.mean_correction;
    row.drift_pre = rep.drift_pre;
    row.energy_i = rep.energy_full;
    row.energy_surface = rep.energy_surface;
    row.dissipation_viscous = rep.dissipation.viscous;
    row.dissipation_slip = rep.dissipation.slip;
    row.dissipation_contact = rep.dissipation.contact;
    row.w_bracket = rep.w_bracket;
    const EdFunctionals ed =
        ed_functionals(cache, state, opts.dt, kappa, delta0);
    row.e_parallel = ed.e_parallel;
    row.d_bar_parallel = ed.d_bar_parallel;
    row.d_parallel = ed.d_parallel;
    row.d_surrogate = ed.d_full;
    row.third_order_valid = ed.third_order_valid ? 1.0 : 0.0;
    row.v_left = rep.contact_velocity[0];
    row.v_right = rep.contact_velocity[1];
    row.gate_value = rep.gate_value;
    row.newton_iters = rep.newton_iters;
    row.lambda_p = rep.lambda_p;
    row.lambda_s = rep.lambda_s;
    row.rel_residual = rep.rel_residual;
    report.steps.push_back(row);

    if (i % snap_every == 0 || i == n_steps) {
      snaps.push_back(take_snapshot(eq, state.eta, state.time));
    }
    if (cfg.diagnostics.checkpoint_every > 0 &&
        i % cfg.diagnostics.checkpoint_every == 0 && i != n_steps) {
      std::ofstream out(out_dir + "/" + checkpoint_name(state.step),
                        std::ios::binary);
      if (!out) throw ValidationError("cannot write checkpoint in " + out_dir);
      write_checkpoint(out, state);
    }
  }

  {
    std::ofstream out(out_dir + "/checkpoint_final.txt", std::ios::binary);
    if (!out) throw ValidationError("cannot write checkpoint in " + out_dir);
    write_checkpoint(out, state);
  }

  if (state.u.size() == 2 * static_cast<Eigen::Index>(mesh.n_p2_nodes())) {
    const HessianField hf = recover_hessian_p2(mesh, state.u, 2);
    for (double d : cfg.diagnostics.deltas) {
      WeightedNormRow r;
      r.delta = d;
      WeightedNormSpec w2{2, d, default_corners(mesh)};
      WeightedNormSpec w1{1, d, default_corners(mesh)};
      r.u_w2 = weighted_norm_p2(mesh, state.u, 2, w2, &hf);
      r.p_w1 = weighted_norm_p1(mesh, state.p, w1);
      r.eta_w52 = std::sqrt(
          weighted_interval_52_sq(state.eta.samples(), state.eta.ell(), d));
      report.weighted_table.push_back(r);
    }
  }

  finalize_report(report, opts.dt);
  write_diagnostics_csv(report, out_dir + "/diagnostics.csv");
  write_summary_json(report, opts.dt, out_dir + "/summary.json");
  write_snapshots_csv(snaps, out_dir + "/snapshots.csv");
  emit_plots(out_dir);

  std::cout << "final energy I = "
            << format_double(report.steps.empty()
                                 ? report.initial_energy_i
                                 : report.steps.back().energy_i)
            << ", max |balance residual| = "
            << format_double(report.max_balance_residual) << "\n";
  if (report.decay_fitted) {
    std::cout << "decay fit: lambda = " << format_double(report.decay.lambda)
              << ", r_squared = " << format_double(report.decay.r_squared)
              << "\n";
  } else {
    std::cout << "decay fit: not fitted (series too short or nonpositive)\n";
  }
}

void run_audit(const std::string& out_dir) {
  const std::string path = out_dir + "/diagnostics.csv";
  const CsvTable t = read_csv(path);
  const auto time = t.column("time");
  const auto esurf = t.column("energy_surface");
  const auto dv = t.column("dissipation_viscous");
  const auto ds = t.column("dissipation_slip");
  const auto dc = t.column("dissipation_contact");
  const auto wb = t.column("w_bracket");
  const auto stored = t.column("balance_residual");
  const auto step = t.column("step");
  const size_t n = time.size();
  if (n < 2) {
    throw ValidationError("audit needs at least 2 diagnostics rows in " + path);
  }

  CsvWriter w(out_dir + "/audit.csv",
              {"step", "time", "backward_residual", "centered_residual",
               "centered_valid", "stored_minus_recomputed"},
              {"energy-balance residuals recomputed from diagnostics.csv",
               "centered_valid = 0 rows repeat the backward value"});
  double max_back = 0.0, max_cent = 0.0, max_diff = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const double dt = time[i] - time[i - 1];
    if (!(dt > 0.0)) {
      throw ValidationError("audit: nonincreasing time column in " + path);
    }
    const double diss = dv[i] + ds[i] + dc[i] + wb[i];
    const double back = (esurf[i] - esurf[i - 1]) / dt + diss;
    double cent = back;
    bool cent_valid = false;
    if (i + 1 < n) {
      const double dt2 = time[i + 1] - time[i - 1];
      const double diss_next = dv[i + 1] + ds[i + 1] + dc[i + 1] + wb[i + 1];
      cent = (esurf[i + 1] - esurf[i - 1]) / dt2 + 0.5 * (diss + diss_next);
      cent_valid = true;
      max_cent = std::max(max_cent, std::abs(cent));
    }
    const double diff = back - stored[i];
    max_back = std::max(max_back, std::abs(back));
    max_diff = std::max(max_diff, std::abs(diff));
    w.row({step[i], time[i], back, cent, cent_valid ? 1.0 : 0.0, diff});
  }
  w.flush();
  std::cout << "audit: rows = " << (n - 1)
            << ", max |backward residual| = " << format_double(max_back)
            << ", max |centered residual| = " << format_double(max_cent)
            << "\n";
  std::cout << "audit: max |stored - recomputed| = " << format_double(max_diff)
            << "\n";
}

void run_probe_corner(const ScenarioConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const EquilibriumSurface eq = build_equilibrium(cfg.params);

  CornerProbeConfig pc;
  pc.base_n = cfg.mesh.n_surface;
  pc.levels = 4;
  pc.depth = cfg.mesh.depth;
  pc.eta_grid = cfg.mesh.eta_grid;
  pc.dt = cfg.stepping.dt;
  pc.deltas = cfg.diagnostics.deltas;
  // Always include the pair straddling the critical weight.
  const double hi = std::min(0.95, eq.delta_omega + 0.2);
  pc.deltas.push_back(hi);
  if (eq.delta_omega > 0.2) {
    pc.deltas.push_back(std::max(0.05, eq.delta_omega - 0.2));
  }
  std::sort(pc.deltas.begin(), pc.deltas.end());
  pc.deltas.erase(std::unique(pc.deltas.begin(), pc.deltas.end(),
                              [](double a, double b) {
                                return std::abs(a - b) < 1e-12;
                              }),
                  pc.deltas.end());

  const auto rows = corner_probe(cfg.params, eq, pc);

  CsvWriter w(out_dir + "/probe.csv",
              {"level", "n_surface", "delta", "value", "ratio"},
              {"weighted second-derivative norms on corner patches",
               "ratio = value(level) / value(level - 1), 1 at level 0",
               "critical weight delta_omega = " +
                   format_double(eq.delta_omega)});
  std::cout << "corner probe: delta_omega = " << format_double(eq.delta_omega)
            << "\n";
  for (const auto& r : rows) {
    double ratio = 1.0;
    for (const auto& prev : rows) {
      if (prev.level == r.level - 1 &&
          std::abs(prev.delta - r.delta) < 1e-12 && prev.value > 0.0) {
        ratio = r.value / prev.value;
      }
    }
    w.row({static_cast<double>(r.level), static_cast<double>(r.n_surface),
           r.delta, r.value, ratio});
    std::cout << "level " << r.level << " n = " << r.n_surface
              << " delta = " << format_double(r.delta)
              << " value = " << format_double(r.value)
              << " ratio = " << format_double(ratio) << "\n";
  }
  w.flush();
}

} // namespace capstokes
