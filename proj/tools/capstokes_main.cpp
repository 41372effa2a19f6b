/// @file capstokes_main.cpp
/// @brief Command line entry point: equilibrium / simulate / audit /
///        probe-corner subcommands over a scenario config file.

#include "CLI11.hpp"

#include <iostream>
#include <string>

#include "capstokes/config.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/runner.hpp"

namespace {

std::string effective_out_dir(const std::string& flag_dir,
                              const std::string& cfg_dir) {
  if (!flag_dir.empty()) return flag_dir;
  if (!cfg_dir.empty()) return cfg_dir;
  return ".";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous capillary vessel simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume_path;
  int threads = 1;

  auto* cmd_eq = app.add_subcommand(
      "equilibrium", "Solve the equilibrium surface and export the profile");
  cmd_eq->add_option("--config", config_path, "Scenario config file")
      ->required();
  cmd_eq->add_option("--out-dir", out_dir, "Output directory");

  auto* cmd_sim = app.add_subcommand(
      "simulate", "Run the time loop with per-step diagnostics");
  cmd_sim->add_option("--config", config_path, "Scenario config file")
      ->required();
  cmd_sim->add_option("--out-dir", out_dir, "Output directory");
  cmd_sim->add_option("--resume", resume_path,
                      "Checkpoint file to continue from");
  cmd_sim->add_option("--threads", threads,
                      "Linear algebra worker threads "
                      "(CAPSTOKES_THREADS overrides)");

  auto* cmd_audit = app.add_subcommand(
      "audit", "Recompute energy-balance residuals from diagnostics.csv");
  cmd_audit->add_option("--out-dir", out_dir,
                        "Directory holding diagnostics.csv");

  auto* cmd_probe = app.add_subcommand(
      "probe-corner", "Weighted corner norms across refinement levels");
  cmd_probe->add_option("--config", config_path, "Scenario config file")
      ->required();
  cmd_probe->add_option("--out-dir", out_dir, "Output directory");
  cmd_probe->add_option("--threads", threads,
                        "Linear algebra worker threads "
                        "(CAPSTOKES_THREADS overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2; // malformed command line is a validation error
  }

  try {
    const int nthreads = capstokes::apply_thread_count(threads);
    std::cout << "threads = " << nthreads << "\n";
    if (cmd_eq->parsed()) {
      const auto cfg = capstokes::load_config(config_path);
      capstokes::run_equilibrium(
          cfg, effective_out_dir(out_dir, cfg.diagnostics.out_dir));
    } else if (cmd_sim->parsed()) {
      const auto cfg = capstokes::load_config(config_path);
      capstokes::run_simulate(
          cfg, effective_out_dir(out_dir, cfg.diagnostics.out_dir),
          resume_path);
    } else if (cmd_audit->parsed()) {
      capstokes::run_audit(effective_out_dir(out_dir, ""));
    } else if (cmd_probe->parsed()) {
      const auto cfg = capstokes::load_config(config_path);
      capstokes::run_probe_corner(
          cfg, effective_out_dir(out_dir, cfg.diagnostics.out_dir));
    }
  } catch (const capstokes::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const capstokes::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
