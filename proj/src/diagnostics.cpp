/// @file diagnostics.cpp
/// @brief Diagnostics report assembly and serialization.

#include "capstokes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "capstokes/csvio.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/timestep.hpp"

namespace capstokes {

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "step",
      "time",
      "mass",
      "mean_correction",
      "drift_pre",
      "energy_i",
      "energy_surface",
      "dissipation_viscous",
      "dissipation_slip",
      "dissipation_contact",
      "w_bracket",
      "balance_residual",
      "e_parallel",
      "d_bar_parallel",
      "d_parallel",
      "d_surrogate",
      "third_order_valid",
      "v_left",
      "v_right",
      "gate_value",
      "newton_iters",
      "lambda_p",
      "lambda_s",
      "rel_residual",
  };
  return cols;
}

namespace {

std::vector<double> row_values(const StepDiagnostics& s) {
  return {static_cast<double>(s.step),
          s.time,
          s.mass,
          s.mean_correction,
          s.drift_pre,
          s.energy_i,
          s.energy_surface,
          s.dissipation_viscous,
          s.dissipation_slip,
          s.dissipation_contact,
          s.w_bracket,
          s.balance_residual,
          s.e_parallel,
          s.d_bar_parallel,
          s.d_parallel,
          s.d_surrogate,
          s.third_order_valid,
          s.v_left,
          s.v_right,
          s.gate_value,
          s.newton_iters,
          s.lambda_p,
          s.lambda_s,
          s.rel_residual};
}

} // namespace

void finalize_report(DiagnosticsReport& report, double dt) {
  const size_t n = report.steps.size();
  report.max_balance_residual = 0.0;
  report.max_centered_residual = 0.0;
  report.decay_fitted = false;
  if (n == 0) return;

  std::vector<double> energies; // relative energy, states 0..N
  std::vector<double> dissipations, brackets;
  energies.reserve(n + 1);
  // E_surf at the start of the run, measured with the same functional as the
  // per-step values so the first backward residual is not polluted by the
  // quadrature mismatch between the full and the relative energy.
  energies.push_back(report.initial_energy_surface);
  for (size_t i = 0; i < n; ++i) {
    energies.push_back(report.steps[i].energy_surface);
    dissipations.push_back(report.steps[i].dissipation_viscous +
                           report.steps[i].dissipation_slip +
                           report.steps[i].dissipation_contact);
    brackets.push_back(report.steps[i].w_bracket);
  }

  for (size_t i = 0; i < n; ++i) {
    const double r =
        (energies[i + 1] - energies[i]) / dt + dissipations[i] + brackets[i];
    report.steps[i].balance_residual = r;
    report.max_balance_residual =
        std::max(report.max_balance_residual, std::abs(r));
  }
  const auto centered =
      energy_audit_residuals(energies, dissipations, brackets, dt);
  for (double r : centered) {
    report.max_centered_residual =
        std::max(report.max_centered_residual, std::abs(r));
  }

  std::vector<double> times, epar;
  times.reserve(n);
  epar.reserve(n);
  for (const auto& s : report.steps) {
    times.push_back(s.time);
    epar.push_back(s.e_parallel);
  }
  const size_t start = n / 5;
  const bool positive = std::all_of(epar.begin() + static_cast<long>(start),
                                    epar.end(), [](double v) { return v > 0; });
  if (n - start >= 10 && positive) {
    report.decay = decay_fit(times, epar);
    report.decay_fitted = true;
  }
}

void write_diagnostics_csv(const DiagnosticsReport& report,
                           const std::string& path) {
  CsvWriter w(path, diagnostics_columns(),
              {"per-step diagnostics: energies, dissipation parts, balance "
               "residual, parallel functionals",
               "balance_residual = (E_surf^n - E_surf^{n-1})/dt + dissipation "
               "+ w_bracket"});
  for (const auto& s : report.steps) w.row(row_values(s));
  w.flush();
}

namespace {

void json_field(std::ostream& out, int indent, const char* name, double v,
                bool comma = true) {
  for (int i = 0; i < indent; ++i) out << ' ';
  out << '"' << name << "\": " << format_double(v);
  if (comma) out << ',';
  out << '\n';
}

} // namespace

void write_summary_json(const DiagnosticsReport& report, double dt,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open summary output file: " + path);
  const size_t n = report.steps.size();
  out << "{\n";
  json_field(out, 2, "steps", static_cast<double>(n));
  json_field(out, 2, "dt", dt);
  json_field(out, 2, "t_end", n ? report.steps.back().time : 0.0);
  json_field(out, 2, "initial_energy_i", report.initial_energy_i);
  json_field(out, 2, "final_energy_i",
             n ? report.steps.back().energy_i : report.initial_energy_i);
  json_field(out, 2, "initial_energy_surface", report.initial_energy_surface);
  json_field(out, 2, "final_energy_surface",
             n ? report.steps.back().energy_surface
               : report.initial_energy_surface);
  json_field(out, 2, "final_mass", n ? report.steps.back().mass : 0.0);
  json_field(out, 2, "final_e_parallel", n ? report.steps.back().e_parallel : 0.0);
  json_field(out, 2, "max_balance_residual", report.max_balance_residual);
  json_field(out, 2, "max_centered_residual", report.max_centered_residual);
  out << "  \"third_order_flagged\": "
      << ((n && report.steps.back().third_order_valid > 0.0) ? "true" : "false")
      << ",\n";
  out << "  \"decay_fit\": {\n";
  out << "    \"fitted\": " << (report.decay_fitted ? "true" : "false")
      << ",\n";
  json_field(out, 4, "lambda", report.decay_fitted ? report.decay.lambda : 0.0);
  json_field(out, 4, "r_squared",
             report.decay_fitted ? report.decay.r_squared : 0.0);
  json_field(out, 4, "n_used",
             static_cast<double>(report.decay_fitted ? report.decay.n_used : 0),
             false);
  out << "  },\n";
  out << "  \"weighted_norms\": [";
  for (size_t i = 0; i < report.weighted_table.size(); ++i) {
    const auto& r = report.weighted_table[i];
    out << (i ? ",\n" : "\n");
    out << "    {\"delta\": " << format_double(r.delta)
        << ", \"u_w2\": " << format_double(r.u_w2)
        << ", \"p_w1\": " << format_double(r.p_w1)
        << ", \"eta_w52\": " << format_double(r.eta_w52) << "}";
  }
  out << (report.weighted_table.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
}

SurfaceSnapshot take_snapshot(const EquilibriumSurface& eq,
                              const SurfaceField& eta, double time) {
  SurfaceSnapshot s;
  s.time = time;
  const int n = eta.n();
  s.x.resize(n + 1);
  s.zeta0.resize(n + 1);
  s.eta = eta.samples();
  for (int j = 0; j <= n; ++j) {
    s.x[j] = eta.grid_x(j);
    s.zeta0[j] = eq.zeta0_at(s.x[j]);
  }
  return s;
}

void write_snapshots_csv(const std::vector<SurfaceSnapshot>& snaps,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open snapshots output file: " + path);
  out << "# surface snapshots; blocks separated by blank lines (one per time)\n";
  out << "time,x1,zeta0,eta,height\n";
  for (size_t b = 0; b < snaps.size(); ++b) {
    const auto& s = snaps[b];
    if (b) out << "\n";
    out << "# t = " << format_double(s.time) << "\n";
    for (size_t j = 0; j < s.x.size(); ++j) {
      out << format_double(s.time) << ',' << format_double(s.x[j]) << ','
          << format_double(s.zeta0[j]) << ',' << format_double(s.eta[j]) << ','
          << format_double(s.zeta0[j] + s.eta[j]) << "\n";
    }
  }
}

namespace {

int column_number(const std::string& name) {
  const auto& cols = diagnostics_columns();
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == name) return static_cast<int>(i) + 1; // gnuplot is 1-based
  }
  throw ValidationError("unknown diagnostics column: " + name);
}

void write_script(const std::string& dir, const std::string& name,
                  const std::string& body, std::vector<std::string>& written) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open plot script for writing: " + path);
  out << "# gnuplot script; run from this directory\n";
  out << "set datafile separator ','\n";
  out << "set grid\n";
  out << body;
  written.push_back(path);
}

} // namespace

std::vector<std::string> emit_plots(const std::string& report_dir) {
  namespace fs = std::filesystem;
  const std::string diag = report_dir + "/diagnostics.csv";
  const std::string snap = report_dir + "/snapshots.csv";
  if (!fs::exists(diag)) {
    throw ValidationError("missing CSV required for plots: " + diag);
  }
  if (!fs::exists(snap)) {
    throw ValidationError("missing CSV required for plots: " + snap);
  }
  const int c_time = column_number("time");
  const int c_energy = column_number("energy_i");
  const int c_epar = column_number("e_parallel");
  const int c_res = column_number("balance_residual");

  std::vector<std::string> written;
  {
    std::string b;
    b += "set terminal pngcairo size 960,640\n";
    b += "set output 'energy.png'\n";
    b += "set xlabel 'time'\n";
    b += "set ylabel 'interface energy'\n";
    b += "plot 'diagnostics.csv' using " + std::to_string(c_time) + ":" +
         std::to_string(c_energy) + " with lines title 'I(t)'\n";
    write_script(report_dir, "plot_energy.gp", b, written);
  }
  {
    std::string b;
    b += "set terminal pngcairo size 960,640\n";
    b += "set output 'decay.png'\n";
    b += "set xlabel 'time'\n";
    b += "set ylabel 'E_parallel'\n";
    b += "set logscale y\n";
    b += "plot 'diagnostics.csv' using " + std::to_string(c_time) + ":" +
         std::to_string(c_epar) + " with lines title 'E_{par}(t)'\n";
    write_script(report_dir, "plot_decay.gp", b, written);
  }
  {
    std::string b;
    b += "set terminal pngcairo size 960,640\n";
    b += "set output 'residual.png'\n";
    b += "set xlabel 'time'\n";
    b += "set ylabel 'energy balance residual'\n";
    b += "plot 'diagnostics.csv' using " + std::to_string(c_time) + ":" +
         std::to_string(c_res) + " with lines title 'residual(t)'\n";
    write_script(report_dir, "plot_residual.gp", b, written);
  }
  {
    std::string b;
    b += "set terminal pngcairo size 960,640\n";
    b += "set output 'snapshots.png'\n";
    b += "set xlabel 'x1'\n";
    b += "set ylabel 'surface height'\n";
    b += "stats 'snapshots.csv' using 1 nooutput\n";
    b += "plot for [i=0:STATS_blocks-1] 'snapshots.csv' index i using 2:5 "
         "with lines title sprintf('block %d', i)\n";
    write_script(report_dir, "plot_snapshots.gp", b, written);
  }
  return written;
}

} // namespace capstokes
