/// @file config.cpp
/// @brief Scenario file parsing and canonical serialization.

#include "capstokes/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "capstokes/csvio.hpp"
#include "capstokes/errors.hpp"

namespace capstokes {

namespace {

struct ParseCursor {
  std::string path;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const ParseCursor& at, const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    at.fail("expected a number, got '" + s + "'");
  }
  return v;
}

int parse_int(const ParseCursor& at, const std::string& s) {
  int v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    at.fail("expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const ParseCursor& at, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  at.fail("expected true/false, got '" + s + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string resolve_relative(const std::string& config_path,
                             const std::string& value) {
  namespace fs = std::filesystem;
  fs::path p(value);
  if (p.is_absolute()) return value;
  return (fs::path(config_path).parent_path() / p).string();
}

} // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);

  ScenarioConfig cfg;
  // Response parameters are gathered first and assembled once the section
  // ends, so key order inside [params] does not matter.
  std::string response_kind = "linear";
  double kappa0 = 1.0, resp_a = 1.0, resp_b = 1.0;
  std::string response_csv;
  bool deltas_set = false;

  ParseCursor at{path, 0};
  std::string section;
  std::string line;
  while (std::getline(in, line)) {
    ++at.line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "params" && section != "initial" && section != "mesh" &&
          section != "stepping" && section != "diagnostics") {
        at.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for key '" + key + "'");
    if (section.empty()) at.fail("key '" + key + "' outside any section");

    if (section == "params") {
      if (key == "g") cfg.params.g = parse_double(at, value);
      else if (key == "sigma") cfg.params.sigma = parse_double(at, value);
      else if (key == "mu") cfg.params.mu = parse_double(at, value);
      else if (key == "beta") cfg.params.beta = parse_double(at, value);
      else if (key == "gamma_jump") cfg.params.gamma_jump = parse_double(at, value);
      else if (key == "ell") cfg.params.ell = parse_double(at, value);
      else if (key == "wall_height") cfg.params.wall_height = parse_double(at, value);
      else if (key == "m_top") cfg.params.m_top = parse_double(at, value);
      else if (key == "response") {
        if (value != "linear" && value != "sinh" && value != "tabulated") {
          at.fail("response must be linear, sinh, or tabulated");
        }
        response_kind = value;
      } else if (key == "kappa0") kappa0 = parse_double(at, value);
      else if (key == "A") resp_a = parse_double(at, value);
      else if (key == "B") resp_b = parse_double(at, value);
      else if (key == "response_csv") response_csv = resolve_relative(path, value);
      else at.fail("unknown key '" + key + "' in [params]");
    } else if (section == "initial") {
      if (key == "mode") {
        const auto toks = split_ws(value);
        if (toks.size() != 2) at.fail("mode expects 'k amplitude'");
        const int k = parse_int(at, toks[0]);
        if (k < 1) at.fail("mode index must be >= 1");
        cfg.initial.modes.emplace_back(k, parse_double(at, toks[1]));
      } else if (key == "profile_csv") {
        cfg.initial.profile_csv = resolve_relative(path, value);
      } else {
        at.fail("unknown key '" + key + "' in [initial]");
      }
    } else if (section == "mesh") {
      if (key == "n_surface") cfg.mesh.n_surface = parse_int(at, value);
      else if (key == "n_depth") cfg.mesh.n_depth = parse_int(at, value);
      else if (key == "depth") cfg.mesh.depth = parse_double(at, value);
      else if (key == "grading") cfg.mesh.grading = parse_int(at, value);
      else if (key == "eta_grid") cfg.mesh.eta_grid = parse_int(at, value);
      else at.fail("unknown key '" + key + "' in [mesh]");
    } else if (section == "stepping") {
      if (key == "dt") cfg.stepping.dt = parse_double(at, value);
      else if (key == "t_end") cfg.stepping.t_end = parse_double(at, value);
      else if (key == "newton_tol") cfg.stepping.newton_tol = parse_double(at, value);
      else if (key == "newton_max_iter") cfg.stepping.newton_max_iter = parse_int(at, value);
      else if (key == "picard_curvature") cfg.stepping.picard_curvature = parse_bool(at, value);
      else at.fail("unknown key '" + key + "' in [stepping]");
    } else { // diagnostics
      if (key == "delta") {
        cfg.diagnostics.deltas.clear();
        for (const auto& tok : split_ws(value)) {
          cfg.diagnostics.deltas.push_back(parse_double(at, tok));
        }
        deltas_set = true;
      } else if (key == "snapshot_every") {
        cfg.diagnostics.snapshot_every = parse_int(at, value);
      } else if (key == "checkpoint_every") {
        cfg.diagnostics.checkpoint_every = parse_int(at, value);
      } else if (key == "out_dir") {
        cfg.diagnostics.out_dir = value;
      } else {
        at.fail("unknown key '" + key + "' in [diagnostics]");
      }
    }
  }

  if (response_kind == "linear") {
    cfg.params.response = ResponseFunction::linear(kappa0);
  } else if (response_kind == "sinh") {
    cfg.params.response = ResponseFunction::sinh_law(resp_a, resp_b);
  } else {
    if (response_csv.empty()) {
      throw ValidationError(path + ": tabulated response requires response_csv");
    }
    cfg.params.response = ResponseFunction::from_csv(response_csv);
    cfg.response_csv = response_csv;
  }

  if (!cfg.initial.modes.empty() && !cfg.initial.profile_csv.empty()) {
    throw ValidationError(
        path + ": [initial] specifies both a mode list and a profile CSV");
  }
  if (deltas_set) {
    for (double d : cfg.diagnostics.deltas) {
      if (!(d > 0.0) || !(d < 1.0)) {
        throw ValidationError(path +
                              ": diagnostics delta values must lie in (0, 1)");
      }
    }
  }
  if (cfg.mesh.n_surface < 2) {
    throw ValidationError(path + ": mesh n_surface must be >= 2");
  }
  if (cfg.mesh.eta_grid < 8) {
    throw ValidationError(path + ": mesh eta_grid must be >= 8");
  }
  if (!(cfg.stepping.dt > 0.0)) {
    throw ValidationError(path + ": stepping dt must be positive");
  }
  if (!(cfg.stepping.t_end >= 0.0)) {
    throw ValidationError(path + ": stepping t_end must be nonnegative");
  }
  try {
    cfg.params.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return cfg;
}

std::string canonical_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[params]\n";
  out << "g = " << format_double(cfg.params.g) << "\n";
  out << "sigma = " << format_double(cfg.params.sigma) << "\n";
  out << "mu = " << format_double(cfg.params.mu) << "\n";
  out << "beta = " << format_double(cfg.params.beta) << "\n";
  out << "gamma_jump = " << format_double(cfg.params.gamma_jump) << "\n";
  out << "ell = " << format_double(cfg.params.ell) << "\n";
  out << "wall_height = " << format_double(cfg.params.wall_height) << "\n";
  out << "m_top = " << format_double(cfg.params.m_top) << "\n";
  switch (cfg.params.response.kind) {
    case ResponseKind::Linear:
      out << "response = linear\n";
      out << "kappa0 = " << format_double(cfg.params.response.kappa0) << "\n";
      break;
    case ResponseKind::Sinh:
      out << "response = sinh\n";
      out << "A = " << format_double(cfg.params.response.A) << "\n";
      out << "B = " << format_double(cfg.params.response.B) << "\n";
      break;
    case ResponseKind::Tabulated:
      out << "response = tabulated\n";
      out << "response_csv = " << cfg.response_csv << "\n";
      break;
  }
  out << "\n[initial]\n";
  for (const auto& [k, amp] : cfg.initial.modes) {
    out << "mode = " << k << " " << format_double(amp) << "\n";
  }
  if (!cfg.initial.profile_csv.empty()) {
    out << "profile_csv = " << cfg.initial.profile_csv << "\n";
  }
  out << "\n[mesh]\n";
  out << "n_surface = " << cfg.mesh.n_surface << "\n";
  out << "n_depth = " << cfg.mesh.n_depth << "\n";
  out << "depth = " << format_double(cfg.mesh.depth) << "\n";
  out << "grading = " << cfg.mesh.grading << "\n";
  out << "eta_grid = " << cfg.mesh.eta_grid << "\n";
  out << "\n[stepping]\n";
  out << "dt = " << format_double(cfg.stepping.dt) << "\n";
  out << "t_end = " << format_double(cfg.stepping.t_end) << "\n";
  out << "newton_tol = " << format_double(cfg.stepping.newton_tol) << "\n";
  out << "newton_max_iter = " << cfg.stepping.newton_max_iter << "\n";
  out << "picard_curvature = " << (cfg.stepping.picard_curvature ? "true" : "false") << "\n";
  out << "\n[diagnostics]\n";
  out << "delta =";
  for (double d : cfg.diagnostics.deltas) out << " " << format_double(d);
  out << "\n";
  out << "snapshot_every = " << cfg.diagnostics.snapshot_every << "\n";
  out << "checkpoint_every = " << cfg.diagnostics.checkpoint_every << "\n";
  if (!cfg.diagnostics.out_dir.empty()) {
    out << "out_dir = " << cfg.diagnostics.out_dir << "\n";
  }
  return out.str();
}

SurfaceField build_initial_eta(const ScenarioConfig& cfg, double* correction) {
  SurfaceField eta(cfg.params.ell, cfg.mesh.eta_grid);
  auto& s = eta.mutable_samples();
  if (!cfg.initial.profile_csv.empty()) {
    const CsvTable t = read_csv(cfg.initial.profile_csv);
    int cx = t.column_index("x");
    int ce = t.column_index("eta");
    if (cx < 0 || ce < 0) {
      // Headerless two-column files use positional columns.
      if (t.columns.empty() && !t.rows.empty() && t.rows[0].size() >= 2) {
        cx = 0;
        ce = 1;
      } else {
        throw ValidationError("profile CSV needs columns x and eta: " +
                              cfg.initial.profile_csv);
      }
    }
    std::vector<std::pair<double, double>> pts;
    pts.reserve(t.rows.size());
    for (const auto& r : t.rows) {
      pts.emplace_back(r[static_cast<size_t>(cx)], r[static_cast<size_t>(ce)]);
    }
    std::sort(pts.begin(), pts.end());
    if (pts.size() < 2) {
      throw ValidationError("profile CSV needs at least 2 rows: " +
                            cfg.initial.profile_csv);
    }
    const double tol = 1e-9 * cfg.params.ell;
    if (pts.front().first > -cfg.params.ell + tol ||
        pts.back().first < cfg.params.ell - tol) {
      throw ValidationError("profile CSV does not cover [-ell, ell]: " +
                            cfg.initial.profile_csv);
    }
    for (int j = 0; j <= eta.n(); ++j) {
      const double x = eta.grid_x(j);
      auto hi = std::lower_bound(
          pts.begin(), pts.end(), x,
          [](const std::pair<double, double>& p, double v) { return p.first < v; });
      if (hi == pts.begin()) {
        s[j] = pts.front().second;
        continue;
      }
      if (hi == pts.end()) {
        s[j] = pts.back().second;
        continue;
      }
      const auto lo = hi - 1;
      const double t01 = (x - lo->first) / (hi->first - lo->first);
      s[j] = lo->second + t01 * (hi->second - lo->second);
    }
  } else {
    for (const auto& [k, amp] : cfg.initial.modes) {
      const double kw = eta.wavenumber(k);
      for (int j = 0; j <= eta.n(); ++j) {
        s[j] += amp * std::cos(kw * (eta.grid_x(j) + cfg.params.ell));
      }
    }
  }
  eta.refresh();
  const double mean = eta.project_zero_mean();
  if (correction) *correction = mean;
  return eta;
}

} // namespace capstokes
