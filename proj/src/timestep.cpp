/// @file timestep.cpp
/// @brief Step driver: smallness gate, contact Newton loop, surface update,
///        energy bookkeeping, and deterministic checkpoints.

#include "capstokes/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "capstokes/csvio.hpp"
#include "capstokes/equilibrium.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/geometry.hpp"

namespace capstokes {

SimulationState make_initial_state(const SurfaceField& eta0) {
  SimulationState s;
  s.eta = eta0;
  s.eta_history.push_back(eta0.samples());
  return s;
}

namespace {

template <class T>
void push_ring(std::vector<T>& ring, T value) {
  ring.insert(ring.begin(), std::move(value));
  if (ring.size() > SimulationState::history_cap) {
    ring.resize(SimulationState::history_cap);
  }
}

} // namespace

StepReport advance(SimulationState& state, const AssemblyCache& cache,
                   const std::vector<std::array<double, 2>>& node_cache,
                   const EquilibriumSurface& eq, const PhysicalParams& params,
                   const WHat& what, const StepOptions& opts) {
  const Mesh& mesh = *cache.mesh;
  GeometryEvaluator geom(eq, state.eta);
  GeometryFields fields = coefficient_fields(mesh, geom, node_cache);
  GeometryGate gate = validate_geometry(fields);

  StepReport rep;
  rep.gate_value = gate.worst_J_dev + gate.worst_A;
  if (!gate.ok) {
    std::ostringstream os;
    os << "left small-data regime: ||J - 1||_inf + ||A||_inf = "
       << rep.gate_value << " > 0.5 at step " << state.step
       << ", t = " << state.time;
    throw SolverError(os.str());
  }

  const double kappa = what.kappa();
  const ContactLinearization zerolin;
  SaddleSystem base =
      assemble_system(cache, geom, params, opts.dt, zerolin, true, nullptr);

  const int corner[2] = {mesh.corner_top_left, mesh.corner_top_right};
  const SurfacePoint sp[2] = {geom.surface_at(-mesh.ell),
                              geom.surface_at(mesh.ell)};

  auto solve_with = [&](const std::array<double, 2>& keff,
                        const std::array<double, 2>& shift) {
    std::vector<Eigen::Triplet<double>> tr;
    Eigen::VectorXd rhs = base.rhs;
    for (int s = 0; s < 2; ++s) {
      for (int c = 0; c < 2; ++c) {
        const int rc = base.dofs.u_dof(corner[s], c);
        if (rc < 0) continue;
        rhs[rc] -= shift[s] * sp[s].N[c];
        for (int d = 0; d < 2; ++d) {
          const int cd = base.dofs.u_dof(corner[s], d);
          if (cd >= 0 && keff[s] != 0.0) {
            tr.emplace_back(rc, cd, keff[s] * sp[s].N[c] * sp[s].N[d]);
          }
        }
      }
    }
    Eigen::SparseMatrix<double> contact(base.dofs.total, base.dofs.total);
    contact.setFromTriplets(tr.begin(), tr.end());
    SaddleSystem sys;
    sys.dofs = base.dofs;
    sys.M = base.M + contact;
    sys.rhs = std::move(rhs);
    return solve_saddle(sys);
  };

  SaddleSolution sol;
  std::array<double, 2> V = state.contact_velocity;

  auto run_newton = [&]() {
    if (what.is_linear()) {
      sol = solve_with({kappa, kappa}, {0.0, 0.0});
      V = contact_velocities(cache, geom, sol.u);
      rep.newton_iters = 1;
      return;
    }
    std::vector<std::array<double, 2>> iterates{V};
    bool converged = false;
    for (int it = 1; it <= opts.newton_max_iter; ++it) {
      std::array<double, 2> keff, shift;
      for (int s = 0; s < 2; ++s) {
        const double d = what.deriv(V[s]);
        keff[s] = kappa * (1.0 + d);
        shift[s] = kappa * (what.eval(V[s]) - d * V[s]);
      }
      sol = solve_with(keff, shift);
      const auto vn = contact_velocities(cache, geom, sol.u);
      const double diff =
          std::max(std::abs(vn[0] - V[0]), std::abs(vn[1] - V[1]));
      V = vn;
      iterates.push_back(V);
      rep.newton_iters = it;
      if (!std::isfinite(V[0]) || !std::isfinite(V[1])) break;
      const double scale =
          std::max(1.0, std::max(std::abs(V[0]), std::abs(V[1])));
      if (diff <= opts.newton_tol * scale) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "contact Newton iteration did not converge in "
         << opts.newton_max_iter << " iterations at step " << state.step
         << "; contact velocity iterates:";
      for (const auto& w : iterates) os << " (" << w[0] << ", " << w[1] << ")";
      throw SolverError(os.str());
    }
  };

  run_newton();

  if (opts.picard_curvature) {
    // One corrector pass: the lagged curvature remainder re-evaluated at the
    // predicted surface slope; geometry itself stays at eta^n.
    SurfaceField pred = state.eta;
    const auto s0 = sample_trace_velocity(cache, geom, sol.u);
    auto& ps = pred.mutable_samples();
    for (size_t g = 0; g < ps.size(); ++g) ps[g] += opts.dt * s0[g];
    pred.refresh();
    AssemblyLoads lo;
    lo.curvature_predictor = &pred;
    base = assemble_system(cache, geom, params, opts.dt, zerolin, true, &lo);
    run_newton();
  }

  const auto s_trace = sample_trace_velocity(cache, geom, sol.u);
  double drift = 0.0;
  for (size_t g = 0; g < s_trace.size(); ++g) {
    drift += cache.trace[g].weight * s_trace[g];
  }
  rep.drift_pre = opts.dt * drift;
  rep.dissipation = dissipation_integrals(cache, geom, params, kappa, sol.u);
  rep.contact_velocity = V;
  rep.w_bracket =
      kappa * (V[0] * what.eval(V[0]) + V[1] * what.eval(V[1]));
  rep.lambda_p = sol.lambda_p;
  rep.lambda_s = sol.lambda_s;
  rep.rel_residual = sol.rel_residual;

  // Surface update; the geometry evaluator is not used past this point.
  auto& smp = state.eta.mutable_samples();
  for (size_t g = 0; g < smp.size(); ++g) smp[g] += opts.dt * s_trace[g];
  state.eta.refresh();
  rep.mean_correction = state.eta.project_zero_mean();

  rep.energy_surface = surface_energy(cache, params, state.eta);
  rep.energy_full = full_energy(cache, params, state.eta);

  state.u = sol.u;
  state.p = sol.p;
  state.contact_velocity = V;
  state.lambda_p = sol.lambda_p;
  state.lambda_s = sol.lambda_s;
  push_ring(state.eta_history, state.eta.samples());
  push_ring(state.u_history, state.u);
  push_ring(state.p_history, state.p);
  push_ring(state.contact_history, V);
  state.time += opts.dt;
  state.step += 1;
  return rep;
}

double surface_energy(const AssemblyCache& cache, const PhysicalParams& params,
                      const SurfaceField& eta) {
  if (static_cast<size_t>(eta.n() + 1) != cache.trace.size()) {
    throw ValidationError("surface grid mismatch between field and cache");
  }
  double sum = 0.0;
  for (size_t g = 0; g < cache.trace.size(); ++g) {
    const TraceSample& s = cache.trace[g];
    const double e = eta.samples()[g];
    const double ep = eta.eval_d1(s.x1);
    const double fac = std::pow(1.0 + s.dzeta0 * s.dzeta0, -1.5);
    sum += s.weight * (0.5 * params.g * e * e +
                       0.5 * params.sigma * fac * ep * ep +
                       params.sigma * Q_eval(s.dzeta0, ep));
  }
  return sum;
}

double full_energy(const AssemblyCache& cache, const PhysicalParams& params,
                   const SurfaceField& eta) {
  if (static_cast<size_t>(eta.n() + 1) != cache.trace.size()) {
    throw ValidationError("surface grid mismatch between field and cache");
  }
  std::vector<double> zeta(cache.trace.size());
  for (size_t g = 0; g < zeta.size(); ++g) {
    zeta[g] = cache.trace_zeta0[g] + eta.samples()[g];
  }
  return energy_functional(params, zeta, eta.dx());
}

std::vector<double> energy_audit_residuals(
    const std::vector<double>& energies,
    const std::vector<double>& dissipations,
    const std::vector<double>& brackets, double dt) {
  const size_t nsolve = dissipations.size();
  if (energies.size() != nsolve + 1 || brackets.size() != nsolve) {
    throw ValidationError("energy audit series have inconsistent lengths");
  }
  std::vector<double> res;
  if (nsolve < 2) return res;
  res.reserve(nsolve - 1);
  for (size_t n = 1; n + 1 <= nsolve; ++n) {
    // dissipations[n-1] belongs to the solve producing state n.
    const double slope = (energies[n + 1] - energies[n - 1]) / (2.0 * dt);
    const double diss = 0.5 * (dissipations[n - 1] + dissipations[n]);
    const double wb = 0.5 * (brackets[n - 1] + brackets[n]);
    res.push_back(slope + diss + wb);
  }
  return res;
}

namespace {

void write_scalar(std::ostream& out, const char* name, double v) {
  out << name << ' ' << format_double(v) << '\n';
}

void write_vector(std::ostream& out, const char* name,
                  const double* v, size_t n) {
  out << name << ' ' << n;
  for (size_t i = 0; i < n; ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

void expect_token(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want) {
    throw ValidationError("malformed checkpoint: expected '" + want + "'");
  }
}

std::vector<double> read_vector(std::istream& in, const std::string& name) {
  expect_token(in, name);
  size_t n = 0;
  if (!(in >> n)) throw ValidationError("malformed checkpoint: missing size");
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(in >> v[i])) {
      throw ValidationError("malformed checkpoint: truncated vector " + name);
    }
  }
  return v;
}

double read_scalar(std::istream& in, const std::string& name) {
  expect_token(in, name);
  double v = 0.0;
  if (!(in >> v)) throw ValidationError("malformed checkpoint: bad scalar");
  return v;
}

} // namespace

void write_checkpoint(std::ostream& out, const SimulationState& state) {
  out << "capstokes-checkpoint 1\n";
  out << "step " << state.step << '\n';
  write_scalar(out, "time", state.time);
  write_scalar(out, "ell", state.eta.ell());
  out << "eta_n " << state.eta.n() << '\n';
  write_vector(out, "eta", state.eta.samples().data(),
               state.eta.samples().size());
  write_vector(out, "u", state.u.data(), static_cast<size_t>(state.u.size()));
  write_vector(out, "p", state.p.data(), static_cast<size_t>(state.p.size()));
  write_vector(out, "contact", state.contact_velocity.data(), 2);
  write_scalar(out, "lambda_p", state.lambda_p);
  write_scalar(out, "lambda_s", state.lambda_s);
  out << "eta_history " << state.eta_history.size() << '\n';
  for (const auto& h : state.eta_history) {
    write_vector(out, "h", h.data(), h.size());
  }
  out << "u_history " << state.u_history.size() << '\n';
  for (const auto& h : state.u_history) {
    write_vector(out, "h", h.data(), static_cast<size_t>(h.size()));
  }
  out << "p_history " << state.p_history.size() << '\n';
  for (const auto& h : state.p_history) {
    write_vector(out, "h", h.data(), static_cast<size_t>(h.size()));
  }
  out << "contact_history " << state.contact_history.size() << '\n';
  for (const auto& h : state.contact_history) {
    write_vector(out, "h", h.data(), 2);
  }
  out << "end\n";
}

SimulationState read_checkpoint(std::istream& in) {
  expect_token(in, "capstokes-checkpoint");
  int version = 0;
  if (!(in >> version) || version != 1) {
    throw ValidationError("unsupported checkpoint version");
  }
  SimulationState s;
  expect_token(in, "step");
  if (!(in >> s.step)) throw ValidationError("malformed checkpoint: step");
  s.time = read_scalar(in, "time");
  const double ell = read_scalar(in, "ell");
  expect_token(in, "eta_n");
  int n = 0;
  if (!(in >> n) || n < 8) {
    throw ValidationError("malformed checkpoint: eta_n");
  }
  s.eta = SurfaceField(ell, n);
  auto eta_samples = read_vector(in, "eta");
  if (eta_samples.size() != static_cast<size_t>(n + 1)) {
    throw ValidationError("malformed checkpoint: eta sample count");
  }
  s.eta.mutable_samples() = eta_samples;
  s.eta.refresh();
  auto uv = read_vector(in, "u");
  s.u = Eigen::Map<const Eigen::VectorXd>(uv.data(), uv.size());
  auto pv = read_vector(in, "p");
  s.p = Eigen::Map<const Eigen::VectorXd>(pv.data(), pv.size());
  auto cv = read_vector(in, "contact");
  if (cv.size() != 2) throw ValidationError("malformed checkpoint: contact");
  s.contact_velocity = {cv[0], cv[1]};
  s.lambda_p = read_scalar(in, "lambda_p");
  s.lambda_s = read_scalar(in, "lambda_s");

  auto read_ring = [&](const std::string& name, auto push) {
    expect_token(in, name);
    size_t count = 0;
    if (!(in >> count) || count > SimulationState::history_cap) {
      throw ValidationError("malformed checkpoint: history size");
    }
    for (size_t i = 0; i < count; ++i) push(read_vector(in, "h"));
  };
  read_ring("eta_history",
            [&](std::vector<double> v) { s.eta_history.push_back(std::move(v)); });
  read_ring("u_history", [&](std::vector<double> v) {
    s.u_history.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  });
  read_ring("p_history", [&](std::vector<double> v) {
    s.p_history.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  });
  read_ring("contact_history", [&](std::vector<double> v) {
    if (v.size() != 2) {
      throw ValidationError("malformed checkpoint: contact history entry");
    }
    s.contact_history.push_back({v[0], v[1]});
  });
  expect_token(in, "end");
  return s;
}

} // namespace capstokes
