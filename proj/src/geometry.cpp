#include "capstokes/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "capstokes/errors.hpp"
#include "capstokes/fem.hpp"

namespace capstokes {

namespace {

/// Smooth transition s(t) = sig(t) / (sig(t) + sig(1-t)) with sig(t) =
/// exp(-1/t): monotone from 0 to 1 with every derivative vanishing at both
/// ends. exp underflow near the ends rounds s to its exact limit, which is
/// harmless.
double blend_s(double t) {
  double a = std::exp(-1.0 / t);
  double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double blend_ds(double t) {
  double a = std::exp(-1.0 / t);
  double b = std::exp(-1.0 / (1.0 - t));
  double u = 1.0 / t;
  double v = 1.0 / (1.0 - t);
  double den = a + b;
  return a * b * (u * u + v * v) / (den * den);
}

} // namespace

double CutoffPhi::phi(double z) const {
  const double lo = 0.25 * m;
  const double hi = 0.5 * m;
  if (z <= lo) return 0.0;
  if (z >= hi) return z;
  double t = (z - lo) / (hi - lo);
  return z * blend_s(t);
}

double CutoffPhi::dphi(double z) const {
  const double lo = 0.25 * m;
  const double hi = 0.5 * m;
  if (z <= lo) return 0.0;
  if (z >= hi) return 1.0;
  double t = (z - lo) / (hi - lo);
  return blend_s(t) + z * blend_ds(t) / (hi - lo);
}

GeometryEvaluator::GeometryEvaluator(const EquilibriumSurface& eq,
                                     const SurfaceField& eta)
    : eq_(&eq), eta_(&eta) {
  cutoff_.m = eq.min_zeta0;
}

GeometryPoint GeometryEvaluator::at_cached(double x1, double x2, double zeta0,
                                           double dzeta0) const {
  const auto& a = eta_->coef();
  const int n = eta_->n();
  const double u = x1 + eta_->ell();
  const double d = x2 - zeta0;

  // S0 = eta_bar in extension coordinates, S2 = its vertical partial,
  // S1 = the horizontal partial of the extension (before composition).
  double S0 = 0.0, S1 = 0.0, S2 = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double kw = eta_->wavenumber(k);
    const double e = kw * d;
    if (e < -700.0) break; // remaining modes underflow for d < 0
    const double decay = std::exp(e);
    const double c = std::cos(kw * u);
    const double s = std::sin(kw * u);
    S0 += a[k] * decay * c;
    S1 -= a[k] * decay * kw * s;
    S2 += a[k] * decay * kw * c;
  }

  GeometryPoint p;
  p.eta_bar = S0;
  p.d1_eta_bar = S1 - dzeta0 * S2; // chain rule through x2 - zeta0(x1)
  p.d2_eta_bar = S2;
  p.W = cutoff_.phi(x2) / zeta0;
  p.A = p.W * p.d1_eta_bar - (p.W / zeta0) * dzeta0 * p.eta_bar;
  p.J = 1.0 + p.W * p.d2_eta_bar + cutoff_.dphi(x2) * p.eta_bar / zeta0;
  if (!(p.J > 0.0)) throw SolverError("flattening map degenerate: J <= 0");
  p.K = 1.0 / p.J;
  return p;
}

GeometryPoint GeometryEvaluator::at(double x1, double x2) const {
  return at_cached(x1, x2, eq_->zeta0_at(x1), eq_->dzeta0_at(x1));
}

SurfacePoint GeometryEvaluator::surface_at_cached(double x1, double zeta0,
                                                  double dzeta0,
                                                  double ddzeta0) const {
  SurfacePoint s;
  s.zeta0 = zeta0;
  s.dzeta0 = dzeta0;
  s.ddzeta0 = ddzeta0;
  s.eta = eta_->eval(x1);
  s.deta = eta_->eval_d1(x1);
  s.ddeta = eta_->eval_d2(x1);
  s.N0[0] = -dzeta0;
  s.N0[1] = 1.0;
  s.N[0] = -dzeta0 - s.deta;
  s.N[1] = 1.0;
  s.dN1 = -(ddzeta0 + s.ddeta);
  double norm = std::sqrt(1.0 + dzeta0 * dzeta0);
  s.T[0] = 1.0 / norm;
  s.T[1] = dzeta0 / norm;
  return s;
}

SurfacePoint GeometryEvaluator::surface_at(double x1) const {
  return surface_at_cached(x1, eq_->zeta0_at(x1), eq_->dzeta0_at(x1),
                           eq_->ddzeta0_at(x1));
}

std::vector<std::array<double, 2>> equilibrium_node_cache(
    const EquilibriumSurface& eq, const Mesh& mesh) {
  std::vector<std::array<double, 2>> cache(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    double x1 = mesh.nodes[i][0];
    cache[i] = {eq.zeta0_at(x1), eq.dzeta0_at(x1)};
  }
  return cache;
}

std::vector<double> poisson_extend(const SurfaceField& eta,
                                   const EquilibriumSurface& eq,
                                   const Mesh& mesh) {
  GeometryEvaluator ev(eq, eta);
  auto cache = equilibrium_node_cache(eq, mesh);
  const double allow = mesh.max_top_sag + 1e-10;
  std::vector<double> out(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    double x1 = mesh.nodes[i][0];
    double x2 = mesh.nodes[i][1];
    if (x2 - cache[i][0] > allow)
      throw ValidationError("invalid mesh: node above the surface graph");
    out[i] = ev.at_cached(x1, x2, cache[i][0], cache[i][1]).eta_bar;
  }
  return out;
}

GeometryFields coefficient_fields(
    const Mesh& mesh, const GeometryEvaluator& ev,
    const std::vector<std::array<double, 2>>& node_cache) {
  GeometryFields f;
  const std::size_t nn = mesh.nodes.size();
  f.eta_bar.resize(nn);
  f.W.resize(nn);
  f.A.resize(nn);
  f.J.resize(nn);
  f.K.resize(nn);
  f.phi2.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    double x1 = mesh.nodes[i][0];
    double x2 = mesh.nodes[i][1];
    GeometryPoint p = ev.at_cached(x1, x2, node_cache[i][0], node_cache[i][1]);
    f.eta_bar[i] = p.eta_bar;
    f.W[i] = p.W;
    f.A[i] = p.A;
    f.J[i] = p.J;
    f.K[i] = p.K;
    f.phi2[i] = x2 + p.W * p.eta_bar;
    f.worst_J_dev = std::max(f.worst_J_dev, std::abs(p.J - 1.0));
    f.worst_A = std::max(f.worst_A, std::abs(p.A));
  }
  f.ok = (f.worst_J_dev + f.worst_A <= 0.5);
  return f;
}

GeometryGate validate_geometry(const GeometryFields& f) {
  return {f.worst_J_dev + f.worst_A <= 0.5, f.worst_J_dev, f.worst_A};
}

namespace {

const std::array<std::array<double, 3>, 6>& local_node_bary() {
  static const std::array<std::array<double, 3>, 6> b = {{{1.0, 0.0, 0.0},
                                                          {0.0, 1.0, 0.0},
                                                          {0.0, 0.0, 1.0},
                                                          {0.5, 0.5, 0.0},
                                                          {0.0, 0.5, 0.5},
                                                          {0.5, 0.0, 0.5}}};
  return b;
}

} // namespace

double piola_residual(const Mesh& mesh, const GeometryFields& f) {
  const std::size_t nn = mesh.nodes.size();
  std::vector<char> on_boundary(nn, 0);
  for (const auto& be : mesh.boundary) {
    on_boundary[be.v0] = 1;
    on_boundary[be.v1] = 1;
    on_boundary[be.mid] = 1;
  }

  // Patch-averaged P2 gradients of the nodal fields J and A.
  std::vector<double> gJ1(nn, 0.0), gA2(nn, 0.0);
  std::vector<int> count(nn, 0);
  const auto& bary = local_node_bary();
  for (std::size_t e = 0; e < mesh.tris.size(); ++e) {
    TriGeom g = tri_geom(mesh, static_cast<int>(e));
    const auto& t = mesh.tris[e];
    for (int a = 0; a < 6; ++a) {
      double grad[6][2];
      p2_grad(g, bary[a], grad);
      double dJ1 = 0.0, dA2 = 0.0;
      for (int b = 0; b < 6; ++b) {
        dJ1 += f.J[t[b]] * grad[b][0];
        dA2 += f.A[t[b]] * grad[b][1];
      }
      gJ1[t[a]] += dJ1;
      gA2[t[a]] += dA2;
      count[t[a]] += 1;
    }
  }

  double res = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    if (on_boundary[i] || count[i] == 0) continue;
    // Row 1 of div(J calA): d1(J) + d2(-A). Row 2 is d1(0) + d2(1) = 0
    // identically for the discrete operator as well.
    res = std::max(res, std::abs(gJ1[i] - gA2[i]) / count[i]);
  }
  return res;
}

} // namespace capstokes
