/// @file assemble.cpp
/// @brief Saddle-point assembly for one semi-implicit step and the shared
///        quadrature caches reused by diagnostics.

#include "capstokes/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "capstokes/errors.hpp"
#include "capstokes/fem.hpp"

namespace capstokes {

DofMap build_dof_map(const Mesh& mesh) {
  DofMap d;
  d.n_nodes = mesh.n_p2_nodes();
  d.n_vertices = mesh.n_vertices;
  std::vector<char> fix1(d.n_nodes, 0), fix2(d.n_nodes, 0);
  for (const BoundaryEdge& e : mesh.boundary) {
    if (e.tag == BTag::WallLeft || e.tag == BTag::WallRight) {
      fix1[e.v0] = fix1[e.v1] = fix1[e.mid] = 1;
    } else if (e.tag == BTag::Bottom) {
      fix2[e.v0] = fix2[e.v1] = fix2[e.mid] = 1;
    }
  }
  d.u_free.assign(2 * d.n_nodes, -1);
  int next = 0;
  for (int a = 0; a < d.n_nodes; ++a) {
    if (!fix1[a]) d.u_free[2 * a] = next++;
    if (!fix2[a]) d.u_free[2 * a + 1] = next++;
  }
  d.n_u_free = next;
  d.p_offset = next;
  d.lam_p = next + d.n_vertices;
  d.lam_s = d.lam_p + 1;
  d.total = d.lam_s + 1;
  return d;
}

AssemblyCache build_assembly_cache(const Mesh& mesh,
                                   const EquilibriumSurface& eq,
                                   int eta_grid_n) {
  AssemblyCache c;
  c.mesh = &mesh;
  const TriQuadRule& tq = tri_quad_deg5();
  const EdgeQuadRule& gq = edge_quad();

  c.elems.resize(mesh.tris.size());
  for (size_t e = 0; e < mesh.tris.size(); ++e) {
    TriGeom tg = tri_geom(mesh, static_cast<int>(e));
    auto& qps = c.elems[e];
    qps.resize(TriQuadRule::n);
    const auto& tri = mesh.tris[e];
    for (int q = 0; q < TriQuadRule::n; ++q) {
      VolQP& v = qps[q];
      const auto& l = tq.bary[q];
      v.x1 = 0.0;
      v.x2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        v.x1 += l[k] * mesh.nodes[tri[k]][0];
        v.x2 += l[k] * mesh.nodes[tri[k]][1];
      }
      v.zeta0 = eq.zeta0_at(v.x1);
      v.dzeta0 = eq.dzeta0_at(v.x1);
      v.w = tq.w[q] * tg.area;
      p2_grad(tg, l, v.grad);
      double n6[6];
      p2_basis(l, n6);
      for (int k = 0; k < 6; ++k) v.n2[k] = n6[k];
      double n3[3];
      p1_basis(l, n3);
      for (int k = 0; k < 3; ++k) v.n1[k] = n3[k];
    }
  }

  for (size_t b = 0; b < mesh.boundary.size(); ++b) {
    const BoundaryEdge& e = mesh.boundary[b];
    if (e.tag == BTag::Surface) continue;
    c.wall_edge_index.push_back(static_cast<int>(b));
    auto& qps = c.wall_edges.emplace_back();
    qps.resize(EdgeQuadRule::n);
    const auto& pa = mesh.nodes[e.v0];
    const auto& pb = mesh.nodes[e.v1];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    for (int q = 0; q < EdgeQuadRule::n; ++q) {
      WallQP& w = qps[q];
      const double t = gq.t[q];
      w.x1 = pa[0] + t * (pb[0] - pa[0]);
      w.x2 = pa[1] + t * (pb[1] - pa[1]);
      w.zeta0 = eq.zeta0_at(w.x1);
      w.dzeta0 = eq.dzeta0_at(w.x1);
      w.w_ds = gq.w[q] * len;
      edge_p2_basis(t, w.nb);
      w.tau_comp = (e.tag == BTag::Bottom) ? 0 : 1;
    }
  }

  // Top edges in left-to-right order; nodes oriented with increasing x1.
  std::vector<std::pair<double, int>> tops;
  for (size_t b = 0; b < mesh.boundary.size(); ++b) {
    const BoundaryEdge& e = mesh.boundary[b];
    if (e.tag != BTag::Surface) continue;
    tops.push_back({mesh.nodes[e.mid][0], static_cast<int>(b)});
  }
  std::sort(tops.begin(), tops.end());
  for (auto& [mx, bidx] : tops) {
    const BoundaryEdge& e = mesh.boundary[bidx];
    c.top_edge_index.push_back(bidx);
    int va = e.v0, vb = e.v1;
    if (mesh.nodes[va][0] > mesh.nodes[vb][0]) std::swap(va, vb);
    c.top_edge_nodes.push_back({va, e.mid, vb});
    auto& qps = c.top_edges.emplace_back();
    qps.resize(EdgeQuadRule::n);
    const double xa = mesh.nodes[va][0];
    const double dx1 = mesh.nodes[vb][0] - xa;
    for (int q = 0; q < EdgeQuadRule::n; ++q) {
      TopQP& s = qps[q];
      const double t = gq.t[q];
      s.x1 = xa + t * dx1;
      s.dx1 = dx1;
      s.w_dx1 = gq.w[q] * dx1;
      s.zeta0 = eq.zeta0_at(s.x1);
      s.dzeta0 = eq.dzeta0_at(s.x1);
      s.ddzeta0 = eq.ddzeta0_at(s.x1);
      edge_p2_basis(t, s.nb);
      edge_p2_basis_d(t, s.dnb);
    }
  }

  // Uniform surface grid: the same Simpson weights as SurfaceField::mass(),
  // so the trace-mean constraint row matches the discrete mass functional.
  SurfaceField grid(mesh.ell, eta_grid_n);
  c.trace.resize(eta_grid_n + 1);
  c.trace_zeta0.resize(eta_grid_n + 1);
  for (int g = 0; g <= eta_grid_n; ++g) {
    TraceSample& s = c.trace[g];
    s.x1 = grid.grid_x(g);
    int col = mesh.locate_column(s.x1);
    s.top_edge = col;
    const double xa = mesh.column_x[col];
    const double xb = mesh.column_x[col + 1];
    s.t = std::clamp((s.x1 - xa) / (xb - xa), 0.0, 1.0);
    s.weight = grid.mass_weights()[g];
    s.zeta0 = eq.zeta0_at(s.x1);
    s.dzeta0 = eq.dzeta0_at(s.x1);
    c.trace_zeta0[g] = s.zeta0;
  }
  return c;
}

namespace {

/// calA-transformed gradients g_c^a = calA_{ck} d_k N_a for all 6 shapes.
inline void transformed_grads(const GeometryPoint& gp,
                              const double grad[6][2], double g0[6],
                              double g1[6]) {
  const double a12 = -gp.A * gp.K;
  for (int a = 0; a < 6; ++a) {
    g0[a] = grad[a][0] + a12 * grad[a][1];
    g1[a] = gp.K * grad[a][1];
  }
}

} // namespace

SaddleSystem assemble_system(const AssemblyCache& cache,
                             const GeometryEvaluator& geom,
                             const PhysicalParams& params, double dt,
                             const ContactLinearization& contact,
                             bool include_surface_load,
                             const AssemblyLoads* loads) {
  const Mesh& mesh = *cache.mesh;
  SaddleSystem sys;
  sys.dofs = build_dof_map(mesh);
  const DofMap& dm = sys.dofs;
  sys.rhs = Eigen::VectorXd::Zero(dm.total);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.tris.size() * 200);

  auto add = [&](int row, int col, double v) {
    if (row >= 0 && col >= 0 && v != 0.0) trip.emplace_back(row, col, v);
  };

  const double mu = params.mu;
  const double beta = params.beta;
  const double grav = params.g;
  const double sigma = params.sigma;

  // Volume terms: viscous stiffness, pressure coupling, mean-pressure row.
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      GeometryPoint gp = geom.at_cached(q.x1, q.x2, q.zeta0, q.dzeta0);
      double g0[6], g1[6];
      transformed_grads(gp, q.grad, g0, g1);
      const double wJ = q.w * gp.J;
      for (int a = 0; a < 6; ++a) {
        const int ra0 = dm.u_dof(tri[a], 0);
        const int ra1 = dm.u_dof(tri[a], 1);
        for (int b = 0; b < 6; ++b) {
          const int cb0 = dm.u_dof(tri[b], 0);
          const int cb1 = dm.u_dof(tri[b], 1);
          const double dot = g0[a] * g0[b] + g1[a] * g1[b];
          // mu J [ delta_cd (g^a . g^b) + g^a_d g^b_c ]
          add(ra0, cb0, mu * wJ * (dot + g0[a] * g0[b]));
          add(ra0, cb1, mu * wJ * g1[a] * g0[b]);
          add(ra1, cb0, mu * wJ * g0[a] * g1[b]);
          add(ra1, cb1, mu * wJ * (dot + g1[a] * g1[b]));
        }
        // -(p, div_A w J): div_A(N_a e_c) = g_c^a.
        for (int b = 0; b < 3; ++b) {
          const int pb = dm.p_offset + tri[b];
          const double v0 = -q.n1[b] * g0[a] * wJ;
          const double v1 = -q.n1[b] * g1[a] * wJ;
          add(ra0, pb, v0);
          add(pb, ra0, v0);
          add(ra1, pb, v1);
          add(pb, ra1, v1);
        }
      }
      for (int b = 0; b < 3; ++b) {
        const int pb = dm.p_offset + tri[b];
        add(pb, dm.lam_p, q.w * q.n1[b]);
        add(dm.lam_p, pb, q.w * q.n1[b]);
      }
      if (loads && loads->body) {
        const auto f = loads->body(q.x1, q.x2);
        for (int a = 0; a < 6; ++a) {
          const int ra0 = dm.u_dof(tri[a], 0);
          const int ra1 = dm.u_dof(tri[a], 1);
          if (ra0 >= 0) sys.rhs[ra0] += wJ * q.n2[a] * f[0];
          if (ra1 >= 0) sys.rhs[ra1] += wJ * q.n2[a] * f[1];
        }
      }
    }
  }

  // Navier slip on walls and floor: beta J (u . tau)(w . tau).
  for (size_t we = 0; we < cache.wall_edges.size(); ++we) {
    const BoundaryEdge& edge = mesh.boundary[cache.wall_edge_index[we]];
    const int nodes[3] = {edge.v0, edge.mid, edge.v1};
    for (const WallQP& q : cache.wall_edges[we]) {
      GeometryPoint gp = geom.at_cached(q.x1, q.x2, q.zeta0, q.dzeta0);
      const double wJ = q.w_ds * gp.J;
      for (int a = 0; a < 3; ++a) {
        const int ra = dm.u_dof(nodes[a], q.tau_comp);
        for (int b = 0; b < 3; ++b) {
          const int cb = dm.u_dof(nodes[b], q.tau_comp);
          add(ra, cb, beta * wJ * q.nb[a] * q.nb[b]);
        }
        if (loads && loads->slip_traction && ra >= 0) {
          sys.rhs[ra] -=
              wJ * q.nb[a] * loads->slip_traction(q.x1, q.x2, edge.tag);
        }
      }
    }
  }

  // Eliminated surface update: dt (u.N, w.N)_{1,Sigma} on the left-hand side,
  // the eta^n elastic load and the lagged curvature remainder on the right.
  for (size_t te = 0; te < cache.top_edges.size(); ++te) {
    const auto& nodes = cache.top_edge_nodes[te];
    for (const TopQP& q : cache.top_edges[te]) {
      SurfacePoint sp =
          geom.surface_at_cached(q.x1, q.zeta0, q.dzeta0, q.ddzeta0);
      const double fac = std::pow(1.0 + sp.dzeta0 * sp.dzeta0, -1.5);
      // val[a][c] = N_a (N)_c ; der[a][c] = d/dx1 of the same.
      double val[3][2], der[3][2];
      for (int a = 0; a < 3; ++a) {
        const double nba = q.nb[a];
        const double dnba = q.dnb[a] / q.dx1;
        for (int c = 0; c < 2; ++c) {
          val[a][c] = nba * sp.N[c];
          der[a][c] = dnba * sp.N[c];
        }
        der[a][0] += nba * sp.dN1; // only N_1 varies in x1
      }
      for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 2; ++c) {
          const int ra = dm.u_dof(nodes[a], c);
          if (include_surface_load && ra >= 0) {
            sys.rhs[ra] -= q.w_dx1 * (grav * sp.eta * val[a][c] +
                                      sigma * fac * sp.deta * der[a][c]);
            double slope = sp.deta;
            if (loads && loads->curvature_predictor) {
              slope = loads->curvature_predictor->eval_d1(q.x1);
            }
            sys.rhs[ra] -=
                q.w_dx1 * sigma * R_eval(sp.dzeta0, slope) * der[a][c];
          }
          if (loads && loads->surface_traction && ra >= 0) {
            const auto f4 = loads->surface_traction(q.x1);
            sys.rhs[ra] -= q.w_dx1 * q.nb[a] * f4[c];
          }
          for (int b = 0; b < 3; ++b) {
            for (int d = 0; d < 2; ++d) {
              const int cb = dm.u_dof(nodes[b], d);
              add(ra, cb,
                  dt * q.w_dx1 *
                      (grav * val[a][c] * val[b][d] +
                       sigma * fac * der[a][c] * der[b][d]));
            }
          }
        }
      }
    }
  }

  // Contact-point terms at the two corners (Newton linearization of What).
  const int corner[2] = {mesh.corner_top_left, mesh.corner_top_right};
  const double xc[2] = {-mesh.ell, mesh.ell};
  for (int side = 0; side < 2; ++side) {
    SurfacePoint sp = geom.surface_at(xc[side]);
    for (int c = 0; c < 2; ++c) {
      const int rc = dm.u_dof(corner[side], c);
      if (rc >= 0) sys.rhs[rc] -= contact.shift[side] * sp.N[c];
      for (int d = 0; d < 2; ++d) {
        add(rc, dm.u_dof(corner[side], d),
            contact.kappa_eff[side] * sp.N[c] * sp.N[d]);
      }
    }
  }

  // Trace-mean constraint: the discrete mass functional of the surface
  // update, Simpson weights at the uniform grid points.
  for (const TraceSample& s : cache.trace) {
    const auto& nodes = cache.top_edge_nodes[s.top_edge];
    double nb[3];
    edge_p2_basis(s.t, nb);
    const double deta = geom.eta().eval_d1(s.x1);
    const double nvec[2] = {-s.dzeta0 - deta, 1.0};
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 2; ++c) {
        const int ra = dm.u_dof(nodes[a], c);
        const double v = s.weight * nb[a] * nvec[c];
        add(ra, dm.lam_s, v);
        add(dm.lam_s, ra, v);
      }
    }
  }

  sys.M.resize(dm.total, dm.total);
  sys.M.setFromTriplets(trip.begin(), trip.end());
  sys.M.makeCompressed();
  return sys;
}

SaddleSolution solve_saddle(const SaddleSystem& sys) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys.M);
  lu.factorize(sys.M);
  if (lu.info() != Eigen::Success) {
    throw SolverError(
        "saddle solve failed: singular step matrix (inf-sup failure or "
        "degenerate geometry)");
  }
  Eigen::VectorXd x = lu.solve(sys.rhs);
  const double bn = sys.rhs.norm();
  // Row-sum norm of M, for the normwise backward error denominator.
  double mn = 0.0;
  {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(sys.M.rows());
    for (int k = 0; k < sys.M.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.M, k); it; ++it) {
        rowsum[it.row()] += std::abs(it.value());
      }
    }
    mn = rowsum.maxCoeff();
  }
  double rel = 0.0;
  // Iterative refinement, then accept on the normwise backward error
  // ||b - Mx|| / (||M|| ||x|| + ||b||); strongly graded meshes make the
  // naive ratio ||b - Mx|| / ||b|| meaningless when ||M|| ||x|| >> ||b||.
  for (int pass = 0; pass < 3; ++pass) {
    const Eigen::VectorXd r = sys.rhs - sys.M * x;
    rel = r.norm() / (mn * x.norm() + bn + 1e-300);
    if (!std::isfinite(rel) || rel <= 1e-14) break;
    x += lu.solve(r);
  }
  if (!std::isfinite(rel) || rel > 1e-10) {
    std::ostringstream os;
    os << "saddle solve failed: relative residual " << rel
       << " exceeds 1e-10 (inf-sup failure suspected)";
    throw SolverError(os.str());
  }
  const DofMap& dm = sys.dofs;
  SaddleSolution sol;
  sol.u = Eigen::VectorXd::Zero(2 * dm.n_nodes);
  for (int i = 0; i < 2 * dm.n_nodes; ++i) {
    if (dm.u_free[i] >= 0) sol.u[i] = x[dm.u_free[i]];
  }
  sol.p = x.segment(dm.p_offset, dm.n_vertices);
  sol.lambda_p = x[dm.lam_p];
  sol.lambda_s = x[dm.lam_s];
  sol.rel_residual = rel;
  return sol;
}

std::vector<double> sample_trace_velocity(const AssemblyCache& cache,
                                          const GeometryEvaluator& geom,
                                          const Eigen::VectorXd& u) {
  std::vector<double> out(cache.trace.size());
  for (size_t g = 0; g < cache.trace.size(); ++g) {
    const TraceSample& s = cache.trace[g];
    const auto& nodes = cache.top_edge_nodes[s.top_edge];
    double nb[3];
    edge_p2_basis(s.t, nb);
    const double deta = geom.eta().eval_d1(s.x1);
    const double nvec[2] = {-s.dzeta0 - deta, 1.0};
    double v = 0.0;
    for (int a = 0; a < 3; ++a) {
      v += nb[a] * (u[2 * nodes[a]] * nvec[0] + u[2 * nodes[a] + 1] * nvec[1]);
    }
    out[g] = v;
  }
  return out;
}

std::array<double, 2> contact_velocities(const AssemblyCache& cache,
                                         const GeometryEvaluator& geom,
                                         const Eigen::VectorXd& u) {
  const Mesh& mesh = *cache.mesh;
  const int corner[2] = {mesh.corner_top_left, mesh.corner_top_right};
  const double xc[2] = {-mesh.ell, mesh.ell};
  std::array<double, 2> v{0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    SurfacePoint sp = geom.surface_at(xc[side]);
    v[side] = u[2 * corner[side]] * sp.N[0] + u[2 * corner[side] + 1] * sp.N[1];
  }
  return v;
}

Eigen::SparseMatrix<double> velocity_h1_gram(const AssemblyCache& cache,
                                             const DofMap& dofs) {
  const Mesh& mesh = *cache.mesh;
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          const double v =
              q.w * (q.n2[a] * q.n2[b] + q.grad[a][0] * q.grad[b][0] +
                     q.grad[a][1] * q.grad[b][1]);
          for (int c = 0; c < 2; ++c) {
            const int ra = dofs.u_dof(tri[a], c);
            const int cb = dofs.u_dof(tri[b], c);
            if (ra >= 0 && cb >= 0) trip.emplace_back(ra, cb, v);
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(dofs.n_u_free, dofs.n_u_free);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> pressure_mass(const AssemblyCache& cache,
                                          const DofMap& dofs) {
  const Mesh& mesh = *cache.mesh;
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          trip.emplace_back(tri[a], tri[b], q.w * q.n1[a] * q.n1[b]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(dofs.n_vertices, dofs.n_vertices);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> pressure_coupling(const AssemblyCache& cache,
                                              const GeometryEvaluator& geom,
                                              const DofMap& dofs) {
  const Mesh& mesh = *cache.mesh;
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      GeometryPoint gp = geom.at_cached(q.x1, q.x2, q.zeta0, q.dzeta0);
      double g0[6], g1[6];
      transformed_grads(gp, q.grad, g0, g1);
      const double wJ = q.w * gp.J;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 3; ++b) {
          const int c0 = dofs.u_dof(tri[a], 0);
          const int c1 = dofs.u_dof(tri[a], 1);
          if (c0 >= 0) trip.emplace_back(tri[b], c0, -q.n1[b] * g0[a] * wJ);
          if (c1 >= 0) trip.emplace_back(tri[b], c1, -q.n1[b] * g1[a] * wJ);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(dofs.n_vertices, dofs.n_u_free);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> slip_trace_gram(const AssemblyCache& cache,
                                            const DofMap& dofs) {
  const Mesh& mesh = *cache.mesh;
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t we = 0; we < cache.wall_edges.size(); ++we) {
    const BoundaryEdge& edge = mesh.boundary[cache.wall_edge_index[we]];
    const int nodes[3] = {edge.v0, edge.mid, edge.v1};
    for (const WallQP& q : cache.wall_edges[we]) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          for (int c = 0; c < 2; ++c) {
            const int ra = dofs.u_dof(nodes[a], c);
            const int cb = dofs.u_dof(nodes[b], c);
            if (ra >= 0 && cb >= 0) {
              trip.emplace_back(ra, cb, q.w_ds * q.nb[a] * q.nb[b]);
            }
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(dofs.n_u_free, dofs.n_u_free);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

DissipationParts dissipation_integrals(const AssemblyCache& cache,
                                       const GeometryEvaluator& geom,
                                       const PhysicalParams& params,
                                       double kappa,
                                       const Eigen::VectorXd& u) {
  const Mesh& mesh = *cache.mesh;
  DissipationParts out;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      GeometryPoint gp = geom.at_cached(q.x1, q.x2, q.zeta0, q.dzeta0);
      // L_{kj} = d_k u_j in flattened coordinates.
      double L[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
      for (int a = 0; a < 6; ++a) {
        for (int j = 0; j < 2; ++j) {
          const double ua = u[2 * tri[a] + j];
          L[0][j] += q.grad[a][0] * ua;
          L[1][j] += q.grad[a][1] * ua;
        }
      }
      const double a12 = -gp.A * gp.K;
      // G_{ij} = calA_{ik} L_{kj}; D_A u = G + G^T.
      double G[2][2];
      G[0][0] = L[0][0] + a12 * L[1][0];
      G[0][1] = L[0][1] + a12 * L[1][1];
      G[1][0] = gp.K * L[1][0];
      G[1][1] = gp.K * L[1][1];
      double d2 = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double dij = G[i][j] + G[j][i];
          d2 += dij * dij;
        }
      }
      out.viscous += 0.5 * params.mu * q.w * gp.J * d2;
    }
  }
  for (size_t we = 0; we < cache.wall_edges.size(); ++we) {
    const BoundaryEdge& edge = mesh.boundary[cache.wall_edge_index[we]];
    const int nodes[3] = {edge.v0, edge.mid, edge.v1};
    for (const WallQP& q : cache.wall_edges[we]) {
      GeometryPoint gp = geom.at_cached(q.x1, q.x2, q.zeta0, q.dzeta0);
      double ut = 0.0;
      for (int a = 0; a < 3; ++a) ut += q.nb[a] * u[2 * nodes[a] + q.tau_comp];
      out.slip += params.beta * q.w_ds * gp.J * ut * ut;
    }
  }
  const auto v = contact_velocities(cache, geom, u);
  out.contact = kappa * (v[0] * v[0] + v[1] * v[1]);
  return out;
}

} // namespace capstokes
