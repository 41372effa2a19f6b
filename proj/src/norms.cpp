/// @file norms.cpp
/// @brief Weighted/fractional norm evaluation and diagnostic functionals.

#include "capstokes/norms.hpp"

#include <algorithm>
#include <cmath>

#include "capstokes/errors.hpp"
#include "capstokes/fem.hpp"
#include "capstokes/geometry.hpp"

namespace capstokes {

std::vector<std::array<double, 2>> default_corners(const Mesh& mesh) {
  return {mesh.nodes[mesh.corner_top_left], mesh.nodes[mesh.corner_top_right]};
}

namespace {

double dist_to_corners(double x, double y,
                       const std::vector<std::array<double, 2>>& corners) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : corners) {
    d = std::min(d, std::hypot(x - c[0], y - c[1]));
  }
  return d;
}

/// Barycentric coordinates of a physical point wrt a triangle (affine).
std::array<double, 3> bary_of(const std::array<std::array<double, 2>, 3>& v,
                              double x, double y) {
  const double d = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                   (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
  const double l1 = ((x - v[0][0]) * (v[2][1] - v[0][1]) -
                     (v[2][0] - v[0][0]) * (y - v[0][1])) /
                    d;
  const double l2 = ((v[1][0] - v[0][0]) * (y - v[0][1]) -
                     (x - v[0][0]) * (v[1][1] - v[0][1])) /
                    d;
  return {1.0 - l1 - l2, l1, l2};
}

bool contains_point(const std::array<std::array<double, 2>, 3>& v, double x,
                    double y) {
  const auto l = bary_of(v, x, y);
  const double tol = -1e-12;
  return l[0] >= tol && l[1] >= tol && l[2] >= tol;
}

double tri_area_of(const std::array<std::array<double, 2>, 3>& v) {
  return 0.5 * std::abs((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                        (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
}

/// Integrates density(x, y) * dist(x, corners)^{2 delta} over the triangle.
/// Triangles containing a corner point are split at edge midpoints; only the
/// quarter holding the corner keeps recursing, so the cost is linear in the
/// depth and the geometric ring sums converge for any exponent > -2.
template <class Density>
double weighted_tri_integral(const std::array<std::array<double, 2>, 3>& v,
                             const Density& dens, double two_delta,
                             const std::vector<std::array<double, 2>>& corners,
                             int depth) {
  bool near = false;
  if (depth > 0) {
    for (const auto& c : corners) {
      if (contains_point(v, c[0], c[1])) {
        near = true;
        break;
      }
    }
  }
  if (near) {
    const std::array<double, 2> m01{0.5 * (v[0][0] + v[1][0]),
                                    0.5 * (v[0][1] + v[1][1])};
    const std::array<double, 2> m12{0.5 * (v[1][0] + v[2][0]),
                                    0.5 * (v[1][1] + v[2][1])};
    const std::array<double, 2> m20{0.5 * (v[2][0] + v[0][0]),
                                    0.5 * (v[2][1] + v[0][1])};
    double sum = 0.0;
    const std::array<std::array<std::array<double, 2>, 3>, 4> sub{{
        {{v[0], m01, m20}},
        {{m01, v[1], m12}},
        {{m20, m12, v[2]}},
        {{m01, m12, m20}},
    }};
    for (const auto& s : sub) {
      sum += weighted_tri_integral(s, dens, two_delta, corners, depth - 1);
    }
    return sum;
  }
  const TriQuadRule& tq = tri_quad_deg5();
  const double area = tri_area_of(v);
  double sum = 0.0;
  for (int q = 0; q < TriQuadRule::n; ++q) {
    const auto& l = tq.bary[q];
    const double x = l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0];
    const double y = l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1];
    const double d = dist_to_corners(x, y, corners);
    const double w = (two_delta == 0.0) ? 1.0 : std::pow(d, two_delta);
    sum += tq.w[q] * area * w * dens(x, y);
  }
  return sum;
}

constexpr int kSubdivisionDepth = 24;

/// 4th-order first derivative of uniform samples (5-point one-sided ends).
std::vector<double> fd_derivative(std::span<const double> f, double h) {
  const size_t n = f.size();
  std::vector<double> d(n);
  if (n < 5) throw ValidationError("derivative stencil needs >= 5 samples");
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
  d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
  for (size_t i = 2; i + 2 < n; ++i) {
    d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
  }
  d[n - 2] = -c * (-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] -
                   6 * f[n - 4] + f[n - 5]);
  d[n - 1] = -c * (-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] +
                   16 * f[n - 4] - 3 * f[n - 5]);
  return d;
}

/// Simpson weights on m+1 uniform samples (3/8 tail when m is odd).
std::vector<double> simpson_w(size_t nsamp, double h) {
  std::vector<double> w(nsamp, 0.0);
  const size_t m = nsamp - 1;
  if (m == 0) return w;
  if (m == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  size_t even_end = m;
  const bool odd = (m % 2 != 0);
  if (odd) even_end = m - 3;
  for (size_t i = 0; i + 2 <= even_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (odd) {
    const double c = 3.0 * h / 8.0;
    w[m - 3] += c;
    w[m - 2] += 3.0 * c;
    w[m - 1] += 3.0 * c;
    w[m] += c;
  }
  return w;
}

struct CellGauss {
  // Two Gauss points per cell: interpolated value, position, optional weight.
  std::vector<std::array<double, 2>> val, pos;
  std::vector<double> mid_slope; // (f_{i+1} - f_i) / dx at the cell midpoint
  double half_dx = 0.0;
};

CellGauss cell_gauss_data(std::span<const double> f, double dx) {
  const size_t nsamp = f.size();
  if (nsamp < 8) {
    throw ValidationError("fractional norm needs at least 8 samples");
  }
  const size_t ncell = nsamp - 1;
  const double gt[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  CellGauss g;
  g.val.resize(ncell);
  g.pos.resize(ncell);
  g.mid_slope.resize(ncell);
  g.half_dx = 0.5 * dx;
  for (size_t i = 0; i < ncell; ++i) {
    const size_t s = std::min(std::max<long>(0, static_cast<long>(i) - 1),
                              static_cast<long>(nsamp - 4));
    for (int q = 0; q < 2; ++q) {
      const double xi = (static_cast<double>(i) + gt[q]) - static_cast<double>(s);
      const double l0 = -(xi - 1) * (xi - 2) * (xi - 3) / 6.0;
      const double l1 = xi * (xi - 2) * (xi - 3) / 2.0;
      const double l2 = -xi * (xi - 1) * (xi - 3) / 2.0;
      const double l3 = xi * (xi - 1) * (xi - 2) / 6.0;
      g.val[i][q] = l0 * f[s] + l1 * f[s + 1] + l2 * f[s + 2] + l3 * f[s + 3];
      g.pos[i][q] = (static_cast<double>(i) + gt[q]) * dx;
    }
    g.mid_slope[i] = (f[i + 1] - f[i]) / dx;
  }
  return g;
}

double gagliardo_half_sq(std::span<const double> f, double dx, double span_len,
                         double delta) {
  // delta != 0 weights each argument by dist(x, interval ends)^delta.
  const CellGauss g = cell_gauss_data(f, dx);
  const size_t ncell = g.val.size();
  const bool weighted = delta != 0.0;
  std::vector<std::array<double, 2>> wg;
  std::vector<double> wmid;
  if (weighted) {
    wg.resize(ncell);
    wmid.resize(ncell);
    for (size_t i = 0; i < ncell; ++i) {
      for (int q = 0; q < 2; ++q) {
        const double d = std::min(g.pos[i][q], span_len - g.pos[i][q]);
        wg[i][q] = std::pow(std::max(d, 0.0), delta);
      }
      const double xm = (static_cast<double>(i) + 0.5) * dx;
      const double dm = std::min(xm, span_len - xm);
      wmid[i] = std::pow(std::max(dm, 0.0), 2.0 * delta);
    }
  }
  double sum = 0.0;
  const double w2 = g.half_dx * g.half_dx;
  for (size_t i = 1; i < ncell; ++i) {
    for (size_t j = 0; j < i; ++j) {
      for (int qi = 0; qi < 2; ++qi) {
        for (int qj = 0; qj < 2; ++qj) {
          const double num = g.val[i][qi] - g.val[j][qj];
          const double den = g.pos[i][qi] - g.pos[j][qj];
          double r = (num / den) * (num / den);
          if (weighted) r *= wg[i][qi] * wg[j][qj];
          sum += 2.0 * w2 * r;
        }
      }
    }
  }
  for (size_t i = 0; i < ncell; ++i) {
    double r = g.mid_slope[i] * g.mid_slope[i] * dx * dx;
    if (weighted) r *= wmid[i];
    sum += r;
  }
  return sum;
}

} // namespace

double fractional_seminorm_half(std::span<const double> f, double dx) {
  return std::sqrt(gagliardo_half_sq(f, dx, 0.0, 0.0));
}

double h1_interval_sq(std::span<const double> f, double dx) {
  const auto d = fd_derivative(f, dx);
  const auto w = simpson_w(f.size(), dx);
  double sum = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    sum += w[i] * (f[i] * f[i] + d[i] * d[i]);
  }
  return sum;
}

double fractional_norm(std::span<const double> f, double ell, double s) {
  if (f.size() < 8) {
    throw ValidationError("fractional norm needs at least 8 samples");
  }
  const double dx = 2.0 * ell / static_cast<double>(f.size() - 1);
  if (s == 0.5) {
    const auto w = simpson_w(f.size(), dx);
    double l2 = 0.0;
    for (size_t i = 0; i < f.size(); ++i) l2 += w[i] * f[i] * f[i];
    return std::sqrt(l2 + gagliardo_half_sq(f, dx, 0.0, 0.0));
  }
  if (s == 1.5) {
    const auto d = fd_derivative(f, dx);
    return std::sqrt(h1_interval_sq(f, dx) +
                     gagliardo_half_sq(d, dx, 0.0, 0.0));
  }
  throw ValidationError("fractional norm supports s = 1/2 and s = 3/2 only");
}

double weighted_fractional_seminorm_half(std::span<const double> f, double ell,
                                         double delta) {
  if (f.size() < 8) {
    throw ValidationError("fractional norm needs at least 8 samples");
  }
  const double dx = 2.0 * ell / static_cast<double>(f.size() - 1);
  return std::sqrt(gagliardo_half_sq(f, dx, 2.0 * ell, delta));
}

double weighted_interval_sq(std::span<const double> f, double ell, double delta,
                            int k) {
  if (k < 0 || k > 2) {
    throw ValidationError("weighted interval norm supports k <= 2");
  }
  const double dx = 2.0 * ell / static_cast<double>(f.size() - 1);
  const auto w = simpson_w(f.size(), dx);
  std::vector<std::vector<double>> ders;
  ders.emplace_back(f.begin(), f.end());
  if (k >= 1) ders.push_back(fd_derivative(ders[0], dx));
  if (k >= 2) ders.push_back(fd_derivative(ders[1], dx));
  double sum = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    const double x = -ell + static_cast<double>(i) * dx;
    const double d = std::max(std::min(x + ell, ell - x), 0.0);
    const double wd = std::pow(d, 2.0 * delta);
    double v = 0.0;
    for (const auto& der : ders) v += der[i] * der[i];
    sum += w[i] * wd * v;
  }
  return sum;
}

double weighted_interval_52_sq(std::span<const double> f, double ell,
                               double delta) {
  const double dx = 2.0 * ell / static_cast<double>(f.size() - 1);
  const auto d1 = fd_derivative(f, dx);
  const auto d2 = fd_derivative(d1, dx);
  return weighted_interval_sq(f, ell, delta, 2) +
         gagliardo_half_sq(d2, dx, 2.0 * ell, delta);
}

double weighted_interval_12_sq(std::span<const double> f, double ell,
                               double delta) {
  const double dx = 2.0 * ell / static_cast<double>(f.size() - 1);
  return weighted_interval_sq(f, ell, delta, 0) +
         gagliardo_half_sq(f, dx, 2.0 * ell, delta);
}

double contact_bracket(double kappa, double a_left, double a_right,
                       double b_left, double b_right) {
  return kappa * (a_right * b_right + a_left * b_left);
}

HessianField recover_hessian_p2(const Mesh& mesh, const Eigen::VectorXd& nodal,
                                int ncomp) {
  // Gradient-based patch recovery: sample the exact P2 gradient at the three
  // midside points of every patch element, fit one linear model per component,
  // and read the (symmetrized) hessian off the fitted slopes. Differentiating
  // the well-approximated gradient once is markedly more stable on graded
  // meshes than fitting a quadratic to nodal values.
  const int ne = static_cast<int>(mesh.tris.size());
  std::vector<std::vector<int>> vert_elems(mesh.n_vertices);
  for (int e = 0; e < ne; ++e) {
    for (int k = 0; k < 3; ++k) vert_elems[mesh.tris[e][k]].push_back(e);
  }
  HessianField out;
  out.ncomp = ncomp;
  out.h.resize(static_cast<size_t>(ne) * ncomp);

  constexpr std::array<std::array<double, 3>, 3> kMid = {
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
  std::vector<int> patch;
  std::vector<std::array<double, 2>> pts;   // sample coordinates
  std::vector<std::array<double, 2>> grads; // per component, appended below
  for (int e = 0; e < ne; ++e) {
    patch.clear();
    for (int k = 0; k < 3; ++k) {
      for (int pe : vert_elems[mesh.tris[e][k]]) {
        if (std::find(patch.begin(), patch.end(), pe) == patch.end()) {
          patch.push_back(pe);
        }
      }
    }
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k < 3; ++k) {
      cx += mesh.nodes[mesh.tris[e][k]][0] / 3.0;
      cy += mesh.nodes[mesh.tris[e][k]][1] / 3.0;
    }
    pts.clear();
    grads.assign(static_cast<size_t>(patch.size()) * 3 * ncomp, {0.0, 0.0});
    size_t row = 0;
    for (int pe : patch) {
      const TriGeom tg = tri_geom(mesh, pe);
      for (const auto& l : kMid) {
        double x = 0.0, y = 0.0;
        for (int k = 0; k < 3; ++k) {
          x += l[k] * mesh.nodes[mesh.tris[pe][k]][0];
          y += l[k] * mesh.nodes[mesh.tris[pe][k]][1];
        }
        pts.push_back({x - cx, y - cy});
        double gp[6][2];
        p2_grad(tg, l, gp);
        for (int c = 0; c < ncomp; ++c) {
          double gx = 0.0, gy = 0.0;
          for (int a = 0; a < 6; ++a) {
            const double v = nodal[ncomp * mesh.tris[pe][a] + c];
            gx += v * gp[a][0];
            gy += v * gp[a][1];
          }
          grads[row * ncomp + c] = {gx, gy};
        }
        ++row;
      }
    }
    double scale = 0.0;
    for (const auto& q : pts) {
      scale = std::max(scale, std::max(std::abs(q[0]), std::abs(q[1])));
    }
    if (scale <= 0.0) scale = 1.0;

    const int m = static_cast<int>(pts.size());
    Eigen::MatrixXd a(m, 3);
    for (int i = 0; i < m; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = pts[i][0] / scale;
      a(i, 2) = pts[i][1] / scale;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::VectorXd bx(m), by(m);
    for (int c = 0; c < ncomp; ++c) {
      for (int i = 0; i < m; ++i) {
        bx[i] = grads[static_cast<size_t>(i) * ncomp + c][0];
        by[i] = grads[static_cast<size_t>(i) * ncomp + c][1];
      }
      const Eigen::Vector3d fx = qr.solve(bx);
      const Eigen::Vector3d fy = qr.solve(by);
      out.h[static_cast<size_t>(e) * ncomp + c] = {
          fx[1] / scale, 0.5 * (fx[2] + fy[1]) / scale, fy[2] / scale};
    }
  }
  return out;
}

namespace {

struct ElemAffine {
  std::array<std::array<double, 2>, 3> v;
  double a[3];     // l_j(x) = a[j] + g[j] . x
  double g[3][2];
};

ElemAffine elem_affine(const Mesh& mesh, int e) {
  ElemAffine ea;
  const TriGeom tg = tri_geom(mesh, e);
  for (int k = 0; k < 3; ++k) {
    ea.v[k] = mesh.nodes[mesh.tris[e][k]];
    ea.g[k][0] = tg.grad_l[k][0];
    ea.g[k][1] = tg.grad_l[k][1];
    ea.a[k] = 1.0 - (ea.g[k][0] * ea.v[k][0] + ea.g[k][1] * ea.v[k][1]);
  }
  return ea;
}

} // namespace

double weighted_norm_p2(const Mesh& mesh, const Eigen::VectorXd& nodal,
                        int ncomp, const WeightedNormSpec& spec,
                        const HessianField* hess) {
  if (spec.k < 0 || spec.k > 2) {
    throw ValidationError("weighted norm order exceeds available derivatives");
  }
  if (spec.k >= 2 && (hess == nullptr || hess->ncomp != ncomp)) {
    throw ValidationError(
        "weighted norm with k = 2 requires a recovered Hessian field");
  }
  const auto& corners =
      spec.corners.empty() ? default_corners(mesh) : spec.corners;
  double total = 0.0;
  for (size_t e = 0; e < mesh.tris.size(); ++e) {
    const ElemAffine ea = elem_affine(mesh, static_cast<int>(e));
    const TriGeom tg = tri_geom(mesh, static_cast<int>(e));
    const auto& tri = mesh.tris[e];
    double hterm = 0.0;
    if (spec.k >= 2) {
      for (int c = 0; c < ncomp; ++c) {
        const auto& h = hess->at(static_cast<int>(e), c);
        hterm += h[0] * h[0] + h[1] * h[1] + h[2] * h[2];
      }
    }
    auto dens = [&](double x, double y) {
      const std::array<double, 3> l{ea.a[0] + ea.g[0][0] * x + ea.g[0][1] * y,
                                    ea.a[1] + ea.g[1][0] * x + ea.g[1][1] * y,
                                    ea.a[2] + ea.g[2][0] * x + ea.g[2][1] * y};
      double n6[6];
      p2_basis(l, n6);
      double val = hterm;
      double grad[6][2];
      if (spec.k >= 1) p2_grad(tg, l, grad);
      for (int c = 0; c < ncomp; ++c) {
        double f = 0.0, fx = 0.0, fy = 0.0;
        for (int a = 0; a < 6; ++a) {
          const double ua = nodal[ncomp * tri[a] + c];
          f += n6[a] * ua;
          if (spec.k >= 1) {
            fx += grad[a][0] * ua;
            fy += grad[a][1] * ua;
          }
        }
        val += f * f;
        if (spec.k >= 1) val += fx * fx + fy * fy;
      }
      return val;
    };
    total += weighted_tri_integral(ea.v, dens, 2.0 * spec.delta, corners,
                                   kSubdivisionDepth);
  }
  return std::sqrt(total);
}

double weighted_norm_p1(const Mesh& mesh, const Eigen::VectorXd& vertex_vals,
                        const WeightedNormSpec& spec) {
  if (spec.k < 0 || spec.k > 1) {
    throw ValidationError("weighted norm order exceeds available derivatives");
  }
  const auto& corners =
      spec.corners.empty() ? default_corners(mesh) : spec.corners;
  double total = 0.0;
  for (size_t e = 0; e < mesh.tris.size(); ++e) {
    const ElemAffine ea = elem_affine(mesh, static_cast<int>(e));
    const auto& tri = mesh.tris[e];
    double gx = 0.0, gy = 0.0;
    if (spec.k >= 1) {
      for (int k = 0; k < 3; ++k) {
        gx += ea.g[k][0] * vertex_vals[tri[k]];
        gy += ea.g[k][1] * vertex_vals[tri[k]];
      }
    }
    const double gterm = gx * gx + gy * gy;
    auto dens = [&](double x, double y) {
      double f = 0.0;
      for (int k = 0; k < 3; ++k) {
        f += (ea.a[k] + ea.g[k][0] * x + ea.g[k][1] * y) * vertex_vals[tri[k]];
      }
      return f * f + gterm;
    };
    total += weighted_tri_integral(ea.v, dens, 2.0 * spec.delta, corners,
                                   kSubdivisionDepth);
  }
  return std::sqrt(total);
}

double h1_norm_p2_sq(const AssemblyCache& cache, const Eigen::VectorXd& u,
                     int ncomp) {
  const Mesh& mesh = *cache.mesh;
  double total = 0.0;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      double val = 0.0;
      for (int c = 0; c < ncomp; ++c) {
        double f = 0.0, fx = 0.0, fy = 0.0;
        for (int a = 0; a < 6; ++a) {
          const double ua = u[ncomp * tri[a] + c];
          f += q.n2[a] * ua;
          fx += q.grad[a][0] * ua;
          fy += q.grad[a][1] * ua;
        }
        val += f * f + fx * fx + fy * fy;
      }
      total += q.w * val;
    }
  }
  return total;
}

double l2_trace_slip_sq(const AssemblyCache& cache, const Eigen::VectorXd& u) {
  const Mesh& mesh = *cache.mesh;
  double total = 0.0;
  for (size_t we = 0; we < cache.wall_edges.size(); ++we) {
    const BoundaryEdge& edge = mesh.boundary[cache.wall_edge_index[we]];
    const int nodes[3] = {edge.v0, edge.mid, edge.v1};
    for (const WallQP& q : cache.wall_edges[we]) {
      double v0 = 0.0, v1 = 0.0;
      for (int a = 0; a < 3; ++a) {
        v0 += q.nb[a] * u[2 * nodes[a]];
        v1 += q.nb[a] * u[2 * nodes[a] + 1];
      }
      total += q.w_ds * (v0 * v0 + v1 * v1);
    }
  }
  return total;
}

double l2_p1_sq(const AssemblyCache& cache, const Eigen::VectorXd& p) {
  const Mesh& mesh = *cache.mesh;
  double total = 0.0;
  for (size_t e = 0; e < cache.elems.size(); ++e) {
    const auto& tri = mesh.tris[e];
    for (const VolQP& q : cache.elems[e]) {
      double f = 0.0;
      for (int b = 0; b < 3; ++b) f += q.n1[b] * p[tri[b]];
      total += q.w * f * f;
    }
  }
  return total;
}

namespace {

std::vector<double> ring_diff_samples(
    const std::vector<std::vector<double>>& ring, int j, double dt) {
  static const double signs[4][4] = {{1, 0, 0, 0},
                                     {1, -1, 0, 0},
                                     {1, -2, 1, 0},
                                     {1, -3, 3, -1}};
  const size_t n = ring[0].size();
  std::vector<double> out(n, 0.0);
  const double scale = std::pow(dt, -static_cast<double>(j));
  for (int m = 0; m <= j; ++m) {
    const double c = signs[j][m] * scale;
    for (size_t i = 0; i < n; ++i) out[i] += c * ring[m][i];
  }
  return out;
}

Eigen::VectorXd ring_diff_eigen(const std::vector<Eigen::VectorXd>& ring, int j,
                                double dt) {
  static const double signs[4][4] = {{1, 0, 0, 0},
                                     {1, -1, 0, 0},
                                     {1, -2, 1, 0},
                                     {1, -3, 3, -1}};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ring[0].size());
  const double scale = std::pow(dt, -static_cast<double>(j));
  for (int m = 0; m <= j; ++m) out += signs[j][m] * scale * ring[m];
  return out;
}

std::array<double, 2> ring_diff_contact(
    const std::vector<std::array<double, 2>>& ring, int j, double dt) {
  static const double signs[4][4] = {{1, 0, 0, 0},
                                     {1, -1, 0, 0},
                                     {1, -2, 1, 0},
                                     {1, -3, 3, -1}};
  std::array<double, 2> out{0.0, 0.0};
  const double scale = std::pow(dt, -static_cast<double>(j));
  for (int m = 0; m <= j; ++m) {
    out[0] += signs[j][m] * scale * ring[m][0];
    out[1] += signs[j][m] * scale * ring[m][1];
  }
  return out;
}

} // namespace

EdFunctionals ed_functionals(const AssemblyCache& cache,
                             const SimulationState& state, double dt,
                             double kappa, double delta) {
  const Mesh& mesh = *cache.mesh;
  EdFunctionals out;
  const double ell = state.eta.ell();
  const double dx = state.eta.dx();

  out.eta_orders =
      static_cast<int>(std::min<size_t>(3, state.eta_history.size()));
  out.u_orders = static_cast<int>(std::min<size_t>(3, state.u_history.size()));

  std::vector<std::vector<double>> eta_j;
  for (int j = 0; j < out.eta_orders; ++j) {
    eta_j.push_back(ring_diff_samples(state.eta_history, j, dt));
    out.e_parallel += h1_interval_sq(eta_j.back(), dx);
  }

  std::vector<Eigen::VectorXd> u_j, p_j;
  for (int j = 0; j < out.u_orders; ++j) {
    u_j.push_back(ring_diff_eigen(state.u_history, j, dt));
    p_j.push_back(ring_diff_eigen(state.p_history, j, dt));
    const auto vj = ring_diff_contact(state.contact_history, j, dt);
    out.d_bar_parallel += h1_norm_p2_sq(cache, u_j.back(), 2) +
                          l2_trace_slip_sq(cache, u_j.back()) +
                          contact_bracket(kappa, vj[0], vj[1], vj[0], vj[1]);
  }

  out.d_parallel = out.d_bar_parallel;
  for (int j = 0; j < out.u_orders; ++j) {
    out.d_parallel += l2_p1_sq(cache, p_j[j]);
  }
  for (int j = 0; j < out.eta_orders; ++j) {
    const double v = fractional_norm(eta_j[j], ell, 1.5);
    out.d_parallel += v * v;
  }

  out.d_full = out.d_parallel;
  out.d_full += weighted_interval_52_sq(eta_j[0], ell, delta);
  if (out.eta_orders >= 2) {
    out.d_full += weighted_interval_52_sq(eta_j[1], ell, delta);
  }
  if (state.eta_history.size() >= 4) {
    const auto d3 = ring_diff_samples(state.eta_history, 3, dt);
    out.d_full += weighted_interval_12_sq(d3, ell, delta);
    out.third_order_valid = true;
  }
  if (out.u_orders >= 1) {
    WeightedNormSpec w2{2, delta, default_corners(mesh)};
    WeightedNormSpec w1{1, delta, default_corners(mesh)};
    const HessianField h0 = recover_hessian_p2(mesh, u_j[0], 2);
    const double nu0 = weighted_norm_p2(mesh, u_j[0], 2, w2, &h0);
    out.d_full += nu0 * nu0;
    const double np0 = weighted_norm_p1(mesh, p_j[0], w1);
    out.d_full += np0 * np0;
    if (out.u_orders >= 2) {
      const HessianField h1 = recover_hessian_p2(mesh, u_j[1], 2);
      const double nu1 = weighted_norm_p2(mesh, u_j[1], 2, w2, &h1);
      out.d_full += nu1 * nu1;
      const double np1 = weighted_norm_p1(mesh, p_j[1], w1);
      out.d_full += np1 * np1;
    }
  }
  return out;
}

DecayFit decay_fit(std::span<const double> times,
                   std::span<const double> values) {
  if (times.size() != values.size()) {
    throw ValidationError("decay fit series length mismatch");
  }
  const size_t n = times.size();
  const size_t start = n / 5; // trailing 80%
  if (n - start < 10) {
    throw ValidationError("decay fit needs at least 10 samples past the transient");
  }
  double st = 0.0, sy = 0.0;
  const size_t m = n - start;
  std::vector<double> ly(m);
  for (size_t i = 0; i < m; ++i) {
    const double v = values[start + i];
    if (!(v > 0.0)) {
      throw ValidationError("decay fit requires positive samples");
    }
    ly[i] = std::log(v);
    st += times[start + i];
    sy += ly[i];
  }
  const double tbar = st / static_cast<double>(m);
  const double ybar = sy / static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double a = times[start + i] - tbar;
    const double b = ly[i] - ybar;
    stt += a * a;
    sty += a * b;
    syy += b * b;
  }
  DecayFit fit;
  fit.n_used = static_cast<int>(m);
  const double slope = (stt > 0.0) ? sty / stt : 0.0;
  fit.lambda = -slope;
  double ss_res = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double pred = ybar + slope * (times[start + i] - tbar);
    ss_res += (ly[i] - pred) * (ly[i] - pred);
  }
  fit.r_squared = (syy > 1e-30) ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<CornerProbeRow> corner_probe(const PhysicalParams& params,
                                         const EquilibriumSurface& eq,
                                         const CornerProbeConfig& cfg) {
  std::vector<CornerProbeRow> rows;
  for (int level = 0; level < cfg.levels; ++level) {
    MeshConfig mc;
    mc.n_surface = cfg.base_n << level;
    mc.depth = cfg.depth;
    mc.grading = cfg.grading;
    const Mesh mesh = build_mesh(eq, mc);
    const AssemblyCache cache = build_assembly_cache(mesh, eq, cfg.eta_grid);

    SurfaceField eta0(mesh.ell, cfg.eta_grid);
    const double amp = cfg.amplitude_rel * eq.min_zeta0;
    const double kw = M_PI * cfg.mode_k / (2.0 * mesh.ell);
    auto& smp = eta0.mutable_samples();
    for (int g = 0; g <= eta0.n(); ++g) {
      smp[g] = amp * std::cos(kw * (eta0.grid_x(g) + mesh.ell));
    }
    eta0.refresh();
    eta0.project_zero_mean();

    GeometryEvaluator geom(eq, eta0);
    const double kappa = kappa_of(params.response);
    ContactLinearization lin;
    lin.kappa_eff = {kappa, kappa};
    const SaddleSystem sys =
        assemble_system(cache, geom, params, cfg.dt, lin, true, nullptr);
    const SaddleSolution sol = solve_saddle(sys);

    const HessianField hf = recover_hessian_p2(mesh, sol.u, 2);
    const auto corners = default_corners(mesh);
    const double radius =
        cfg.patch_radius > 0.0 ? cfg.patch_radius : mesh.ell / 8.0;

    for (double delta : cfg.deltas) {
      double total = 0.0;
      for (size_t e = 0; e < mesh.tris.size(); ++e) {
        double cx = 0.0, cy = 0.0;
        for (int k = 0; k < 3; ++k) {
          cx += mesh.nodes[mesh.tris[e][k]][0] / 3.0;
          cy += mesh.nodes[mesh.tris[e][k]][1] / 3.0;
        }
        if (dist_to_corners(cx, cy, corners) > radius) continue;
        double hterm = 0.0;
        for (int c = 0; c < 2; ++c) {
          const auto& h = hf.at(static_cast<int>(e), c);
          hterm += h[0] * h[0] + h[1] * h[1] + h[2] * h[2];
        }
        const ElemAffine ea = elem_affine(mesh, static_cast<int>(e));
        total += weighted_tri_integral(
            ea.v, [&](double, double) { return hterm; }, 2.0 * delta, corners,
            kSubdivisionDepth);
      }
      rows.push_back({level, mc.n_surface, delta, std::sqrt(total)});
    }
  }
  return rows;
}

} // namespace capstokes
