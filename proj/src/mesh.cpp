#include "capstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "capstokes/errors.hpp"

namespace capstokes {

namespace {

/// Symmetric two-sided grading on [0,1]: G(t) = t^p / (t^p + (1-t)^p).
/// First cell size scales like n^{-p}.
double grade_sym(double t, double p) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::pow(t, p);
  double b = std::pow(1.0 - t, p);
  return a / (a + b);
}

/// One-sided grading clustering at s = 1: H(s) = 1 - (1-s)^p.
double grade_top(double s, double p) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - s, p);
}

double tri_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                const std::array<double, 2>& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

} // namespace

int Mesh::locate_column(double x1) const {
  auto it = std::upper_bound(column_x.begin(), column_x.end(), x1);
  int i = static_cast<int>(it - column_x.begin()) - 1;
  return std::clamp(i, 0, n_surface - 1);
}

Mesh build_mesh(const EquilibriumSurface& eq, const MeshConfig& cfg) {
  if (cfg.n_surface < 8)
    throw ValidationError("mesh needs n_surface >= 8 columns");
  if (!(cfg.depth > 0.0)) throw ValidationError("mesh depth must be positive");

  Mesh m;
  m.ell = eq.params.ell;
  m.depth = cfg.depth;
  m.n_surface = cfg.n_surface;
  m.grading = (cfg.grading > 0.0)
                  ? cfg.grading
                  : std::max(1.0, 1.0 / (1.0 - eq.delta_omega));

  double zeta_max = *std::max_element(eq.zeta0.begin(), eq.zeta0.end());
  m.n_depth = (cfg.n_depth > 0)
                  ? cfg.n_depth
                  : std::max(2, static_cast<int>(std::lround(
                                    cfg.n_surface * (cfg.depth + zeta_max) /
                                    (2.0 * m.ell))));

  const int n1 = m.n_surface;
  const int n2 = m.n_depth;
  const double p = m.grading;

  m.column_x.resize(n1 + 1);
  std::vector<double> col_zeta(n1 + 1);
  for (int i = 0; i <= n1; ++i) {
    double t = double(i) / n1;
    double x1 = (i == 0) ? -m.ell
                         : (i == n1 ? m.ell
                                    : -m.ell + 2.0 * m.ell * grade_sym(t, p));
    m.column_x[i] = x1;
    col_zeta[i] = eq.zeta0_at(x1);
  }

  // Vertex lattice: index (i, j) -> i * (n2 + 1) + j, j = 0 at the floor.
  auto vid = [n2](int i, int j) { return i * (n2 + 1) + j; };
  m.n_vertices = (n1 + 1) * (n2 + 1);
  m.nodes.resize(m.n_vertices);
  for (int i = 0; i <= n1; ++i) {
    for (int j = 0; j <= n2; ++j) {
      double s = double(j) / n2;
      double x2 = -cfg.depth + (col_zeta[i] + cfg.depth) * grade_top(s, p);
      m.nodes[vid(i, j)] = {m.column_x[i], x2};
    }
  }

  // Quad split along the bottom-left to top-right diagonal.
  std::map<std::pair<int, int>, int> edge_mid;
  auto midside = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    int id = static_cast<int>(m.nodes.size());
    m.nodes.push_back({0.5 * (m.nodes[a][0] + m.nodes[b][0]),
                       0.5 * (m.nodes[a][1] + m.nodes[b][1])});
    edge_mid.emplace(key, id);
    return id;
  };

  m.min_area = std::numeric_limits<double>::max();
  auto add_tri = [&](int a, int b, int c) {
    double area = tri_area(m.nodes[a], m.nodes[b], m.nodes[c]);
    if (!(area > 0.0))
      throw ValidationError("mesh construction produced a degenerate triangle");
    m.min_area = std::min(m.min_area, area);
    m.tris.push_back({a, b, c, midside(a, b), midside(b, c), midside(c, a)});
  };

  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      add_tri(v00, v10, v11);
      add_tri(v00, v11, v01);
    }
  }

  // Boundary edges; every boundary segment is tagged exactly once. Element
  // owners follow from the fixed cell split (T1 = v00 v10 v11, T2 = v00 v11 v01).
  for (int i = 0; i < n1; ++i) { // floor: v00-v10 edge of T1 in cell (i, 0)
    int a = vid(i, 0), b = vid(i + 1, 0);
    m.boundary.push_back({a, b, midside(a, b), BTag::Bottom, 2 * (i * n2)});
  }
  for (int j = 0; j < n2; ++j) { // right wall: v10-v11 edge of T1
    int a = vid(n1, j), b = vid(n1, j + 1);
    m.boundary.push_back(
        {a, b, midside(a, b), BTag::WallRight, 2 * ((n1 - 1) * n2 + j)});
  }
  for (int i = 0; i < n1; ++i) { // surface: v11-v01 edge of T2, left to right
    int a = vid(i, n2), b = vid(i + 1, n2);
    m.boundary.push_back(
        {a, b, midside(a, b), BTag::Surface, 2 * (i * n2 + n2 - 1) + 1});
  }
  for (int j = 0; j < n2; ++j) { // left wall: v01-v00 edge of T2
    int a = vid(0, j), b = vid(0, j + 1);
    m.boundary.push_back({a, b, midside(a, b), BTag::WallLeft, 2 * j + 1});
  }

  m.corner_bottom_left = vid(0, 0);
  m.corner_bottom_right = vid(n1, 0);
  m.corner_top_left = vid(0, n2);
  m.corner_top_right = vid(n1, n2);

  m.top_vertex_ids.resize(n1 + 1);
  for (int i = 0; i <= n1; ++i) m.top_vertex_ids[i] = vid(i, n2);
  m.top_mid_ids.resize(n1);
  for (int i = 0; i < n1; ++i)
    m.top_mid_ids[i] = midside(vid(i, n2), vid(i + 1, n2));

  // Chord sag of the polygonal surface against the zeta0 graph.
  m.max_top_sag = 0.0;
  for (int i = 0; i < n1; ++i) {
    double xa = m.column_x[i], xb = m.column_x[i + 1];
    double za = col_zeta[i], zb = col_zeta[i + 1];
    for (int q = 1; q < 4; ++q) {
      double t = q / 4.0;
      double x1 = (1 - t) * xa + t * xb;
      double chord = (1 - t) * za + t * zb;
      m.max_top_sag =
          std::max(m.max_top_sag, std::abs(chord - eq.zeta0_at(x1)));
    }
  }
  return m;
}

} // namespace capstokes
