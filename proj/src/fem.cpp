#include "capstokes/fem.hpp"

#include <cmath>

namespace capstokes {

const TriQuadRule& tri_quad_deg5() {
  static const TriQuadRule rule = [] {
    TriQuadRule r{};
    const double a = 0.470142064105115;  // (6 + sqrt(15)) / 21
    const double b = 0.059715871789770;  // 1 - 2a
    const double c = 0.101286507323456;  // (6 - sqrt(15)) / 21
    const double d = 0.797426985353087;  // 1 - 2c
    const double wa = 0.132394152788506;
    const double wc = 0.125939180544827;
    r.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    r.w[0] = 0.225;
    r.bary[1] = {a, a, b}; r.w[1] = wa;
    r.bary[2] = {a, b, a}; r.w[2] = wa;
    r.bary[3] = {b, a, a}; r.w[3] = wa;
    r.bary[4] = {c, c, d}; r.w[4] = wc;
    r.bary[5] = {c, d, c}; r.w[5] = wc;
    r.bary[6] = {d, c, c}; r.w[6] = wc;
    return r;
  }();
  return rule;
}

const EdgeQuadRule& edge_quad() {
  static const EdgeQuadRule rule = [] {
    EdgeQuadRule r{};
    const double p1 = 0.5 - std::sqrt(525.0 + 70.0 * std::sqrt(30.0)) / 70.0;
    const double p2 = 0.5 - std::sqrt(525.0 - 70.0 * std::sqrt(30.0)) / 70.0;
    const double w1 = (18.0 - std::sqrt(30.0)) / 72.0;
    const double w2 = (18.0 + std::sqrt(30.0)) / 72.0;
    r.t = {p1, p2, 1.0 - p2, 1.0 - p1};
    r.w = {w1, w2, w2, w1};
    return r;
  }();
  return rule;
}

void p2_basis(const std::array<double, 3>& l, double N[6]) {
  N[0] = l[0] * (2.0 * l[0] - 1.0);
  N[1] = l[1] * (2.0 * l[1] - 1.0);
  N[2] = l[2] * (2.0 * l[2] - 1.0);
  N[3] = 4.0 * l[0] * l[1];
  N[4] = 4.0 * l[1] * l[2];
  N[5] = 4.0 * l[2] * l[0];
}

void p2_basis_grad(const std::array<double, 3>& l, double dN[6][3]) {
  for (int a = 0; a < 6; ++a)
    for (int k = 0; k < 3; ++k) dN[a][k] = 0.0;
  dN[0][0] = 4.0 * l[0] - 1.0;
  dN[1][1] = 4.0 * l[1] - 1.0;
  dN[2][2] = 4.0 * l[2] - 1.0;
  dN[3][0] = 4.0 * l[1];
  dN[3][1] = 4.0 * l[0];
  dN[4][1] = 4.0 * l[2];
  dN[4][2] = 4.0 * l[1];
  dN[5][2] = 4.0 * l[0];
  dN[5][0] = 4.0 * l[2];
}

void p1_basis(const std::array<double, 3>& l, double N[3]) {
  N[0] = l[0];
  N[1] = l[1];
  N[2] = l[2];
}

TriGeom tri_geom(const Mesh& m, int elem) {
  const auto& t = m.tris[elem];
  const auto& A = m.nodes[t[0]];
  const auto& B = m.nodes[t[1]];
  const auto& C = m.nodes[t[2]];
  double det = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
  TriGeom g{};
  g.area = 0.5 * det;
  // grad l0 is normal to edge BC scaled by 1/(2 area), etc.
  g.grad_l[0][0] = (B[1] - C[1]) / det;
  g.grad_l[0][1] = (C[0] - B[0]) / det;
  g.grad_l[1][0] = (C[1] - A[1]) / det;
  g.grad_l[1][1] = (A[0] - C[0]) / det;
  g.grad_l[2][0] = (A[1] - B[1]) / det;
  g.grad_l[2][1] = (B[0] - A[0]) / det;
  return g;
}

void p2_grad(const TriGeom& g, const std::array<double, 3>& l,
             double grad[6][2]) {
  double dN[6][3];
  p2_basis_grad(l, dN);
  for (int a = 0; a < 6; ++a)
    for (int d = 0; d < 2; ++d)
      grad[a][d] = dN[a][0] * g.grad_l[0][d] + dN[a][1] * g.grad_l[1][d] +
                   dN[a][2] * g.grad_l[2][d];
}

void edge_p2_basis(double t, double N[3]) {
  N[0] = (1.0 - t) * (1.0 - 2.0 * t);
  N[1] = 4.0 * t * (1.0 - t);
  N[2] = t * (2.0 * t - 1.0);
}

void edge_p2_basis_d(double t, double dN[3]) {
  dN[0] = 4.0 * t - 3.0;
  dN[1] = 4.0 - 8.0 * t;
  dN[2] = 4.0 * t - 1.0;
}

} // namespace capstokes
