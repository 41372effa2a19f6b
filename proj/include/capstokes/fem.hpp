/// @file fem.hpp
/// @brief Reference P2/P1 bases on triangles, quadrature rules, and affine
///        element geometry. Velocity uses continuous P2 pairs, pressure
///        continuous P1 (inf-sup stable Taylor-Hood pair).

#pragma once

#include <array>

#include "capstokes/mesh.hpp"

namespace capstokes {

/// Degree-5 exact 7-point rule in barycentric points (weights sum to 1;
/// multiply by element area).
struct TriQuadRule {
  static constexpr int n = 7;
  std::array<std::array<double, 3>, n> bary;
  std::array<double, n> w;
};
const TriQuadRule& tri_quad_deg5();

/// 4-point Gauss-Legendre on [0,1] (degree 7 exact).
struct EdgeQuadRule {
  static constexpr int n = 4;
  std::array<double, n> t;
  std::array<double, n> w;
};
const EdgeQuadRule& edge_quad();

/// P2 shape functions at barycentric (l0, l1, l2); local node order matches
/// Mesh::tris: vertices v0 v1 v2 then midsides m01 m12 m20.
void p2_basis(const std::array<double, 3>& l, double N[6]);

/// Barycentric gradients dN/dl (3 columns); combine with grad(l) per element.
void p2_basis_grad(const std::array<double, 3>& l, double dN[6][3]);

void p1_basis(const std::array<double, 3>& l, double N[3]);

/// Affine geometry of one triangle: barycentric gradients in physical
/// coordinates and area.
struct TriGeom {
  double grad_l[3][2]; // grad of each barycentric coordinate
  double area;
};
TriGeom tri_geom(const Mesh& m, int elem);

/// Physical gradient of each P2 shape function at a barycentric point.
void p2_grad(const TriGeom& g, const std::array<double, 3>& l,
             double grad[6][2]);

/// 1D P2 trace basis on an edge parametrized by t in [0,1]:
/// nodes (endpoint a, midside, endpoint b).
void edge_p2_basis(double t, double N[3]);
void edge_p2_basis_d(double t, double dN[3]);

} // namespace capstokes
