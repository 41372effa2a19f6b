/// @file mesh.hpp
/// @brief Structured quad-split triangulation of the equilibrium fluid domain
///        (graph of zeta0 over the vessel interior), with power-law grading
///        toward the two contact corners and P2 midside nodes.

#pragma once

#include <array>
#include <vector>

#include "capstokes/equilibrium.hpp"

namespace capstokes {

enum class BTag { Surface, WallLeft, WallRight, Bottom };

struct BoundaryEdge {
  int v0, v1;    // endpoint vertex ids, oriented with the domain on the left
  int mid;       // midside node id
  BTag tag;
  int elem;      // owning triangle
};

struct MeshConfig {
  int n_surface = 32;   // columns across [-ell, ell]; >= 8
  int n_depth = 0;      // vertical cell rows; 0 selects a scale-matched count
  double depth = 1.0;   // vessel floor at x2 = -depth
  double grading = 0.0; // corner grading exponent; 0 selects max(1, 1/(1-delta_omega))
};

struct Mesh {
  double ell = 1.0;
  double depth = 1.0;
  int n_surface = 0;
  int n_depth = 0;
  double grading = 1.0;

  std::vector<std::array<double, 2>> nodes; // vertices first, then midsides
  int n_vertices = 0;
  std::vector<std::array<int, 6>> tris;     // v0 v1 v2 m01 m12 m20, ccw
  std::vector<BoundaryEdge> boundary;

  int corner_top_left = -1, corner_top_right = -1;   // contact corners
  int corner_bottom_left = -1, corner_bottom_right = -1;

  std::vector<int> top_vertex_ids;  // surface vertices, left to right
  std::vector<int> top_mid_ids;     // surface midside nodes, left to right
  std::vector<double> column_x;     // x1 of the n_surface + 1 columns

  double max_top_sag = 0.0; // max gap between top chords and the zeta0 graph
  double min_area = 0.0;

  int n_p2_nodes() const { return static_cast<int>(nodes.size()); }

  /// Column interval containing x1 (clamped); used for trace evaluation.
  int locate_column(double x1) const;
};

/// Throws ValidationError on degenerate requests (n_surface < 8, nonpositive
/// depth, degenerate triangles).
Mesh build_mesh(const EquilibriumSurface& eq, const MeshConfig& cfg);

} // namespace capstokes
