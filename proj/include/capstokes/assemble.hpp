/// @file assemble.hpp
/// @brief Monolithic assembly of the semi-implicit time step: velocity and
///        pressure unknowns plus two scalar multipliers (zero-mean pressure,
///        zero-mean surface trace). The surface unknown is eliminated through
///        the backward-Euler update xi = eta^n + dt (u . N), which turns the
///        surface energy pairing into a dt-scaled velocity-velocity stiffness
///        plus a known load from eta^n.

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "capstokes/geometry.hpp"
#include "capstokes/kernels.hpp"
#include "capstokes/mesh.hpp"
#include "capstokes/params.hpp"

namespace capstokes {

/// Velocity DOFs are 2 per P2 node; wall-normal components are essential
/// (u1 on the side walls, u2 on the floor, both at the floor corners) and
/// eliminated from the system. Pressure is P1 on vertices. The final two
/// unknowns are the pressure-mean and trace-mean multipliers.
struct DofMap {
  int n_nodes = 0;
  int n_vertices = 0;
  std::vector<int> u_free; // size 2*n_nodes; -1 when constrained
  int n_u_free = 0;
  int p_offset = 0;   // = n_u_free
  int lam_p = 0;      // pressure mean multiplier index
  int lam_s = 0;      // trace mean multiplier index
  int total = 0;

  int u_dof(int node, int comp) const { return u_free[2 * node + comp]; }
};

DofMap build_dof_map(const Mesh& mesh);

/// Geometry-independent data cached per mesh: quadrature layouts, shape
/// gradients, equilibrium values at every quadrature point, and the uniform
/// surface-grid trace sampling used by the mass functional.
struct VolQP {
  double x1, x2;
  double zeta0, dzeta0; // equilibrium at x1
  double w;             // quadrature weight times element area
  double grad[6][2];    // physical P2 gradients
  double n2[6];         // P2 values
  double n1[3];         // P1 values
};

struct WallQP {
  double x1, x2;
  double zeta0, dzeta0;
  double w_ds;  // weight times edge length
  double nb[3]; // edge P2 values
  int tau_comp; // tangential velocity component (0 floor, 1 walls)
};

struct TopQP {
  double x1;
  double w_dx1; // weight times dx1 span of the edge
  double dx1;   // edge span in x1
  double zeta0, dzeta0, ddzeta0;
  double nb[3];
  double dnb[3]; // d/dt of the edge basis
};

struct TraceSample {
  int top_edge;  // index into mesh.top order (0..n_surface-1)
  double t;      // edge parameter of the grid point
  double weight; // quadrature weight of the surface-grid mass functional
  double x1;
  double zeta0, dzeta0;
};

struct AssemblyCache {
  const Mesh* mesh = nullptr;
  std::vector<std::vector<VolQP>> elems; // per element
  std::vector<std::vector<WallQP>> wall_edges;
  std::vector<int> wall_edge_index; // into mesh.boundary
  std::vector<std::vector<TopQP>> top_edges;
  std::vector<int> top_edge_index; // into mesh.boundary, left to right
  std::vector<std::array<int, 3>> top_edge_nodes; // (left, mid, right)
  std::vector<TraceSample> trace;  // uniform surface grid, left to right
  std::vector<double> trace_zeta0; // zeta0 at the uniform grid points
};

AssemblyCache build_assembly_cache(const Mesh& mesh,
                                   const EquilibriumSurface& eq,
                                   int eta_grid_n);

/// Optional load modifiers: manufactured forcing terms (default zero) and a
/// predictor field whose slope replaces eta^n in the lagged curvature
/// remainder (Picard corrector; geometry stays at eta^n).
struct AssemblyLoads {
  std::function<std::array<double, 2>(double, double)> body;      // F1(x)
  std::function<std::array<double, 2>(double)> surface_traction;  // F4(x1)
  std::function<double(double, double, BTag)> slip_traction;      // F5
  const SurfaceField* curvature_predictor = nullptr;
};

struct ContactLinearization {
  // kappa_eff = kappa (1 + What'(V0)); shift = kappa (What(V0) - What'(V0) V0).
  std::array<double, 2> kappa_eff{0.0, 0.0}; // [left, right]
  std::array<double, 2> shift{0.0, 0.0};
};

struct SaddleSystem {
  Eigen::SparseMatrix<double> M;
  Eigen::VectorXd rhs;
  DofMap dofs;
};

/// Assembles the full step system at the lagged geometry (fields of eta^n).
/// include_surface_load adds the eta^n elastic load and the lagged curvature
/// remainder load; dt scales the eliminated surface stiffness.
SaddleSystem assemble_system(const AssemblyCache& cache,
                             const GeometryEvaluator& geom,
                             const PhysicalParams& params, double dt,
                             const ContactLinearization& contact,
                             bool include_surface_load = true,
                             const AssemblyLoads* loads = nullptr);

struct SaddleSolution {
  Eigen::VectorXd u;      // full node layout, constrained entries zero
  Eigen::VectorXd p;      // per vertex, zero mean
  double lambda_p = 0.0;
  double lambda_s = 0.0;
  double rel_residual = 0.0;
};

/// Sparse direct solve. Throws SolverError mentioning "inf-sup failure" when
/// the factorization fails or the relative residual exceeds 1e-10.
SaddleSolution solve_saddle(const SaddleSystem& sys);

/// (u . N) evaluated at the uniform surface grid points through the P2 trace;
/// N = (-zeta0' - eta', 1) at the lagged surface.
std::vector<double> sample_trace_velocity(const AssemblyCache& cache,
                                          const GeometryEvaluator& geom,
                                          const Eigen::VectorXd& u);

/// Contact velocities (u . N) at the left/right contact corners.
std::array<double, 2> contact_velocities(const AssemblyCache& cache,
                                         const GeometryEvaluator& geom,
                                         const Eigen::VectorXd& u);

/// Plain H1 Gram matrix of the velocity space (free DOFs only) and plain
/// pressure mass matrix; used by diagnostics and the inf-sup probe.
Eigen::SparseMatrix<double> velocity_h1_gram(const AssemblyCache& cache,
                                             const DofMap& dofs);
Eigen::SparseMatrix<double> pressure_mass(const AssemblyCache& cache,
                                          const DofMap& dofs);
/// Pressure-velocity coupling block alone (rows pressure, cols free u DOFs).
Eigen::SparseMatrix<double> pressure_coupling(const AssemblyCache& cache,
                                              const GeometryEvaluator& geom,
                                              const DofMap& dofs);

/// L2(Sigma_s) Gram of the velocity trace on the slip boundary (free DOFs).
Eigen::SparseMatrix<double> slip_trace_gram(const AssemblyCache& cache,
                                            const DofMap& dofs);

struct DissipationParts {
  double viscous = 0.0; // (mu/2) int |D_A u|^2 J
  double slip = 0.0;    // int beta J |u . tau|^2
  double contact = 0.0; // kappa sum of squared contact velocities
};

DissipationParts dissipation_integrals(const AssemblyCache& cache,
                                       const GeometryEvaluator& geom,
                                       const PhysicalParams& params,
                                       double kappa, const Eigen::VectorXd& u);

} // namespace capstokes
