/// @file norms.hpp
/// @brief Weighted and fractional Sobolev norms, discrete energy/dissipation
///        functionals, decay fitting, and the corner-regularity probe.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

#include "capstokes/assemble.hpp"
#include "capstokes/timestep.hpp"

namespace capstokes {

/// ||f||^2_{W^k_delta} = sum_{|alpha| <= k} int dist(x, corners)^{2 delta}
/// |d^alpha f|^2. delta may be negative (Hardy-side exponents); corner-adjacent
/// elements are integrated by graded subdivision toward the corner.
struct WeightedNormSpec {
  int k = 0;
  double delta = 0.0;
  std::vector<std::array<double, 2>> corners;
};

/// The two contact corners of the mesh.
std::vector<std::array<double, 2>> default_corners(const Mesh& mesh);

/// Piecewise-constant recovered Hessian (f_11, f_12, f_22) per element and
/// component, from a quadratic least-squares fit on the vertex-neighbor patch.
struct HessianField {
  int ncomp = 1;
  std::vector<std::array<double, 3>> h; // elems * ncomp, component-major last
  const std::array<double, 3>& at(int elem, int comp) const {
    return h[elem * ncomp + comp];
  }
};

HessianField recover_hessian_p2(const Mesh& mesh, const Eigen::VectorXd& nodal,
                                int ncomp);

/// Weighted norm of a P2 field with ncomp interleaved components
/// (nodal[ncomp * node + c]). k = 2 requires a recovered Hessian.
double weighted_norm_p2(const Mesh& mesh, const Eigen::VectorXd& nodal,
                        int ncomp, const WeightedNormSpec& spec,
                        const HessianField* hess = nullptr);

/// Weighted norm of a P1 vertex field; k <= 1.
double weighted_norm_p1(const Mesh& mesh, const Eigen::VectorXd& vertex_vals,
                        const WeightedNormSpec& spec);

/// Gagliardo H^{1/2} seminorm on a uniform grid over an interval: cell-pair
/// Gauss quadrature of the (smooth off-diagonal) difference quotient, with
/// diagonal cells replaced by the cell-local Taylor value h^2 f'(mid)^2.
double fractional_seminorm_half(std::span<const double> f, double dx);

/// Full fractional norm on (-ell, ell); s = 1/2 or 3/2 (the latter is the H^1
/// norm plus the H^{1/2} seminorm of f'). Errors on fewer than 8 samples.
double fractional_norm(std::span<const double> f, double ell, double s);

/// H^1((-ell,ell)) squared norm from uniform samples (4th-order differences).
double h1_interval_sq(std::span<const double> f, double dx);

/// Weighted Slobodeckij 1/2-seminorm with dist(., {-ell, ell})^delta at both
/// arguments (trace-space surrogate).
double weighted_fractional_seminorm_half(std::span<const double> f, double ell,
                                         double delta);

/// sum_{j<=k} int dist^{2 delta} |f^{(j)}|^2 on the interval, derivatives by
/// 4th-order differences; k <= 2.
double weighted_interval_sq(std::span<const double> f, double ell, double delta,
                            int k);

/// W^{5/2}_delta surrogate on the interval: weighted derivatives up to 2 plus
/// the weighted 1/2-seminorm of f''. Returns the squared norm.
double weighted_interval_52_sq(std::span<const double> f, double ell,
                               double delta);

/// W^{1/2}_delta surrogate: weighted L^2 plus weighted 1/2-seminorm, squared.
double weighted_interval_12_sq(std::span<const double> f, double ell,
                               double delta);

/// [a, b]_ell = kappa (a_r b_r + a_l b_l).
double contact_bracket(double kappa, double a_left, double a_right,
                       double b_left, double b_right);

/// Plain Sobolev building blocks over the mesh caches (full node layout).
double h1_norm_p2_sq(const AssemblyCache& cache, const Eigen::VectorXd& u,
                     int ncomp);
double l2_trace_slip_sq(const AssemblyCache& cache, const Eigen::VectorXd& u);
double l2_p1_sq(const AssemblyCache& cache, const Eigen::VectorXd& p);

/// Discrete energy/dissipation functionals from the state history rings.
/// Time derivatives are backward differences; orders report how many were
/// available (order j needs j+1 ring entries).
struct EdFunctionals {
  double e_parallel = 0.0;     // sum_j ||d_t^j eta||^2_{H^1}
  double d_bar_parallel = 0.0; // velocity + slip trace + contact brackets
  double d_parallel = 0.0;     // + pressure L2 + eta H^{3/2}
  double d_full = 0.0;         // + weighted surrogates
  bool third_order_valid = false;
  int eta_orders = 0; // j = 0 .. eta_orders-1 included
  int u_orders = 0;
};

EdFunctionals ed_functionals(const AssemblyCache& cache,
                             const SimulationState& state, double dt,
                             double kappa, double delta);

struct DecayFit {
  double lambda = 0.0;
  double r_squared = 0.0;
  int n_used = 0;
};

/// Least-squares line on log(values) vs times over the trailing 80% of the
/// series; lambda = -slope. Errors on non-positive samples or fewer than 10
/// usable points.
DecayFit decay_fit(std::span<const double> times,
                   std::span<const double> values);

/// Steady one-step solves across refinement levels; reports the weighted
/// second-derivative norm of u on fixed-radius corner patches per delta.
struct CornerProbeConfig {
  int base_n = 8;
  int levels = 4;
  std::vector<double> deltas;
  double dt = 1e-2;
  int mode_k = 2;
  double amplitude_rel = 0.02; // of min zeta0
  double patch_radius = 0.0;   // 0 selects ell / 8
  int eta_grid = 128;
  double depth = 1.0;
  double grading = 3.0; // corner grading for the probe meshes
};

struct CornerProbeRow {
  int level = 0;
  int n_surface = 0;
  double delta = 0.0;
  double value = 0.0; // ||D^2 u||_{W^0_delta(patch)}
};

std::vector<CornerProbeRow> corner_probe(const PhysicalParams& params,
                                         const EquilibriumSurface& eq,
                                         const CornerProbeConfig& cfg);

} // namespace capstokes
