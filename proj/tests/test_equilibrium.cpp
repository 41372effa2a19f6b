/// @file test_equilibrium.cpp
/// @brief Equilibrium module tests: shape constant against an independent
///        quadrature+bisection oracle, profile identities, residual decay,
///        energy minimality, and input validation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "capstokes/equilibrium.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/params.hpp"
#include "oracles.hpp"

using namespace capstokes;

namespace {

PhysicalParams base_params(double gamma, double m_top = 3.0,
                           double wall_height = 6.0) {
  PhysicalParams p;
  p.g = 1.0;
  p.sigma = 1.0;
  p.gamma_jump = gamma;
  p.ell = 1.0;
  p.m_top = m_top;
  p.wall_height = wall_height;
  return p;
}

// Reference h(r) = int_0^{z*} cos(psi) / sqrt(r - cos(psi)) dpsi built only
// from the test-side Gauss-Legendre rule.
double h_oracle(const PhysicalParams& p, double r) {
  const double zstar = std::asin(std::abs(p.gamma_jump) / p.sigma);
  return oracle::gl_integrate(
      [r](double psi) { return std::cos(psi) / std::sqrt(r - std::cos(psi)); },
      0.0, zstar, 64);
}

} // namespace

TEST_CASE("flat branch flags and shape constant existence") {
  CHECK(compute_C(base_params(0.0)).flat);
  const ComputeCResult cr = compute_C(base_params(0.5));
  CHECK_FALSE(cr.flat);
  CHECK(cr.c > 1.0);
}

TEST_CASE("h is strictly decreasing in r") {
  const PhysicalParams p = base_params(0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(1.02, 10.0);
  for (int i = 0; i < 200; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(h_of(p, a) > h_of(p, b));
  }
}

TEST_CASE("shape constant solves the oracle height equation") {
  const PhysicalParams p = base_params(0.5);
  const ComputeCResult cr = compute_C(p);
  const double target = p.ell * std::sqrt(2.0 * p.g / p.sigma);

  // Library value satisfies the equation measured by the oracle quadrature.
  CHECK(std::abs(h_oracle(p, cr.c) - target) <= 1e-10);

  // Fully independent root: bracket by scanning, then bisection.
  double lo = 1.01;
  while (h_oracle(p, lo) < target) lo = 1.0 + 0.5 * (lo - 1.0);
  double hi = lo + 1.0;
  while (h_oracle(p, hi) > target) hi *= 2.0;
  const double c_ref = oracle::bisect(
      [&](double r) { return h_oracle(p, r) - target; }, lo, hi);
  CHECK(std::abs(c_ref - cr.c) <= 1e-9);
}

TEST_CASE("xi map is odd, zero at zero, and inverts") {
  const PhysicalParams p = base_params(0.5);
  const ComputeCResult cr = compute_C(p);
  const double zstar = std::asin(0.5);
  CHECK(xi_map(p, cr.c, 0.0) == 0.0);
  for (int i = 1; i <= 20; ++i) {
    const double z = zstar * i / 21.0;
    const double x = xi_map(p, cr.c, z);
    CHECK(std::abs(xi_map(p, cr.c, -z) + x) <= 1e-12);
    CHECK(std::abs(xi_inverse(p, cr.c, x) - z) <= 1e-10);
  }
}

TEST_CASE("flat profile closed forms") {
  PhysicalParams p = base_params(0.0, 2.0, 4.0);
  const EquilibriumSurface eq = build_equilibrium(p);
  CHECK(eq.flat);
  for (int j = 0; j <= eq.n; ++j) {
    CHECK(std::abs(eq.zeta0[j] - 1.0) <= 1e-14);
    CHECK(std::abs(eq.dzeta0[j]) <= 1e-14);
    CHECK(std::abs(eq.ddzeta0[j]) <= 1e-14);
  }
  CHECK(std::abs(eq.p0 - 1.0) <= 1e-14);
  CHECK(std::abs(eq.omega - M_PI / 2.0) <= 1e-14);
  CHECK(std::abs(eq.theta_eq - M_PI / 2.0) <= 1e-14);
  CHECK(eq.delta_omega == 0.0);
  const EquilibriumResidual res = equilibrium_residual(eq);
  CHECK(res.ode_res <= 1e-12);
  CHECK(res.bc_res <= 1e-12);
  CHECK(res.mass_res <= 1e-12);
  CHECK(std::abs(energy_functional(p, eq.zeta0, eq.dx) - 3.0) <= 1e-12);

  std::vector<double> zero(eq.zeta0.size(), 0.0);
  CHECK(std::abs(energy_functional(p, zero, eq.dx) - 2.0 * p.ell * p.sigma) <=
        1e-12);
}

TEST_CASE("contact angle and corner exponent at gamma = -1/2") {
  const EquilibriumSurface eq = build_equilibrium(base_params(-0.5));
  CHECK(std::abs(eq.omega - 2.0 * M_PI / 3.0) <= 1e-8);
  CHECK(std::abs(eq.delta_omega - 0.5) <= 1e-8);
  CHECK(std::abs(eq.theta_eq - M_PI / 3.0) <= 1e-8);
  CHECK(std::abs(std::cos(eq.theta_eq) + eq.params.gamma_jump /
                                             eq.params.sigma) <= 1e-8);
}

TEST_CASE("curved profile satisfies the pointwise shape identity") {
  const EquilibriumSurface eq = build_equilibrium(base_params(0.5));
  const PhysicalParams& p = eq.params;
  for (int j = 0; j <= eq.n; ++j) {
    const double chi = eq.zeta0[j] - eq.chi_lift;
    const double z = xi_inverse(p, eq.c_const, eq.x[j]);
    const double lhs = std::cos(z);
    const double rhs = eq.c_const - 0.5 * (p.g / p.sigma) * chi * chi;
    CHECK(std::abs(lhs - rhs) <= 1e-9);
    // Slope angle matches the stored derivative.
    CHECK(std::abs(std::tan(z) - eq.dzeta0[j]) <= 1e-8 * (1.0 + std::abs(eq.dzeta0[j])));
  }
}

TEST_CASE("curved residuals at production resolution") {
  for (double gamma : {-0.8, -0.3, 0.3, 0.8}) {
    const EquilibriumSurface eq = build_equilibrium(base_params(gamma));
    const EquilibriumResidual res = equilibrium_residual(eq);
    CAPTURE(gamma);
    CHECK(res.ode_res <= 1e-8);
    CHECK(res.bc_res <= 1e-8);
    CHECK(res.mass_res <= 1e-8);
  }
}

TEST_CASE("residuals decay with grid refinement") {
  std::vector<double> hs, errs;
  for (int n : {32, 64, 128, 256}) {
    const EquilibriumSurface eq = build_equilibrium(base_params(0.6), n);
    const EquilibriumResidual res = equilibrium_residual(eq);
    hs.push_back(2.0 / n);
    errs.push_back(res.ode_res);
  }
  const double order = oracle::fit_order(hs, errs);
  CAPTURE(order);
  CHECK(order >= 3.5); // high-order differences; slack for one-sided rows
  CHECK(errs.back() < errs.front());
}

TEST_CASE("mean curvature of simple profiles") {
  const int n = 512;
  const double ell = 1.0, dx = 2.0 * ell / n;
  std::vector<double> constant(n + 1, 2.0), linear(n + 1), wave(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double x = -ell + j * dx;
    linear[j] = 0.3 * x + 1.0;
    wave[j] = 1e-3 * std::sin(M_PI * x / ell);
  }
  // Two difference passes amplify rounding by ~1/dx^2; the bound reflects
  // that floor, not truncation error (exact for polynomial slopes).
  for (double v : mean_curvature(constant, dx)) CHECK(std::abs(v) <= 1e-9);
  for (double v : mean_curvature(linear, dx)) CHECK(std::abs(v) <= 1e-8);
  const std::vector<double> hw = mean_curvature(wave, dx);
  for (int j = 0; j <= n; ++j) {
    const double x = -ell + j * dx;
    // Small amplitude: curvature ~ second derivative.
    const double expect = -1e-3 * (M_PI / ell) * (M_PI / ell) *
                          std::sin(M_PI * x / ell);
    CHECK(std::abs(hw[j] - expect) <= 1e-7);
  }
}

TEST_CASE("equilibrium minimizes the energy among mass-preserving shapes") {
  for (double gamma : {-0.6, 0.0, 0.6}) {
    const EquilibriumSurface eq = build_equilibrium(base_params(gamma), 512);
    const double e0 = energy_functional(eq.params, eq.zeta0, eq.dx);
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> amp(-0.05, 0.05);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> pert = eq.zeta0;
      for (int k = 1; k <= 4; ++k) {
        const double a = amp(rng);
        for (int j = 0; j <= eq.n; ++j) {
          // cos(pi k (x + ell) / (2 ell)) modes have exactly zero mean.
          pert[j] += a * std::cos(M_PI * k * (eq.x[j] + eq.params.ell) /
                                  (2.0 * eq.params.ell));
        }
      }
      const double e1 = energy_functional(eq.params, pert, eq.dx);
      CAPTURE(gamma);
      CAPTURE(trial);
      CHECK(e0 <= e1 + 1e-13);
    }
  }
}

TEST_CASE("csv export shape") {
  const EquilibriumSurface eq = build_equilibrium(base_params(0.3), 64);
  std::ostringstream os;
  export_equilibrium_csv(eq, os);
  std::istringstream is(os.str());
  std::string line;
  int comments = 0, rows = 0;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') {
      ++comments;
    } else if (line == "x,zeta0,dzeta0,ddzeta0") {
      saw_header = true;
    } else if (!line.empty()) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 3);
    }
  }
  CHECK(saw_header);
  CHECK(comments >= 2);
  CHECK(rows == eq.n + 1);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS((void)h_of(base_params(0.5), 1.0), ValidationError);
  CHECK_THROWS_AS((void)h_of(base_params(0.5), 0.5), ValidationError);

  PhysicalParams starved = base_params(-0.8);
  starved.m_top = 0.05; // below the minimal mass for this wetting strength
  CHECK_THROWS_AS((void)build_equilibrium(starved), ValidationError);

  PhysicalParams spill = base_params(0.8);
  spill.wall_height = 1.0; // profile rises above the rim
  spill.m_top = 3.0;
  CHECK_THROWS_AS((void)build_equilibrium(spill), ValidationError);

  std::vector<double> tiny{1.0, 2.0};
  CHECK_THROWS_AS((void)mean_curvature(tiny, 0.1), ValidationError);

  PhysicalParams bad = base_params(0.0);
  bad.g = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = base_params(0.0);
  bad.gamma_jump = 1.5; // |gamma| >= sigma has no contact angle
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
