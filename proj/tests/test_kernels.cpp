/// @file test_kernels.cpp
/// @brief Kernel tests: the curvature remainder R and its antiderivative Q
///        against direct oracle quadrature, the proposition ratio bounds on a
///        compact window, and the contact response family.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "capstokes/errors.hpp"
#include "capstokes/kernels.hpp"
#include "capstokes/params.hpp"
#include "oracles.hpp"

using namespace capstokes;

namespace {

// Direct quadrature of the defining integral
// R(y, z) = int_0^z 3 (s - z)(s + y) (1 + (y + s)^2)^(-5/2) ds,
// independent of both library evaluation routes.
double R_oracle(double y, double z) {
  if (z == 0.0) return 0.0;
  return oracle::gl_integrate(
      [y, z](double s) {
        const double w = y + s;
        return 3.0 * (s - z) * (s + y) * std::pow(1.0 + w * w, -2.5);
      },
      0.0, z, 8);
}

ResponseFunction tab_cubic(int n = 160) {
  std::vector<double> z, v;
  for (int i = 0; i <= n; ++i) {
    const double zz = -1.0 + 2.0 * i / n;
    z.push_back(zz);
    v.push_back(zz + zz * zz * zz);
  }
  return ResponseFunction::tabulated(z, v);
}

} // namespace

TEST_CASE("R vanishes identically at z = 0") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(R_eval(dist(rng), 0.0) == 0.0);
  }
  CHECK(Q_eval(3.7, 0.0) == 0.0);
}

TEST_CASE("closed form R at a hand-checked point") {
  // R(0,1) = 1/sqrt(2) - 0 - 1 from the defining decomposition.
  CHECK(std::abs(R_eval(0.0, 1.0) - (1.0 / std::sqrt(2.0) - 1.0)) <= 1e-15);
}

TEST_CASE("closed form agrees with the library quadrature route") {
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double y = -2.0 + 4.0 * i / 49.0;
      const double z = -2.0 + 4.0 * j / 49.0;
      CHECK(std::abs(R_eval(y, z) - R_integral_form(y, z)) <= 1e-10);
    }
  }
}

TEST_CASE("closed form agrees with the oracle quadrature") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dy(-4.0, 4.0), dz(-2.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const double y = dy(rng), z = dz(rng);
    CHECK(std::abs(R_eval(y, z) - R_oracle(y, z)) <= 1e-12);
  }
}

TEST_CASE("Q is the antiderivative of R") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dy(-3.0, 3.0), dz(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double y = dy(rng), z = dz(rng);
    // Independent route: integrate the oracle R from 0 to z.
    const double q_ref = oracle::gl_integrate(
        [y](double s) { return R_oracle(y, s); }, 0.0, z, 4);
    CHECK(std::abs(Q_eval(y, z) - q_ref) <= 1e-11);
    // Derivative route: centered difference of Q recovers R.
    const double h = 1e-5;
    const double dq = (Q_eval(y, z + h) - Q_eval(y, z - h)) / (2.0 * h);
    CHECK(std::abs(dq - R_eval(y, z)) <= 1e-7);
  }
}

TEST_CASE("proposition ratio bounds hold on the compact window") {
  // |Q/z^3|, |R/z^2|, |R_z/z|, |R_y/z^2| stay bounded; the caps below are
  // empirical with at least 2x margin over the measured maxima.
  double q3 = 0.0, r2 = 0.0, rz1 = 0.0, ry2 = 0.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double y = -5.0 + 10.0 * i / 100.0;
      double z = -5.0 + 10.0 * j / 100.0;
      if (std::abs(z) < 1e-3) continue; // avoid rounding-dominated ratios
      q3 = std::max(q3, std::abs(Q_eval(y, z) / (z * z * z)));
      r2 = std::max(r2, std::abs(R_eval(y, z) / (z * z)));
      rz1 = std::max(rz1, std::abs(R_dz(y, z) / z));
      ry2 = std::max(ry2, std::abs(R_dy(y, z) / (z * z)));
    }
  }
  CAPTURE(q3);
  CAPTURE(r2);
  CAPTURE(rz1);
  CAPTURE(ry2);
  CHECK(q3 <= 2.0);
  CHECK(r2 <= 2.0);
  CHECK(rz1 <= 2.0);
  CHECK(ry2 <= 3.0);
}

TEST_CASE("partial derivatives of R match finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dy(-3.0, 3.0), dz(-1.5, 1.5);
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double y = dy(rng), z = dz(rng);
    const double fz = (R_eval(y, z + h) - R_eval(y, z - h)) / (2.0 * h);
    const double fy = (R_eval(y + h, z) - R_eval(y - h, z)) / (2.0 * h);
    CHECK(std::abs(fz - R_dz(y, z)) <= 1e-7);
    CHECK(std::abs(fy - R_dy(y, z)) <= 1e-7);
  }
}

TEST_CASE("linear response has trivial hat function") {
  const ResponseFunction lin = ResponseFunction::linear(2.5);
  CHECK(kappa_of(lin) == 2.5);
  const WHat what(lin);
  CHECK(what.is_linear());
  for (double z : {-1.0, -0.1, 0.0, 0.3, 2.0}) {
    CHECK(what.eval(z) == 0.0);
    CHECK(what.deriv(z) == 0.0);
  }
  CHECK(W_of(lin, 0.4) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sinh response slope and quadratic remainder") {
  const ResponseFunction sh = ResponseFunction::sinh_law(2.0, 3.0);
  CHECK(std::abs(kappa_of(sh) - 1.0 / 6.0) <= 1e-12);
  const WHat what(sh);
  CHECK_FALSE(what.is_linear());
  CHECK(what.eval(0.0) == 0.0);
  double worst_ratio = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double z = 0.5 * i / 100.0;
    worst_ratio = std::max(worst_ratio, std::abs(what.eval(z)) / (z * z));
    worst_ratio = std::max(worst_ratio, std::abs(what.eval(-z)) / (z * z));
    // Leading term of 2 asinh(z/2) - z is -z^3/24.
    if (z <= 0.05) {
      CHECK(std::abs(what.eval(z) + z * z * z / 24.0) <= 1e-8);
    }
    const double h = 1e-6;
    const double fd = (what.eval(z + h) - what.eval(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - what.deriv(z)) <= 1e-8);
  }
  CAPTURE(worst_ratio);
  CHECK(worst_ratio <= 0.05); // |WHat(z)| <= K z^2 with small K near 0
}

TEST_CASE("tabulated response inverts its table") {
  const ResponseFunction tab = tab_cubic();
  // Accuracy is limited by the monotone cubic interpolant on the table,
  // not by the slope recovery itself.
  CHECK(std::abs(kappa_of(tab) - 1.0) <= 1e-3);
  // V(W(v)) = v across the covered force range.
  for (int i = 0; i <= 50; ++i) {
    const double v = -1.9 + 3.8 * i / 50.0;
    const double z = W_of(tab, v);
    CHECK(std::abs(tab.eval_v(z) - v) <= 1e-9);
  }
  CHECK_THROWS_AS((void)W_of(tab, 5.0), ValidationError);
  CHECK_THROWS_AS((void)W_of(tab, -5.0), ValidationError);
}

TEST_CASE("tabulated response from csv round trip") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "capstokes_resp_test.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    out << "z,V\n";
    for (int i = 0; i <= 160; ++i) {
      const double z = -1.0 + 2.0 * i / 160.0;
      out << z << "," << (z + z * z * z) << "\n";
    }
  }
  const ResponseFunction tab = ResponseFunction::from_csv(path.string());
  const ResponseFunction ref = tab_cubic();
  for (int i = 0; i <= 20; ++i) {
    const double z = -0.95 + 1.9 * i / 20.0;
    CHECK(std::abs(tab.eval_v(z) - ref.eval_v(z)) <= 1e-12);
  }
  fs::remove(path);
}

TEST_CASE("response validation rejects malformed tables") {
  std::vector<double> z{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> bad_v{-2.0, -0.4, 0.0, -0.1, 2.0}; // not increasing
  CHECK_THROWS_AS((void)ResponseFunction::tabulated(z, bad_v),
                  ValidationError);

  std::vector<double> off_v{-2.0, -0.4, 0.1, 0.5, 2.0}; // V(0) != 0
  CHECK_THROWS_AS((void)ResponseFunction::tabulated(z, off_v),
                  ValidationError);

  std::vector<double> pos_z{0.5, 1.0, 1.5, 2.0};
  std::vector<double> pos_v{0.5, 1.0, 1.5, 2.0}; // does not bracket z = 0
  CHECK_THROWS_AS((void)ResponseFunction::tabulated(pos_z, pos_v),
                  ValidationError);

  CHECK_THROWS_AS((void)ResponseFunction::linear(0.0), ValidationError);
  CHECK_THROWS_AS((void)ResponseFunction::sinh_law(-1.0, 2.0),
                  ValidationError);
}
