#include "capstokes/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "capstokes/csvio.hpp"
#include "capstokes/errors.hpp"
#include "capstokes/quadrature.hpp"
#include "capstokes/rootfind.hpp"

namespace capstokes {

namespace {

inline double sgn(double v) { return (v > 0) - (v < 0); }

/// 6th-order first derivative of uniform samples; 7-point skewed stencils at
/// the three nodes nearest each end keep the order uniform. A uniform order
/// matters because mean_curvature composes two passes: any jump in the
/// truncation-error constant between neighbouring rows is differentiated by
/// the second pass and would cost three orders at the seam.
std::vector<double> diff6(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  if (n < 5) throw ValidationError("finite differences need >= 5 samples");
  std::vector<double> d(n);
  if (n < 7) {
    // Short series fall back to the 4th-order rule.
    const double s = 1.0 / (12.0 * dx);
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * s;
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * s;
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) * s;
    d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] -
                f[n - 5]) * s;
    d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] +
                3 * f[n - 5]) * s;
    return d;
  }
  const double s = 1.0 / (60.0 * dx);
  d[0] = (-147 * f[0] + 360 * f[1] - 450 * f[2] + 400 * f[3] - 225 * f[4] +
          72 * f[5] - 10 * f[6]) * s;
  d[1] = (-10 * f[0] - 77 * f[1] + 150 * f[2] - 100 * f[3] + 50 * f[4] -
          15 * f[5] + 2 * f[6]) * s;
  d[2] = (2 * f[0] - 24 * f[1] - 35 * f[2] + 80 * f[3] - 30 * f[4] +
          8 * f[5] - f[6]) * s;
  for (std::size_t i = 3; i + 3 < n; ++i)
    d[i] = (-f[i - 3] + 9 * f[i - 2] - 45 * f[i - 1] + 45 * f[i + 1] -
            9 * f[i + 2] + f[i + 3]) * s;
  d[n - 3] = -(2 * f[n - 1] - 24 * f[n - 2] - 35 * f[n - 3] + 80 * f[n - 4] -
               30 * f[n - 5] + 8 * f[n - 6] - f[n - 7]) * s;
  d[n - 2] = -(-10 * f[n - 1] - 77 * f[n - 2] + 150 * f[n - 3] -
               100 * f[n - 4] + 50 * f[n - 5] - 15 * f[n - 6] +
               2 * f[n - 7]) * s;
  d[n - 1] = -(-147 * f[n - 1] + 360 * f[n - 2] - 450 * f[n - 3] +
               400 * f[n - 4] - 225 * f[n - 5] + 72 * f[n - 6] -
               10 * f[n - 7]) * s;
  return d;
}

/// int_0^z cos(psi)/sqrt(c - cos(psi)) dpsi for c > 1. The substitution
/// psi = sqrt(2(c-1)) sinh(theta) resolves the boundary layer at psi = 0:
/// c - cos(psi) = (c-1) + 2 sin^2(psi/2) ~ (c-1) cosh^2(theta), so the
/// transformed integrand is uniformly smooth in theta (nearest complex
/// singularity at |Im theta| ~ pi/2 independent of c) and short composite
/// Gauss-Legendre panels converge geometrically for every c.
double xi_core(double c, double z) {
  if (z == 0.0) return 0.0;
  const double sign = z > 0.0 ? 1.0 : -1.0;
  const double az = std::abs(z);
  const double scale = std::sqrt(2.0 * (c - 1.0));
  const double theta_max = std::asinh(az / scale);
  const int n_panels = std::max(2, static_cast<int>(std::ceil(theta_max / 0.7)));
  const auto& [gx, gw] = gauss_legendre(16);
  double sum = 0.0;
  for (int pn = 0; pn < n_panels; ++pn) {
    const double a = theta_max * pn / n_panels;
    const double b = theta_max * (pn + 1) / n_panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < 16; ++i) {
      const double th = mid + half * gx[i];
      const double psi = scale * std::sinh(th);
      const double sh = std::sin(0.5 * psi);
      const double root = std::sqrt((c - 1.0) + 2.0 * sh * sh);
      sum += gw[i] * half * std::cos(psi) / root * scale * std::cosh(th);
    }
  }
  return sign * sum;
}

} // namespace

double h_of(const PhysicalParams& p, double r) {
  if (!(r > 1.0)) throw ValidationError("h(r) requires r > 1");
  const double zstar = std::asin(std::abs(p.gamma_jump) / p.sigma);
  return xi_core(r, zstar);
}

ComputeCResult compute_C(const PhysicalParams& p) {
  if (p.gamma_jump == 0.0) return {true, 0.0};
  const double target = p.ell * std::sqrt(2.0 * p.g / p.sigma);
  auto f = [&](double r) { return h_of(p, r) - target; };

  // h decreases from +inf at r -> 1+ to 0 at r -> inf; expand a bracket.
  double lo = 1.0 + 1e-3;
  while (f(lo) < 0.0) {
    lo = 1.0 + (lo - 1.0) / 16.0;
    if (lo - 1.0 < 1e-15)
      throw SolverError("shape constant bracket collapsed at r -> 1");
  }
  double hi = 2.0;
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("shape constant bracket diverged");
  }
  double c = bisect(f, lo, hi, 1e-8);
  c = secant_refine(f, c - 5e-9, c + 5e-9, 5, lo, hi);
  return {false, c};
}

double xi_map(const PhysicalParams& p, double c, double z) {
  return std::sqrt(p.sigma / (2.0 * p.g)) * xi_core(c, z);
}

double xi_inverse(const PhysicalParams& p, double c, double x) {
  const double zstar = std::asin(std::abs(p.gamma_jump) / p.sigma);
  if (x <= -p.ell) return -zstar;
  if (x >= p.ell) return zstar;
  auto f = [&](double z) { return xi_map(p, c, z) - x; };
  double z = bisect(f, -zstar, zstar, 1e-11);
  // Newton polish with the analytic integrand value Xi'(z).
  for (int it = 0; it < 2; ++it) {
    double dxi = std::sqrt(p.sigma / (2.0 * p.g)) * std::cos(z) /
                 std::sqrt(c - std::cos(z));
    double zn = z - f(z) / dxi;
    if (zn >= -zstar && zn <= zstar) z = zn;
  }
  return z;
}

namespace {

struct ChiEval {
  double chi, dchi, ddchi;
};

/// chi(x) and derivatives from the reparametrized closed form:
/// chi = sgn(gamma) sqrt(2 sigma/g) sqrt(C - cos z), z = Xi^{-1}(x),
/// chi' = sgn(gamma) tan z, chi'' = (g/sigma) chi (1 + chi'^2)^{3/2}.
ChiEval chi_at(const PhysicalParams& p, double c, double x) {
  const double z = xi_inverse(p, c, x);
  const double s = sgn(p.gamma_jump);
  ChiEval e;
  e.chi = s * std::sqrt(2.0 * p.sigma / p.g) * std::sqrt(c - std::cos(z));
  e.dchi = s * std::tan(z);
  const double w = 1.0 + e.dchi * e.dchi;
  e.ddchi = (p.g / p.sigma) * e.chi * w * std::sqrt(w);
  return e;
}

} // namespace

double EquilibriumSurface::zeta0_at(double x1) const {
  if (flat) return min_zeta0;
  return chi_at(params, c_const, x1).chi + chi_lift;
}

double EquilibriumSurface::dzeta0_at(double x1) const {
  if (flat) return 0.0;
  return chi_at(params, c_const, x1).dchi;
}

double EquilibriumSurface::ddzeta0_at(double x1) const {
  if (flat) return 0.0;
  return chi_at(params, c_const, x1).ddchi;
}

EquilibriumSurface build_equilibrium(const PhysicalParams& p, int n) {
  p.validate();
  if (n < 8) throw ValidationError("equilibrium grid needs n >= 8 intervals");

  EquilibriumSurface s;
  s.params = p;
  s.n = n;
  s.dx = 2.0 * p.ell / n;
  s.x.resize(n + 1);
  for (int j = 0; j <= n; ++j) s.x[j] = -p.ell + j * s.dx;

  ComputeCResult cc = compute_C(p);
  s.flat = cc.flat;
  s.p0 = (p.g * p.m_top - 2.0 * p.gamma_jump) / (2.0 * p.ell);

  if (s.flat) {
    const double level = p.m_top / (2.0 * p.ell);
    s.c_const = std::numeric_limits<double>::quiet_NaN();
    s.zstar = 0.0;
    s.m_min = 0.0;
    s.min_zeta0 = level;
    s.omega = M_PI / 2.0;
    s.zeta0.assign(n + 1, level);
    s.dzeta0.assign(n + 1, 0.0);
    s.ddzeta0.assign(n + 1, 0.0);
  } else {
    s.c_const = cc.c;
    s.zstar = std::asin(std::abs(p.gamma_jump) / p.sigma);

    // int chi dx = 2 gamma / g exactly: substituting x = Xi(z) gives
    // chi(Xi(z)) Xi'(z) = sgn(gamma) (sigma/g) cos z, whose integral over
    // [-z*, z*] telescopes to (sigma/g) 2 sin(z*) sgn(gamma) = 2 gamma / g.
    const double amp = std::sqrt(2.0 * p.sigma / p.g);
    const double chi_min =
        (p.gamma_jump > 0.0)
            ? amp * std::sqrt(cc.c - 1.0)                  // center value
            : -amp * std::sqrt(cc.c - std::cos(s.zstar));  // wall value
    s.m_min = 2.0 * p.gamma_jump / p.g - 2.0 * p.ell * chi_min;

    if (!(p.m_top > s.m_min))
      throw ValidationError("insufficient mass: m_top must exceed m_min");
    s.min_zeta0 = (p.m_top - s.m_min) / (2.0 * p.ell);

    s.zeta0.resize(n + 1);
    s.dzeta0.resize(n + 1);
    s.ddzeta0.resize(n + 1);
    s.chi_lift = s.min_zeta0 - chi_min;
    const double lift = s.chi_lift;
    for (int j = 0; j <= n; ++j) {
      ChiEval e = chi_at(p, cc.c, s.x[j]);
      s.zeta0[j] = e.chi + lift;
      s.dzeta0[j] = e.dchi;
      // g zeta0 - sigma H(zeta0) = p0 gives the second derivative directly.
      const double w = 1.0 + e.dchi * e.dchi;
      s.ddzeta0[j] = (p.g * s.zeta0[j] - s.p0) * w * std::sqrt(w) / p.sigma;
    }

    // Interior wedge angle at the contact corners. Both corners share it by
    // evenness; the right-endpoint slope gives cos(omega) = gamma/sigma.
    const double sr = s.dzeta0[n];
    s.omega = std::acos(sr / std::sqrt(1.0 + sr * sr));
  }

  if (s.flat) s.omega = M_PI / 2.0;
  s.theta_eq = M_PI - s.omega;
  s.delta_omega = std::max(0.0, 2.0 - M_PI / s.omega);

  if (!(s.min_zeta0 > 0.0))
    throw ValidationError("insufficient mass: equilibrium surface touches the vessel floor");
  if (s.zeta0.front() >= p.wall_height || s.zeta0.back() >= p.wall_height)
    throw ValidationError("equilibrium spills over the vessel wall");
  return s;
}

std::vector<double> mean_curvature(std::span<const double> zeta, double dx) {
  std::vector<double> d1 = diff6(zeta, dx);
  for (double& v : d1) v = v / std::sqrt(1.0 + v * v);
  return diff6(d1, dx);
}

double energy_functional(const PhysicalParams& p, std::span<const double> zeta,
                         double dx) {
  std::vector<double> d1 = diff6(zeta, dx);
  std::vector<double> density(zeta.size());
  for (std::size_t j = 0; j < zeta.size(); ++j)
    density[j] = 0.5 * p.g * zeta[j] * zeta[j] +
                 p.sigma * std::sqrt(1.0 + d1[j] * d1[j]);
  double bulk = simpson_integrate(density, dx);
  return bulk - p.gamma_jump * (zeta.front() + zeta.back());
}

EquilibriumResidual equilibrium_residual(const EquilibriumSurface& s) {
  const PhysicalParams& p = s.params;
  EquilibriumResidual r{0.0, 0.0, 0.0};

  std::vector<double> curv = mean_curvature(s.zeta0, s.dx);
  for (std::size_t j = 0; j < s.zeta0.size(); ++j)
    r.ode_res = std::max(r.ode_res,
                         std::abs(p.g * s.zeta0[j] - p.sigma * curv[j] - s.p0));

  std::vector<double> d1 = diff6(s.zeta0, s.dx);
  auto flux = [](double v) { return v / std::sqrt(1.0 + v * v); };
  r.bc_res = std::max(std::abs(p.sigma * flux(d1.front()) + p.gamma_jump),
                      std::abs(p.sigma * flux(d1.back()) - p.gamma_jump));

  r.mass_res = std::abs(simpson_integrate(s.zeta0, s.dx) - p.m_top);
  return r;
}

void export_equilibrium_csv(const EquilibriumSurface& s, std::ostream& out) {
  const PhysicalParams& p = s.params;
  out << "# equilibrium surface profile\n";
  out << "# g=" << format_double(p.g) << " sigma=" << format_double(p.sigma)
      << " gamma_jump=" << format_double(p.gamma_jump)
      << " ell=" << format_double(p.ell)
      << " m_top=" << format_double(p.m_top)
      << " wall_height=" << format_double(p.wall_height) << "\n";
  out << "# p0=" << format_double(s.p0) << " m_min=" << format_double(s.m_min)
      << " omega=" << format_double(s.omega)
      << " delta_omega=" << format_double(s.delta_omega)
      << " min_zeta0=" << format_double(s.min_zeta0);
  if (!s.flat) out << " c_const=" << format_double(s.c_const);
  out << "\n";
  out << "x,zeta0,dzeta0,ddzeta0\n";
  for (int j = 0; j <= s.n; ++j)
    out << format_double(s.x[j]) << ',' << format_double(s.zeta0[j]) << ','
        << format_double(s.dzeta0[j]) << ',' << format_double(s.ddzeta0[j])
        << "\n";
}

} // namespace capstokes
