#include "capstokes/kernels.hpp"

#include <cmath>

#include "capstokes/errors.hpp"
#include "capstokes/quadrature.hpp"
#include "capstokes/rootfind.hpp"

namespace capstokes {

namespace {
inline double slope_fn(double t) { return t / std::sqrt(1.0 + t * t); }
inline double slope_d1(double t) { return std::pow(1.0 + t * t, -1.5); }
} // namespace

double R_eval(double y, double z) {
  return slope_fn(y + z) - slope_fn(y) - z * slope_d1(y);
}

double R_dz(double y, double z) { return slope_d1(y + z) - slope_d1(y); }

double R_dy(double y, double z) {
  return R_dz(y, z) + 3.0 * y * z * std::pow(1.0 + y * y, -2.5);
}

double R_integral_form(double y, double z) {
  auto integrand = [y, z](double s) {
    return 3.0 * (s - z) * (s + y) * std::pow(1.0 + (y + s) * (y + s), -2.5);
  };
  return integrate(integrand, 0.0, z);
}

double Q_eval(double y, double z) {
  // Antiderivative of R in its second argument: with F(t) = sqrt(1 + t^2),
  // int_0^z R(y, r) dr = F(y+z) - F(y) - z F'(y) - z^2/2 F''(y).
  const double fy = std::sqrt(1.0 + y * y);
  const double fyz = std::sqrt(1.0 + (y + z) * (y + z));
  return fyz - fy - z * slope_fn(y) - 0.5 * z * z * slope_d1(y);
}

double W_of(const ResponseFunction& response, double v) {
  switch (response.kind) {
    case ResponseKind::Linear:
      return response.kappa0 * v;
    case ResponseKind::Sinh:
      return std::asinh(v / response.A) / response.B;
    case ResponseKind::Tabulated: {
      const MonotoneCubic& interp = response.interpolant();
      double v_lo = interp.eval(interp.x_min());
      double v_hi = interp.eval(interp.x_max());
      if (v < v_lo || v > v_hi)
        throw ValidationError("tabulated response inversion out of range");
      double z_lo = interp.x_min();
      double z_hi = interp.x_max();
      auto f = [&](double zz) { return interp.eval(zz) - v; };
      double span = z_hi - z_lo;
      double z = bisect(f, z_lo, z_hi, 1e-12 * span);
      for (int it = 0; it < 2; ++it) { // Newton polish on the monotone cubic
        double step = f(z) / interp.deriv(z);
        double zn = z - step;
        if (zn >= z_lo && zn <= z_hi) z = zn;
      }
      return z;
    }
  }
  return 0.0;
}

double kappa_of(const ResponseFunction& response) {
  switch (response.kind) {
    case ResponseKind::Linear:
      return response.kappa0;
    case ResponseKind::Sinh:
      return 1.0 / (response.A * response.B);
    case ResponseKind::Tabulated: {
      double v_lo = response.table_v.front();
      double v_hi = response.table_v.back();
      double h = 3e-3 * std::min(-v_lo, v_hi);
      if (!(h > 0.0))
        throw ValidationError("tabulated response must straddle V = 0");
      auto W = [&](double v) { return W_of(response, v); };
      double kappa =
          (8.0 * (W(h) - W(-h)) - (W(2 * h) - W(-2 * h))) / (12.0 * h);
      if (!(kappa > 0.0))
        throw ValidationError("response slope W'(0) must be positive");
      return kappa;
    }
  }
  return 1.0;
}

WHat::WHat(const ResponseFunction& response)
    : response_(&response), kappa_(kappa_of(response)) {}

double WHat::eval(double z) const {
  if (is_linear()) return 0.0;
  return W_of(*response_, z) / kappa_ - z;
}

double WHat::deriv(double z) const {
  if (is_linear()) return 0.0;
  double w = W_of(*response_, z);
  double vp = response_->eval_v_deriv(w);
  return 1.0 / (kappa_ * vp) - 1.0;
}

} // namespace capstokes
