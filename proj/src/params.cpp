#include "capstokes/params.hpp"

#include <cmath>

#include "capstokes/csvio.hpp"
#include "capstokes/errors.hpp"

namespace capstokes {

ResponseFunction ResponseFunction::linear(double kappa0) {
  ResponseFunction r;
  r.kind = ResponseKind::Linear;
  r.kappa0 = kappa0;
  r.validate();
  return r;
}

ResponseFunction ResponseFunction::sinh_law(double A, double B) {
  ResponseFunction r;
  r.kind = ResponseKind::Sinh;
  r.A = A;
  r.B = B;
  r.validate();
  return r;
}

ResponseFunction ResponseFunction::tabulated(std::vector<double> z,
                                             std::vector<double> v) {
  ResponseFunction r;
  r.kind = ResponseKind::Tabulated;
  r.table_z = std::move(z);
  r.table_v = std::move(v);
  r.validate();
  return r;
}

ResponseFunction ResponseFunction::from_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  std::vector<double> z, v;
  for (const auto& row : t.rows) {
    if (row.size() < 2)
      throw ValidationError("response CSV needs two columns (z, V)");
    z.push_back(row[0]);
    v.push_back(row[1]);
  }
  return tabulated(std::move(z), std::move(v));
}

void ResponseFunction::validate() const {
  switch (kind) {
    case ResponseKind::Linear:
      if (!(kappa0 > 0.0))
        throw ValidationError("linear response needs kappa0 > 0");
      break;
    case ResponseKind::Sinh:
      if (!(A > 0.0) || !(B > 0.0))
        throw ValidationError("sinh response needs A > 0 and B > 0");
      break;
    case ResponseKind::Tabulated: {
      if (table_z.size() < 4)
        throw ValidationError("tabulated response needs >= 4 samples");
      // MonotoneCubic rejects non-monotone tables at construction.
      interp_ = MonotoneCubic(table_z, table_v);
      interp_built_ = true;
      bool increasing = table_v.back() > table_v.front();
      if (!increasing)
        throw ValidationError("tabulated response must be strictly increasing");
      if (table_z.front() > 0.0 || table_z.back() < 0.0)
        throw ValidationError("tabulated response must bracket z = 0");
      double v0 = interp_.eval(0.0);
      if (std::abs(v0) > 1e-12)
        throw ValidationError("tabulated response must satisfy V(0) = 0");
      break;
    }
  }
}

const MonotoneCubic& ResponseFunction::interpolant() const {
  if (!interp_built_) {
    interp_ = MonotoneCubic(table_z, table_v);
    interp_built_ = true;
  }
  return interp_;
}

double ResponseFunction::eval_v(double z) const {
  switch (kind) {
    case ResponseKind::Linear:
      return z / kappa0;
    case ResponseKind::Sinh:
      return A * std::sinh(B * z);
    case ResponseKind::Tabulated:
      return interpolant().eval(z);
  }
  return 0.0;
}

double ResponseFunction::eval_v_deriv(double z) const {
  switch (kind) {
    case ResponseKind::Linear:
      return 1.0 / kappa0;
    case ResponseKind::Sinh:
      return A * B * std::cosh(B * z);
    case ResponseKind::Tabulated:
      return interpolant().deriv(z);
  }
  return 0.0;
}

void PhysicalParams::validate() const {
  if (!(g > 0.0)) throw ValidationError("g must be positive");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
  if (!(std::abs(gamma_jump) < sigma))
    throw ValidationError("wetting jump must satisfy |gamma_jump| < sigma");
  if (!(ell > 0.0)) throw ValidationError("ell must be positive");
  if (!(wall_height > 0.0)) throw ValidationError("wall_height must be positive");
  if (!(m_top > 0.0)) throw ValidationError("m_top must be positive");
  response.validate();
}

} // namespace capstokes
