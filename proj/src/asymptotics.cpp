#include "cccd/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "cccd/error.hpp"

namespace cccd {
namespace {

/// Smallest order j <= 2 with f^{(j)}(end) + 2^{-(j+1)} f^{(j)}(mid) != 0,
/// requiring lower orders to vanish at the endpoint. `end_side` is the
/// one-sided direction into the support.
struct OrderSearch {
  int order = -1;
  double d_end = 0.0;
  double d_mid = 0.0;
  double combo = 0.0;
  bool infinite = false;
};

OrderSearch find_order(const DensityModel& m, double end, Side side) {
  const double mid = m.support().mid();
  OrderSearch s;
  for (int j = 0; j <= 2; ++j) {
    const auto de = m.one_sided_derivative(end, side, j);
    const auto dm = m.one_sided_derivative(mid, side, j);
    if (de.infinite || dm.infinite) {
      s.infinite = true;
      return s;
    }
    const double combo = de.value + std::ldexp(dm.value, -(j + 1));
    if (combo != 0.0) {
      s.order = j;
      s.d_end = de.value;
      s.d_mid = dm.value;
      s.combo = combo;
      return s;
    }
    if (de.value != 0.0) return s;
  }
  return s;
}

double signed_pow(double base, double num, double den) {
  // Real root for negative bases with odd denominators.
  if (base >= 0.0) return std::pow(base, num / den);
  if (std::fmod(den, 2.0) == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double mag = std::pow(-base, num / den);
  return std::fmod(num, 2.0) == 0.0 ? mag : -mag;
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

bool needs_unbounded_limit(const DensityModel& model) {
  const auto s = model.support();
  return find_order(model, s.lo, Side::right).infinite || find_order(model, s.hi, Side::left).infinite;
}

AsymptoticProfile asymptotic_profile(const DensityModel& model) {
  const auto s = model.support();
  const auto left = find_order(model, s.lo, Side::right);
  const auto right = find_order(model, s.hi, Side::left);
  if (left.infinite || right.infinite)
    throw InvalidArgument("asymptotic_profile: unbounded derivative for " + model.name() + "; use limit_unbounded");
  if (left.order < 0 || right.order < 0)
    throw InvalidArgument("asymptotic_profile: no admissible order up to 2 for " + model.name());
  AsymptoticProfile p;
  p.k = left.order;
  p.ell = right.order;
  p.d_lo = left.d_end;
  p.d_mid_right = left.d_mid;
  p.alpha_k = left.combo;
  p.d_hi = right.d_end;
  p.d_mid_left = right.d_mid;
  p.beta_ell = right.combo;
  p.p_limit = p.d_lo * p.d_hi / (p.alpha_k * p.beta_ell);
  return p;
}

double limit_matched_derivatives(int k, int ell) {
  if (k < 0 || ell < 0) throw InvalidArgument("limit_matched_derivatives: orders must be nonnegative");
  return 1.0 / (1.0 + std::ldexp(1.0, -(k + 1))) / (1.0 + std::ldexp(1.0, -(ell + 1)));
}

double limit_family_formula(const DensityModel& model) {
  const auto& fam = model.family();
  if (model.is<family::Uniform>()) return 4.0 / 9.0;
  if (const auto* f = std::get_if<family::Linear>(&fam)) return (4.0 - f->a * f->a) / (9.0 - f->a * f->a);
  if (const auto* f = std::get_if<family::TruncatedNormal>(&fam)) {
    const double s2 = 8.0 * f->sigma * f->sigma;
    return 4.0 / ((2.0 + std::exp((4.0 * f->mu - 1.0) / s2)) * (2.0 + std::exp((3.0 - 4.0 * f->mu) / s2)));
  }
  if (const auto* f = std::get_if<family::QPower>(&fam))
    return std::pow(2.0, f->q + 2.0) / (3.0 * (1.0 + std::pow(2.0, f->q + 1.0)));
  if (const auto* f = std::get_if<family::PieceQuadratic>(&fam)) return f->delta == 0.0 ? 16.0 / 27.0 : 4.0 / 9.0;
  if (const auto* f = std::get_if<family::TwoStep>(&fam))
    return 4.0 * (1.0 - f->delta * f->delta) / (9.0 - f->delta * f->delta);
  if (const auto* f = std::get_if<family::ThreeStep>(&fam))
    return 4.0 * (1.0 + f->delta) * (1.0 + f->delta) / ((3.0 + f->delta) * (3.0 + f->delta));
  if (const auto* f = std::get_if<family::GeneralLinear>(&fam)) {
    const double L = model.support().length();
    const double t = f->a * f->a * L * L * L * L;
    return (t - 4.0) / (t - 9.0);
  }
  if (model.is<family::ArcSine>()) return 1.0;
  if (model.is<family::AbsSine>()) return 16.0 / 25.0;
  if (const auto* f = std::get_if<family::Beta>(&fam)) return f->nu1 == 1.0 && f->nu2 == 1.0 ? 4.0 / 9.0 : 0.0;
  if (const auto* f = std::get_if<family::ShrunkUniform>(&fam)) return f->delta == 0.0 ? 4.0 / 9.0 : 0.0;
  if (const auto* f = std::get_if<family::GapUniform>(&fam)) return f->delta == 0.0 ? 4.0 / 9.0 : 1.0;
  throw InvalidArgument("limit_family_formula: no stated limit for family '" + model.name() + "'");
}

double limit_unbounded(const DensityModel& model) {
  const auto s = model.support();
  const double L = s.length();
  const double mid = s.mid();
  // Same order rule as the profile, with infinite values counting as nonzero.
  auto order_at = [&](double end, Side side) {
    for (int j = 0; j <= 2; ++j) {
      const auto de = model.one_sided_derivative(end, side, j);
      const auto dm = model.one_sided_derivative(mid, side, j);
      if (de.infinite || dm.infinite || de.value + std::ldexp(dm.value, -(j + 1)) != 0.0) return j;
    }
    return 2;
  };
  const int k = order_at(s.lo, Side::right);
  const int ell = order_at(s.hi, Side::left);
  auto ratio = [&](double delta) {
    const double a = model.derivative(s.lo + delta, k, Side::right);
    const double b = model.derivative(s.hi - delta, ell, Side::left);
    const double am = model.derivative(mid + delta, k, Side::right);
    const double bm = model.derivative(mid - delta, ell, Side::left);
    return a * b / ((a + std::ldexp(am, -(k + 1))) * (b + std::ldexp(bm, -(ell + 1))));
  };
  std::vector<double> values;
  for (int e = 2; e <= 16; ++e) {
    const double v = ratio(L * std::pow(10.0, -e));
    if (!std::isfinite(v)) continue;
    values.push_back(v);
    const std::size_t c = values.size();
    if (c >= 3 && std::abs(values[c - 1] - values[c - 2]) <= 1e-6 && std::abs(values[c - 2] - values[c - 3]) <= 1e-6)
      return values.back();
  }
  throw ComputationError("limit_unbounded: ratio did not stabilize for " + model.name());
}

ProbabilityReport p_limit(const DensityModel& model) {
  ProbabilityReport r;
  r.method = Method::asymptotic;
  if (needs_unbounded_limit(model)) {
    r.value = limit_unbounded(model);
    r.abs_error_bound = 1e-6;
    r.metadata["route"] = "unbounded";
    return r;
  }
  const auto p = asymptotic_profile(model);
  r.value = p.p_limit;
  r.metadata = profile_to_json(p);
  r.metadata["route"] = "profile";
  return r;
}

double RateConstant::correction(double n) const { return c1 * std::pow(n, -e1) + c2 * std::pow(n, -e2); }

RateConstant rate_constant(const DensityModel& model) {
  const auto p = asymptotic_profile(model);
  if (p.k + 1 > 2 || p.ell + 1 > 2)
    throw InvalidArgument("rate_constant: needs derivatives above order 2 for " + model.name());
  const auto s = model.support();
  const double fk1 = model.one_sided_derivative(s.lo, Side::right, p.k + 1).value;
  const double fl1 = model.one_sided_derivative(s.hi, Side::left, p.ell + 1).value;
  const double k = p.k;
  const double l = p.ell;
  const double sign_l1 = (p.ell + 1) % 2 ? -1.0 : 1.0;
  const double s1 = sign_l1 / (factorial(p.k) * factorial(p.ell + 1)) * p.d_lo * fl1;
  const double s2 = -sign_l1 / (factorial(p.ell) * factorial(p.k + 1)) * fk1 * p.d_hi;
  const double s3 = p.alpha_k / factorial(p.k + 1);
  const double s4 = sign_l1 / factorial(p.ell + 1) * p.beta_ell;
  const double denom = (k + 1.0) * (l + 1.0) * signed_pow(s3, k + 2.0, k + 1.0) * signed_pow(s4, l + 2.0, l + 1.0);
  RateConstant rc;
  rc.c1 = s1 * signed_pow(s3, 1.0, k + 1.0) * std::tgamma((l + 2.0) / (l + 1.0)) / denom;
  rc.e1 = (k + l + 1.0) / (l + 1.0);
  rc.c2 = s2 * signed_pow(s4, 1.0, l + 1.0) * std::tgamma((k + 2.0) / (k + 1.0)) / denom;
  rc.e2 = (k + l + 1.0) / (k + 1.0);
  return rc;
}

nlohmann::json profile_to_json(const AsymptoticProfile& p) {
  return {{"k", p.k},           {"ell", p.ell},         {"d_lo", p.d_lo},
          {"d_hi", p.d_hi},     {"d_mid_right", p.d_mid_right}, {"d_mid_left", p.d_mid_left},
          {"alpha_k", p.alpha_k}, {"beta_ell", p.beta_ell}, {"p_limit", p.p_limit}};
}

}  // namespace cccd
