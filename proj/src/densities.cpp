#include "cccd/densities.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cccd/error.hpp"
#include "cccd/quadrature.hpp"

namespace cccd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

void check_order(int order) {
  if (order < 0 || order > 2) throw InvalidArgument("derivative order must be 0, 1 or 2");
}

/// e(e-1)...(e-j+1)
double falling_factorial(double e, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= (e - i);
  return r;
}

bool is_integer(double e) { return std::floor(e) == e; }

/// j-th derivative of c·t^e at t >= 0 (t = 0 taken from the right).
double power_term_derivative(double c, double e, double t, int j) {
  if (c == 0.0) return 0.0;
  if (t > 0.0) {
    if (is_integer(e) && e >= 0 && e < j) return 0.0;
    return c * falling_factorial(e, j) * std::pow(t, e - j);
  }
  if (is_integer(e) && e >= 0) return e == j ? c * falling_factorial(e, j) : 0.0;
  if (e > j) return 0.0;
  const double sign = c * falling_factorial(e, j);
  return sign > 0 ? kInf : -kInf;
}

/// Sum of power-term derivatives; infinities dominate finite parts.
double series_derivative_at_zero(const std::vector<std::pair<double, double>>& terms, int j) {
  double finite = 0.0;
  double lowest_inf_exp = kInf;
  double inf_value = 0.0;
  for (auto [c, e] : terms) {
    const double d = power_term_derivative(c, e, 0.0, j);
    if (std::isinf(d)) {
      if (e < lowest_inf_exp) {
        lowest_inf_exp = e;
        inf_value = d;
      }
    } else {
      finite += d;
    }
  }
  return std::isinf(inf_value) ? inf_value : finite;
}

// sin(2πt) and cos(2πt) that are exact at multiples of 1/4.
double sin2pi(double t) {
  const double r = 4.0 * t;
  if (is_integer(r)) {
    const long k = static_cast<long>(r) % 4;
    return k == 1 || k == -3 ? 1.0 : (k == 3 || k == -1 ? -1.0 : 0.0);
  }
  return std::sin(2.0 * kPi * t);
}
double cos2pi(double t) { return sin2pi(t + 0.25); }

// ---------------------------------------------------------------- piecewise constant

struct Piece {
  double a, b, value;
};

std::vector<Piece> pieces_of(const family::ShrunkUniform& f) {
  const double c = 1.0 / (1.0 - 2.0 * f.delta);
  return {{0.0, f.delta, 0.0}, {f.delta, 1.0 - f.delta, c}, {1.0 - f.delta, 1.0, 0.0}};
}
std::vector<Piece> pieces_of(const family::GapUniform& f) {
  const double c = 1.0 / (1.0 - 2.0 * f.delta);
  return {{0.0, 0.5 - f.delta, c}, {0.5 - f.delta, 0.5 + f.delta, 0.0}, {0.5 + f.delta, 1.0, c}};
}
std::vector<Piece> pieces_of(const family::TwoStep& f) {
  return {{0.0, 0.5, 1.0 + f.delta}, {0.5, 1.0, 1.0 - f.delta}};
}
std::vector<Piece> pieces_of(const family::ThreeStep& f) {
  return {{0.0, 0.25, 1.0 + f.delta}, {0.25, 0.75, 1.0 - f.delta}, {0.75, 1.0, 1.0 + f.delta}};
}

double pw_pdf(const std::vector<Piece>& ps, double x) {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  for (const auto& p : ps)
    if (x >= p.a && x < p.b) return p.value;
  return 0.0;
}

double pw_cdf(const std::vector<Piece>& ps, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double acc = 0.0;
  for (const auto& p : ps) {
    if (x >= p.b) {
      acc += p.value * (p.b - p.a);
    } else {
      if (x > p.a) acc += p.value * (x - p.a);
      break;
    }
  }
  return std::clamp(acc, 0.0, 1.0);
}

double pw_quantile(const std::vector<Piece>& ps, double u) {
  if (u <= 0.0) {
    for (const auto& p : ps)
      if (p.value > 0.0) return p.a;
    return 0.0;
  }
  double acc = 0.0;
  for (const auto& p : ps) {
    const double mass = p.value * (p.b - p.a);
    if (p.value > 0.0 && u <= acc + mass) return std::min(p.b, p.a + (u - acc) / p.value);
    acc += mass;
  }
  return 1.0;
}

double pw_derivative(const std::vector<Piece>& ps, double x, int order, Side side) {
  if (order > 0) return 0.0;
  for (const auto& p : ps) {
    const bool inside = side == Side::right ? (x >= p.a && x < p.b) : (x > p.a && x <= p.b);
    if (inside) return p.value;
  }
  return 0.0;
}

std::vector<double> pw_breakpoints(const std::vector<Piece>& ps) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i)
    if (ps[i].value != ps[i + 1].value && ps[i].b > 0.0 && ps[i].b < 1.0) out.push_back(ps[i].b);
  return out;
}

template <class F>
constexpr bool is_piecewise_constant =
    std::is_same_v<F, family::ShrunkUniform> || std::is_same_v<F, family::GapUniform> ||
    std::is_same_v<F, family::TwoStep> || std::is_same_v<F, family::ThreeStep>;

// ---------------------------------------------------------------- helpers for two-half shapes

/// Position inside the half-period shapes (QPower, PieceQuadratic, AbsSine):
/// returns t ∈ [0, 1/2] relative to the half selected by `side` at x.
double half_offset(double x, Side side) {
  if (x < 0.5 || (x == 0.5 && side == Side::left)) return x;
  return x - 0.5;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// P(a < Z < b) for standard normal Z, evaluated on the tail that avoids cancellation.
double normal_mass(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  if (b <= 0.0) return standard_normal_cdf(b) - standard_normal_cdf(a);
  return 1.0 - standard_normal_cdf(a) - 0.5 * std::erfc(b / std::numbers::sqrt2);
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Generalized binomial coefficient C(r, i).
double gbinom(double r, int i) {
  double c = 1.0;
  for (int k = 0; k < i; ++k) c *= (r - k) / (k + 1);
  return c;
}

/// Derivative of the Beta(a,b) density at 0 from the right.
double beta_derivative_at_zero(double a, double b, int j) {
  const double norm = std::exp(-log_beta(a, b));
  std::vector<std::pair<double, double>> terms;
  for (int i = 0; i <= 3; ++i) terms.emplace_back(norm * gbinom(b - 1.0, i) * (i % 2 ? -1.0 : 1.0), a - 1.0 + i);
  return series_derivative_at_zero(terms, j);
}

/// Cells this thin lose every digit to cdf cancellation.
bool narrow(const family::Restricted& f) { return f.hi - f.lo <= 1e-4 * f.base->support().length(); }

/// Base mass on lo + len (t0, t1). Narrow cells integrate in the local
/// coordinate t with a fixed rule per smooth piece, so the result is a smooth
/// function of t1.
double base_mass(const family::Restricted& f, double t0, double t1) {
  if (!(t1 > t0)) return 0.0;
  const double len = f.hi - f.lo;
  if (!narrow(f)) return f.base->cdf(f.lo + t1 * len) - f.base->cdf(f.lo + t0 * len);
  static const auto rule = quad::gauss_legendre_unit(20);
  std::vector<double> bps{t0, t1};
  for (double x : f.base->breakpoints()) bps.push_back((x - f.lo) / len);
  bps = quad::clip_breakpoints(std::move(bps), t0, t1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double a = bps[i];
    const double w = bps[i + 1] - a;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) total += w * rule.weights[k] * f.base->pdf(f.lo + (a + w * rule.nodes[k]) * len);
  }
  return len * total;
}

/// Bisection with Newton steps whenever they stay inside the bracket.
double bisect_quantile(const DensityModel& m, double u) {
  double lo = m.support().lo;
  double hi = m.support().hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double r = m.cdf(x) - u;
    if (r == 0.0) return x;
    (r < 0.0 ? lo : hi) = x;
    const double step = r / m.pdf(x);
    const double next = x - step;
    if (std::isfinite(next) && next > lo && next < hi) {
      x = next;
      if (std::abs(step) < 1e-15) break;
    } else {
      x = 0.5 * (lo + hi);
    }
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------- DensityModel

DensityModel DensityModel::make(Family fam, SupportInterval support) {
  require(std::isfinite(support.lo) && std::isfinite(support.hi) && support.lo < support.hi,
          "support: need finite lo < hi");
  const bool canonical = support.lo == 0.0 && support.hi == 1.0;
  std::visit(
      Overloaded{
          [](const family::Uniform&) {},
          [](const family::ShrunkUniform& f) {
            require(f.delta >= 0.0 && f.delta < 0.5, "params.delta: shrunk-uniform needs delta in [0, 1/2)");
          },
          [](const family::GapUniform& f) {
            require((f.delta >= 0.0 && f.delta <= 1.0 / 6.0) || (f.delta >= 1.0 / 3.0 && f.delta < 0.5),
                    "params.delta: gap-uniform needs delta in [0, 1/6] or [1/3, 1/2)");
          },
          [](const family::TwoStep& f) {
            require(f.delta >= -1.0 && f.delta <= 1.0, "params.delta: two-step needs delta in [-1, 1]");
          },
          [](const family::ThreeStep& f) {
            require(f.delta >= -1.0 && f.delta <= 1.0, "params.delta: three-step needs delta in [-1, 1]");
          },
          [](const family::Linear& f) { require(std::abs(f.a) <= 2.0, "params.a: linear needs |a| <= 2"); },
          [](const family::TruncatedNormal& f) {
            require(std::isfinite(f.mu), "params.mu: must be finite");
            require(f.sigma > 0.0 && std::isfinite(f.sigma), "params.sigma: must be positive");
          },
          [](const family::QPower& f) {
            require(f.q >= 0.0 && std::isfinite(f.q), "params.q: q-power needs finite q >= 0");
          },
          [](const family::PieceQuadratic& f) {
            require(f.delta >= 0.0 && f.delta <= 1.0, "params.delta: piece-quadratic needs delta in [0, 1]");
          },
          [](const family::ArcSine&) {},
          [](const family::AbsSine&) {},
          [](const family::Beta& f) {
            require(f.nu1 >= 1.0 && std::isfinite(f.nu1), "params.nu1: beta needs nu1 >= 1");
            require(f.nu2 >= 1.0 && std::isfinite(f.nu2), "params.nu2: beta needs nu2 >= 1");
          },
          [](const family::SquareCdf&) {},
          [&](const family::GeneralLinear& f) {
            const double len = support.length();
            require(std::abs(f.a) <= 2.0 / (len * len) * (1.0 + 1e-12),
                    "params.a: general-linear needs |a| <= 2/(hi-lo)^2");
          },
          [](const family::Restricted& f) {
            require(f.base != nullptr, "restricted: missing base model");
            require(f.lo < f.hi, "restricted: need lo < hi");
          },
      },
      fam);
  const bool general_support = std::holds_alternative<family::GeneralLinear>(fam);
  require(canonical || general_support, "support: only general-linear accepts a support other than [0, 1]");

  DensityModel model(std::move(fam), support);
  if (auto* r = std::get_if<family::Restricted>(&model.family_)) {
    r->mass = base_mass(*r, 0.0, 1.0);
    require(r->mass > 0.0, "restricted: base model puts no mass on the interval");
    return model;
  }
  // Normalization check under x = lo + L (1 - cos πt)/2, which absorbs
  // inverse-square-root endpoint singularities.
  const double lo = support.lo;
  const double len = support.length();
  std::vector<double> bps{0.5};
  for (double b : model.breakpoints()) bps.push_back(std::acos(1.0 - 2.0 * (b - lo) / len) / kPi);
  bps = quad::clip_breakpoints(std::move(bps), 0.0, 1.0);
  const auto total = quad::integrate(
      [&](double t) {
        const double x = lo + 0.5 * len * (1.0 - std::cos(kPi * t));
        return model.pdf(x) * 0.5 * len * kPi * std::sin(kPi * t);
      },
      bps, 1e-13, 1e-13, 4000);
  if (std::abs(total.value - 1.0) > 1e-10) {
    std::ostringstream os;
    os << model.name() << ": density integrates to " << total.value << ", not 1";
    throw InvalidArgument(os.str());
  }
  return model;
}

double DensityModel::pdf(double x) const {
  const double lo = support_.lo;
  const double hi = support_.hi;
  if (!(x > lo && x < hi)) return 0.0;
  return std::visit(
      Overloaded{
          [](const family::Uniform&) { return 1.0; },
          [&](const auto& f) -> double
            requires is_piecewise_constant<std::decay_t<decltype(f)>>
          { return pw_pdf(pieces_of(f), x); },
          [&](const family::Linear& f) { return f.a * x + 1.0 - 0.5 * f.a; },
          [&](const family::TruncatedNormal& f) {
            const double z = (x - f.mu) / f.sigma;
            const double mass = normal_mass(-f.mu / f.sigma, (1.0 - f.mu) / f.sigma);
            return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * kPi) * f.sigma * mass);
          },
          [&](const family::QPower& f) {
            const double t = half_offset(x, Side::right);
            return std::pow(2.0, f.q) * (f.q + 1.0) * std::pow(t, f.q);
          },
          [&](const family::PieceQuadratic& f) {
            const double t = half_offset(x, Side::right);
            return f.delta + 12.0 * (1.0 - f.delta) * t * t;
          },
          [&](const family::ArcSine&) { return 1.0 / (kPi * std::sqrt(x * (1.0 - x))); },
          [&](const family::AbsSine&) { return 0.5 * kPi * std::abs(sin2pi(x)); },
          [&](const family::Beta& f) {
            return std::exp((f.nu1 - 1.0) * std::log(x) + (f.nu2 - 1.0) * std::log1p(-x) - log_beta(f.nu1, f.nu2));
          },
          [&](const family::SquareCdf&) { return 2.0 * x; },
          [&](const family::GeneralLinear& f) {
            const double b = (1.0 - 0.5 * f.a * (hi * hi - lo * lo)) / (hi - lo);
            return f.a * x + b;
          },
          [&](const family::Restricted& f) {
            const double len = f.hi - f.lo;
            return len * f.base->pdf(f.lo + x * len) / f.mass;
          },
      },
      family_);
}

double DensityModel::cdf(double x) const {
  const double lo = support_.lo;
  const double hi = support_.hi;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double v = std::visit(
      Overloaded{
          [&](const family::Uniform&) { return x; },
          [&](const auto& f) -> double
            requires is_piecewise_constant<std::decay_t<decltype(f)>>
          { return pw_cdf(pieces_of(f), x); },
          [&](const family::Linear& f) { return 0.5 * f.a * x * x + (1.0 - 0.5 * f.a) * x; },
          [&](const family::TruncatedNormal& f) {
            const double a = -f.mu / f.sigma;
            return normal_mass(a, (x - f.mu) / f.sigma) / normal_mass(a, (1.0 - f.mu) / f.sigma);
          },
          [&](const family::QPower& f) {
            const double t = half_offset(x, Side::right);
            return (x >= 0.5 ? 0.5 : 0.0) + 0.5 * std::pow(2.0 * t, f.q + 1.0);
          },
          [&](const family::PieceQuadratic& f) {
            const double t = half_offset(x, Side::right);
            return (x >= 0.5 ? 0.5 : 0.0) + f.delta * t + 4.0 * (1.0 - f.delta) * t * t * t;
          },
          [&](const family::ArcSine&) { return 2.0 / kPi * std::asin(std::sqrt(x)); },
          [&](const family::AbsSine&) {
            const double s = std::sin(kPi * x);
            return x <= 0.5 ? 0.5 * s * s : 1.0 - 0.5 * s * s;
          },
          [&](const family::Beta& f) { return boost::math::ibeta(f.nu1, f.nu2, x); },
          [&](const family::SquareCdf&) { return x * x; },
          [&](const family::GeneralLinear& f) {
            const double b = (1.0 - 0.5 * f.a * (hi * hi - lo * lo)) / (hi - lo);
            return 0.5 * f.a * (x * x - lo * lo) + b * (x - lo);
          },
          [&](const family::Restricted& f) { return base_mass(f, 0.0, x) / f.mass; },
      },
      family_);
  return std::clamp(v, 0.0, 1.0);
}

double DensityModel::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("quantile: u must lie in [0, 1]");
  const double lo = support_.lo;
  const double hi = support_.hi;
  const double x = std::visit(
      Overloaded{
          [&](const family::Uniform&) { return u; },
          [&](const auto& f) -> double
            requires is_piecewise_constant<std::decay_t<decltype(f)>>
          { return pw_quantile(pieces_of(f), u); },
          [&](const family::Linear& f) {
            if (f.a == 0.0) return u;
            const double b = 1.0 - 0.5 * f.a;
            return 2.0 * u / (b + std::sqrt(std::max(0.0, b * b + 2.0 * f.a * u)));
          },
          [&](const family::TruncatedNormal&) { return bisect_quantile(*this, u); },
          [&](const family::QPower& f) {
            const double e = 1.0 / (f.q + 1.0);
            if (u < 0.5) return 0.5 * std::pow(2.0 * u, e);
            return 0.5 + 0.5 * std::pow(2.0 * u - 1.0, e);
          },
          [&](const family::PieceQuadratic&) { return bisect_quantile(*this, u); },
          [&](const family::ArcSine&) {
            const double s = std::sin(0.5 * kPi * u);
            return s * s;
          },
          [&](const family::AbsSine&) {
            if (u <= 0.25) return std::asin(std::sqrt(2.0 * u)) / kPi;
            if (u <= 0.5) return 0.5 - std::asin(std::sqrt(std::max(0.0, 1.0 - 2.0 * u))) / kPi;
            if (u <= 0.75) return 0.5 + std::asin(std::sqrt(2.0 * u - 1.0)) / kPi;
            return 1.0 - std::asin(std::sqrt(2.0 - 2.0 * u)) / kPi;
          },
          [&](const family::Beta&) { return bisect_quantile(*this, u); },
          [&](const family::SquareCdf&) { return std::sqrt(u); },
          [&](const family::GeneralLinear& f) {
            const double b = (1.0 - 0.5 * f.a * (hi * hi - lo * lo)) / (hi - lo);
            const double f_lo = f.a * lo + b;
            if (f.a == 0.0) return lo + u / f_lo;
            return lo + 2.0 * u / (f_lo + std::sqrt(std::max(0.0, f_lo * f_lo + 2.0 * f.a * u)));
          },
          [&](const family::Restricted& f) {
            if (narrow(f)) return bisect_quantile(*this, u);
            const double q = f.base->quantile(std::clamp(f.base->cdf(f.lo) + u * f.mass, 0.0, 1.0));
            return (q - f.lo) / (f.hi - f.lo);
          },
      },
      family_);
  return std::clamp(x, lo, hi);
}

double DensityModel::derivative(double x, int order, Side side) const {
  check_order(order);
  const double lo = support_.lo;
  const double hi = support_.hi;
  if (x < lo || x > hi || (x == lo && side == Side::left) || (x == hi && side == Side::right)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const family::Uniform&) { return order == 0 ? 1.0 : 0.0; },
          [&](const auto& f) -> double
            requires is_piecewise_constant<std::decay_t<decltype(f)>>
          { return pw_derivative(pieces_of(f), x, order, side); },
          [&](const family::Linear& f) { return order == 0 ? f.a * x + 1.0 - 0.5 * f.a : (order == 1 ? f.a : 0.0); },
          [&](const family::TruncatedNormal& f) {
            const double z = (x - f.mu) / f.sigma;
            const double mass = normal_mass(-f.mu / f.sigma, (1.0 - f.mu) / f.sigma);
            const double value = std::exp(-0.5 * z * z) / (std::sqrt(2.0 * kPi) * f.sigma * mass);
            if (order == 0) return value;
            if (order == 1) return -z / f.sigma * value;
            return (z * z - 1.0) / (f.sigma * f.sigma) * value;
          },
          [&](const family::QPower& f) {
            const double t = half_offset(x, side);
            return power_term_derivative(std::pow(2.0, f.q) * (f.q + 1.0), f.q, t, order);
          },
          [&](const family::PieceQuadratic& f) {
            const double t = half_offset(x, side);
            const double c = 12.0 * (1.0 - f.delta);
            if (order == 0) return f.delta + c * t * t;
            return order == 1 ? 2.0 * c * t : 2.0 * c;
          },
          [&](const family::ArcSine&) {
            if (x == 0.0 || x == 1.0) {
              if (order == 1) return x == 0.0 ? -kInf : kInf;
              return kInf;
            }
            const double g = x * (1.0 - x);
            const double dg = 1.0 - 2.0 * x;
            if (order == 0) return 1.0 / (kPi * std::sqrt(g));
            if (order == 1) return -0.5 / kPi * std::pow(g, -1.5) * dg;
            return (0.75 * std::pow(g, -2.5) * dg * dg + std::pow(g, -1.5)) / kPi;
          },
          [&](const family::AbsSine&) {
            const double t = half_offset(x, side);
            if (order == 0) return 0.5 * kPi * sin2pi(t);
            if (order == 1) return kPi * kPi * cos2pi(t);
            return -2.0 * kPi * kPi * kPi * sin2pi(t);
          },
          [&](const family::Beta& f) {
            if (x == 0.0) return beta_derivative_at_zero(f.nu1, f.nu2, order);
            if (x == 1.0) return (order % 2 ? -1.0 : 1.0) * beta_derivative_at_zero(f.nu2, f.nu1, order);
            const double value = pdf(x);
            const double s = (f.nu1 - 1.0) / x - (f.nu2 - 1.0) / (1.0 - x);
            if (order == 0) return value;
            if (order == 1) return value * s;
            return value * (s * s - (f.nu1 - 1.0) / (x * x) - (f.nu2 - 1.0) / ((1.0 - x) * (1.0 - x)));
          },
          [&](const family::SquareCdf&) { return order == 0 ? 2.0 * x : (order == 1 ? 2.0 : 0.0); },
          [&](const family::GeneralLinear& f) {
            const double b = (1.0 - 0.5 * f.a * (hi * hi - lo * lo)) / (hi - lo);
            return order == 0 ? f.a * x + b : (order == 1 ? f.a : 0.0);
          },
          [&](const family::Restricted& f) {
            const double len = f.hi - f.lo;
            return std::pow(len, order + 1) * f.base->derivative(f.lo + x * len, order, side) / f.mass;
          },
      },
      family_);
}

OneSidedDerivative DensityModel::one_sided_derivative(double point, Side side, int order) const {
  check_order(order);
  const double mid = support_.mid();
  if (point != support_.lo && point != mid && point != support_.hi)
    throw InvalidArgument("one_sided_derivative: point must be the support endpoints or midpoint");
  if ((point == support_.lo && side == Side::left) || (point == support_.hi && side == Side::right))
    throw InvalidArgument("one_sided_derivative: side points outside the support");
  OneSidedDerivative d;
  d.point = point;
  d.side = side;
  d.order = order;
  d.value = derivative(point, order, side);
  d.infinite = std::isinf(d.value);
  return d;
}

std::vector<double> DensityModel::breakpoints() const {
  return std::visit(
      Overloaded{
          [](const family::Uniform&) { return std::vector<double>{}; },
          [](const auto& f) -> std::vector<double>
            requires is_piecewise_constant<std::decay_t<decltype(f)>>
          { return pw_breakpoints(pieces_of(f)); },
          [](const family::Linear&) { return std::vector<double>{}; },
          [](const family::TruncatedNormal&) { return std::vector<double>{}; },
          [](const family::QPower& f) { return f.q == 0.0 ? std::vector<double>{} : std::vector<double>{0.5}; },
          [](const family::PieceQuadratic& f) {
            return f.delta == 1.0 ? std::vector<double>{} : std::vector<double>{0.5};
          },
          [](const family::ArcSine&) { return std::vector<double>{}; },
          [](const family::AbsSine&) { return std::vector<double>{0.5}; },
          [](const family::Beta&) { return std::vector<double>{}; },
          [](const family::SquareCdf&) { return std::vector<double>{}; },
          [](const family::GeneralLinear&) { return std::vector<double>{}; },
          [](const family::Restricted& f) {
            std::vector<double> out;
            for (double b : f.base->breakpoints())
              if (b > f.lo && b < f.hi) out.push_back((b - f.lo) / (f.hi - f.lo));
            return out;
          },
      },
      family_);
}

std::vector<double> DensityModel::sample(std::size_t n, RandomStream& rng) const {
  std::vector<double> xs(n);
  for (auto& x : xs) x = quantile(rng.next_uniform());
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::string family_name(const Family& fam) {
  return std::visit(Overloaded{
                        [](const family::Uniform&) { return std::string("uniform"); },
                        [](const family::ShrunkUniform&) { return std::string("shrunk-uniform"); },
                        [](const family::GapUniform&) { return std::string("gap-uniform"); },
                        [](const family::TwoStep&) { return std::string("two-step"); },
                        [](const family::ThreeStep&) { return std::string("three-step"); },
                        [](const family::Linear&) { return std::string("linear"); },
                        [](const family::TruncatedNormal&) { return std::string("truncated-normal"); },
                        [](const family::QPower&) { return std::string("q-power"); },
                        [](const family::PieceQuadratic&) { return std::string("piece-quadratic"); },
                        [](const family::ArcSine&) { return std::string("arcsine"); },
                        [](const family::AbsSine&) { return std::string("abs-sine"); },
                        [](const family::Beta&) { return std::string("beta"); },
                        [](const family::SquareCdf&) { return std::string("square-cdf"); },
                        [](const family::GeneralLinear&) { return std::string("general-linear"); },
                        [](const family::Restricted&) { return std::string("restricted"); },
                    },
                    fam);
}

std::string DensityModel::name() const { return family_name(family_); }

DensityModel restrict_to(const DensityModel& base, double lo, double hi) {
  const auto s = base.support();
  lo = std::max(lo, s.lo);
  hi = std::min(hi, s.hi);
  if (!(lo < hi)) throw InvalidArgument("restrict_to: interval does not meet the support");
  if (base.is<family::Uniform>()) return DensityModel::make(family::Uniform{});
  return DensityModel::make(family::Restricted{std::make_shared<const DensityModel>(base), lo, hi});
}

}  // namespace cccd
