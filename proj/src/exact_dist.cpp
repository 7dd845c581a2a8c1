#include "cccd/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cccd/error.hpp"
#include "cccd/montecarlo.hpp"
#include "cccd/quadrature.hpp"

namespace cccd {
namespace {

constexpr double kThird = 1.0 / 3.0;

/// The model seen through the affine map of its support onto (0,1).
struct Canonical {
  const DensityModel& model;
  double lo;
  double len;

  explicit Canonical(const DensityModel& m) : model(m), lo(m.support().lo), len(m.support().length()) {}
  double f(double t) const { return len * model.pdf(lo + t * len); }
  double F(double t) const { return model.cdf(lo + t * len); }
  std::vector<double> knots() const {
    std::vector<double> out;
    for (double b : model.breakpoints()) out.push_back((b - lo) / len);
    return out;
  }
};

ProbabilityReport exact_report(double value, std::size_t n, const char* formula) {
  ProbabilityReport r;
  r.value = std::clamp(value, 0.0, 1.0);
  r.n = n;
  r.method = Method::closed_form;
  r.metadata["formula"] = formula;
  return r;
}

void require_n(std::size_t n) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::multinomial: return "multinomial";
    case Method::quadrature: return "quadrature";
    case Method::monte_carlo: return "monte-carlo";
    case Method::asymptotic: return "asymptotic";
  }
  return "unknown";
}

nlohmann::json report_to_json(const ProbabilityReport& r) {
  return {{"value", r.value},
          {"n", r.n},
          {"method", method_name(r.method)},
          {"error_bound", r.abs_error_bound},
          {"meta", r.metadata}};
}

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be at least 1");
}

ProbabilityReport p_uniform(std::size_t n) {
  require_n(n);
  return exact_report(4.0 / 9.0 - 16.0 / 9.0 * std::pow(4.0, -static_cast<double>(n)), n, "uniform");
}

bool has_closed_form(const DensityModel& m) {
  return m.is<family::Uniform>() || m.is<family::ShrunkUniform>() || m.is<family::GapUniform>() ||
         m.is<family::TwoStep>();
}

ProbabilityReport p_closed_form(const DensityModel& model, std::size_t n) {
  require_n(n);
  const double dn = static_cast<double>(n);
  const double q = std::pow(4.0, -dn);
  if (model.is<family::Uniform>()) return p_uniform(n);
  if (const auto* f = std::get_if<family::ShrunkUniform>(&model.family())) {
    if (f->delta >= kThird) return exact_report(0.0, n, "shrunk-uniform");
    const double r = (1.0 - 3.0 * f->delta) / (1.0 - 2.0 * f->delta);
    return exact_report((4.0 / 9.0 - 16.0 / 9.0 * q) * std::pow(r, dn), n, "shrunk-uniform");
  }
  if (const auto* f = std::get_if<family::GapUniform>(&model.family())) {
    if (f->delta >= kThird) return exact_report(1.0 - std::pow(2.0, 1.0 - dn), n, "gap-uniform-split");
    const double d = f->delta;
    const double r6 = std::pow((1.0 - 6.0 * d) / (1.0 - 2.0 * d), dn);
    const double r4 = std::pow((1.0 - 4.0 * d) / (1.0 - 2.0 * d), dn);
    const double r2 = std::pow((1.0 + 2.0 * d) / (4.0 * (1.0 - 2.0 * d)), dn);
    return exact_report(1.0 - 2.0 / 3.0 * r4 + r6 * (1.0 / 9.0 - 4.0 / 9.0 * q) - 4.0 / 3.0 * r2, n, "gap-uniform");
  }
  if (const auto* f = std::get_if<family::TwoStep>(&model.family())) {
    const double d = f->delta;
    const double s = 1.0 - d * d;
    // 4^{-n}(1±δ)^{n-1} folded into one power to stay finite for large n.
    const double up = std::pow((1.0 + d) / 4.0, dn - 1.0) / 4.0;
    const double down = std::pow((1.0 - d) / 4.0, dn - 1.0) / 4.0;
    const double v = 4.0 * s / (9.0 - d * d) - (8.0 * s / 3.0) * (up / (3.0 - d) + down / (3.0 + d));
    return exact_report(v, n, "two-step");
  }
  throw InvalidArgument("p_closed_form: no closed form for family '" + model.name() + "'; use quadrature");
}

ProbabilityReport p_quadrature(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg) {
  require_n(n);
  cfg.validate();
  ProbabilityReport rep;
  rep.n = n;
  rep.method = Method::quadrature;
  if (n == 1) {
    rep.metadata["note"] = "single point";
    return rep;
  }
  const Canonical c(model);
  const double dn = static_cast<double>(n);
  const double log_nn = std::log(dn) + std::log(dn - 1.0);
  const double power = dn - 2.0;

  auto G = [&](double x1, double xn) { return c.F(xn) - c.F(x1) + c.F(xn / 2.0) - c.F((1.0 + x1) / 2.0); };
  auto H = [&](double x1, double xn, double f1) -> double {
    const double fn = c.f(xn);
    if (!(fn > 0.0)) return 0.0;
    const double g = std::min(G(x1, xn), 1.0);
    if (power == 0.0) return dn * (dn - 1.0) * f1 * fn;
    if (!(g > 0.0)) return 0.0;
    if (cfg.log_domain) return std::exp(log_nn + std::log(f1) + std::log(fn) + power * std::log(g));
    return dn * (dn - 1.0) * f1 * fn * std::pow(g, power);
  };

  const auto knots = c.knots();
  std::vector<double> grading;
  if (n >= 200)
    for (double h = 0.25; h > 1e-12; h /= 4.0) grading.push_back(h);

  std::vector<double> outer_points{kThird};
  for (double b : knots)
    for (double p : {b, 2.0 * b - 1.0, b / 2.0, 4.0 * b - 1.0}) outer_points.push_back(p);
  for (double h : grading) outer_points.push_back(h);
  outer_points = quad::clip_breakpoints(std::move(outer_points), 0.0, 0.5);

  const double inner_abs = 0.1 * cfg.abs_tol;
  const double inner_rel = 0.1 * cfg.rel_tol;
  // Pruning bound: the inner integral is at most n(n-1) f(x1) G(x1,1)^{n-2}.
  const double log_prune = std::log(1e-3 * cfg.abs_tol);

  bool inner_failed = false;
  double worst_inner_error = 0.0;
  long inner_calls = 0;
  long pruned = 0;
  auto inner = [&](double x1) -> double {
    const double f1 = c.f(x1);
    if (!(f1 > 0.0)) return 0.0;
    const double lower = std::max((1.0 + x1) / 2.0, 2.0 * x1);
    if (!(lower < 1.0)) return 0.0;
    if (power > 0.0) {
      const double g1 = std::min(G(x1, 1.0), 1.0);
      if (!(g1 > 0.0) || log_nn + std::log(f1) + power * std::log(g1) < log_prune) {
        ++pruned;
        return 0.0;
      }
    }
    std::vector<double> pts;
    for (double b : knots) {
      pts.push_back(b);
      pts.push_back(2.0 * b);
    }
    for (double h : grading) pts.push_back(1.0 - h);
    pts = quad::clip_breakpoints(std::move(pts), lower, 1.0);
    ++inner_calls;
    const auto r = quad::integrate([&](double xn) { return H(x1, xn, f1); }, pts, inner_abs, inner_rel,
                                   cfg.max_subdivisions);
    if (!r.converged) inner_failed = true;
    worst_inner_error = std::max(worst_inner_error, r.error);
    return r.value;
  };

  const auto outer = quad::integrate(inner, outer_points, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
  const double inner_bound =
      inner_failed ? 0.5 * worst_inner_error : inner_rel * std::abs(outer.value) + 0.5 * inner_abs;
  rep.value = std::clamp(outer.value, 0.0, 1.0);
  rep.abs_error_bound = outer.error + inner_bound + std::abs(outer.value - rep.value);
  rep.metadata = {{"outer_subdivisions", outer.subdivisions},
                  {"inner_integrals", inner_calls},
                  {"pruned", pruned},
                  {"log_domain", cfg.log_domain},
                  {"rel_tol", cfg.rel_tol},
                  {"abs_tol", cfg.abs_tol}};
  if (!outer.converged || inner_failed)
    throw ConvergenceError("p_quadrature: subdivision limit reached for " + model.name(), rep.value,
                           rep.abs_error_bound);
  return rep;
}

ProbabilityReport p_monte_carlo(const DensityModel& model, std::size_t n, std::size_t reps, std::uint64_t seed,
                                unsigned threads) {
  if (reps == 0) throw InvalidArgument("reps must be at least 1");
  SimulationPlan plan(model);
  plan.anchors = {model.support().lo, model.support().hi};
  plan.n = n;
  plan.reps = reps;
  plan.seed = seed;
  plan.parallelism = threads;
  const auto emp = run(plan);
  const double N = static_cast<double>(reps);
  const double phat = static_cast<double>(emp.count(2)) / N;
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / N;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / N + z * z / (4.0 * N * N));

  ProbabilityReport rep;
  rep.value = phat;
  rep.n = n;
  rep.method = Method::monte_carlo;
  rep.abs_error_bound = half;
  rep.metadata = {{"reps", reps}, {"seed", seed}, {"gamma2_count", emp.count(2)}};
  return rep;
}

ProbabilityReport p_exact(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg) {
  if (has_closed_form(model)) return p_closed_form(model, n);
  if (model.is<family::SquareCdf>() && n >= 2 && n <= 60) return p_multinomial_squarecdf(n);
  return p_quadrature(model, n, cfg);
}

std::string order_name(StochasticOrder o) {
  switch (o) {
    case StochasticOrder::below_uniform: return "below-uniform";
    case StochasticOrder::above_uniform: return "above-uniform";
    case StochasticOrder::equal: return "equal";
    case StochasticOrder::inconclusive: return "inconclusive";
  }
  return "unknown";
}

StochasticOrder check_stochastic_order(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg) {
  const auto p = p_exact(model, n, cfg);
  const auto u = p_uniform(n);
  const double diff = p.value - u.value;
  const double slack = p.abs_error_bound + u.abs_error_bound;
  if (diff == 0.0 && slack == 0.0) return StochasticOrder::equal;
  if (std::abs(diff) <= slack) return StochasticOrder::inconclusive;
  return diff < 0.0 ? StochasticOrder::below_uniform : StochasticOrder::above_uniform;
}

}  // namespace cccd
