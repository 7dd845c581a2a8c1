#include "cccd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>

#include "cccd/cccd_core.hpp"
#include "cccd/error.hpp"

namespace cccd {
namespace {

constexpr int kMaxTieAttempts = 100;

std::vector<double> draw_hu(const SimulationPlan& plan, const std::vector<double>& ys, RandomStream& rng) {
  const double c = plan.hu_support.lo;
  const double d = plan.hu_support.hi;
  std::vector<double> xs(plan.n);
  for (auto& x : xs) {
    const double w = c + rng.next_uniform() * (d - c);
    const auto it = std::upper_bound(ys.begin(), ys.end(), w);
    const double lo = it == ys.begin() ? c : *(it - 1);
    const double hi = it == ys.end() ? d : *it;
    x = lo + plan.fx.quantile(rng.next_uniform()) * (hi - lo);
  }
  return xs;
}

void simulate_one(const SimulationPlan& plan, std::uint64_t r, EmpiricalDistribution& out) {
  RandomStream rng(plan.seed, r);
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxTieAttempts)
      throw ComputationError("simulation: 100 consecutive ties; the model looks discrete");
    std::vector<double> ys = plan.fy ? plan.fy->sample(plan.m, rng) : plan.anchors;
    std::vector<double> xs = plan.hu_family ? draw_hu(plan, ys, rng) : plan.fx.sample(plan.n, rng);
    if (plan.transformed) {
      for (auto& x : xs) x = plan.fx.cdf(x);
      for (auto& y : ys) y = plan.fx.cdf(y);
    }
    try {
      const auto inst = build_instance(std::move(xs), std::move(ys));
      const auto res = domination_number_fast(inst);
      ++out.counts[res.total];
      ++out.reps;
      out.boundary_hits += res.boundary_hits;
      std::size_t occupied = 0;
      for (auto c : inst.counts()) occupied += c > 0;
      const auto bound = upper_bound(inst).bound();
      const std::size_t cap = std::min(inst.n(), 2 * inst.m());
      const auto g = static_cast<std::size_t>(res.total);
      if (g > cap || g > bound || (inst.n() > 0 && g < 1)) ++out.bound_violations;
      for (const auto& cell : res.per_interval) {
        if (inst.is_end_cell(cell.j) || cell.count == 0) continue;
        auto& tally = out.cells[{cell.j, cell.count}];
        (cell.gamma == 2 ? tally.gamma2 : tally.gamma1) += 1;
      }
      return;
    } catch (const TieError&) {
      ++out.tie_resamples;
    }
  }
}

}  // namespace

std::uint64_t EmpiricalDistribution::count(int k) const {
  const auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

double EmpiricalDistribution::fraction(int k) const {
  return reps == 0 ? 0.0 : static_cast<double>(count(k)) / static_cast<double>(reps);
}

double EmpiricalDistribution::mean() const {
  if (reps == 0) return 0.0;
  double s = 0.0;
  for (auto [k, c] : counts) s += static_cast<double>(k) * static_cast<double>(c);
  return s / static_cast<double>(reps);
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& o) {
  for (auto [k, c] : o.counts) counts[k] += c;
  for (const auto& [key, t] : o.cells) {
    cells[key].gamma1 += t.gamma1;
    cells[key].gamma2 += t.gamma2;
  }
  reps += o.reps;
  bound_violations += o.bound_violations;
  boundary_hits += o.boundary_hits;
  tie_resamples += o.tie_resamples;
}

unsigned resolve_threads(unsigned requested) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CCCD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) t = std::min<unsigned>(t, static_cast<unsigned>(cap));
  }
  return std::max(1u, t);
}

EmpiricalDistribution run(const SimulationPlan& plan) {
  if (plan.reps == 0) throw InvalidArgument("simulation: reps must be at least 1");
  if (!plan.fy && plan.anchors.empty()) throw InvalidArgument("simulation: need fixed anchors or an anchor density");
  if (plan.fy && plan.m == 0) throw InvalidArgument("simulation: m must be at least 1");
  SimulationPlan p = plan;
  if (!p.fy) p.m = p.anchors.size();

  const unsigned workers = std::min<std::uint64_t>(resolve_threads(plan.parallelism), plan.reps);
  std::vector<EmpiricalDistribution> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto job = [&](unsigned w) {
    try {
      const std::uint64_t begin = plan.reps * w / workers;
      const std::uint64_t end = plan.reps * (w + 1) / workers;
      for (std::uint64_t r = begin; r < end; ++r) simulate_one(p, r, parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  EmpiricalDistribution total;
  for (const auto& part : parts) total.merge(part);
  return total;
}

ComparisonVerdict compare(const EmpiricalDistribution& emp, const std::map<int, double>& predicted,
                          double threshold) {
  if (emp.reps == 0) throw InvalidArgument("compare: empty empirical distribution");
  ComparisonVerdict v;
  v.threshold = threshold;
  std::set<int> support;
  for (auto [k, _] : emp.counts) support.insert(k);
  for (auto [k, _] : predicted) support.insert(k);
  const double N = static_cast<double>(emp.reps);
  double chi2 = 0.0;
  int dof = -1;
  for (int k : support) {
    const double phat = emp.fraction(k);
    const auto it = predicted.find(k);
    const double p = it == predicted.end() ? 0.0 : it->second;
    double z = 0.0;
    if (p <= 0.0 || p >= 1.0) {
      z = phat == std::clamp(p, 0.0, 1.0) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      z = (phat - p) / std::sqrt(p * (1.0 - p) / N);
      chi2 += N * (phat - p) * (phat - p) / p;
      ++dof;
    }
    v.per_atom.push_back({k, phat, p, z});
    v.statistic = std::max(v.statistic, std::abs(z));
  }
  v.pass = v.statistic <= threshold;
  v.metadata = {{"chi_square", chi2}, {"dof", std::max(dof, 0)}, {"reps", emp.reps}};
  return v;
}

std::map<int, double> one_plus_bernoulli(double p) { return {{1, 1.0 - p}, {2, p}}; }

nlohmann::json empirical_to_json(const EmpiricalDistribution& e) {
  nlohmann::json counts = nlohmann::json::array();
  for (auto [k, c] : e.counts) counts.push_back({{"k", k}, {"count", c}, {"fraction", e.fraction(k)}});
  return {{"reps", e.reps},
          {"counts", counts},
          {"mean", e.mean()},
          {"bound_violations", e.bound_violations},
          {"boundary_hits", e.boundary_hits},
          {"tie_resamples", e.tie_resamples}};
}

nlohmann::json verdict_to_json(const ComparisonVerdict& v) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : v.per_atom) {
    nlohmann::json z = std::isfinite(a.z) ? nlohmann::json(a.z) : nlohmann::json("inf");
    atoms.push_back({{"k", a.k}, {"empirical", a.empirical}, {"predicted", a.predicted}, {"z", z}});
  }
  return {{"statistic", std::isfinite(v.statistic) ? nlohmann::json(v.statistic) : nlohmann::json("inf")},
          {"threshold", v.threshold},
          {"verdict", v.pass ? "pass" : "fail"},
          {"per_atom", atoms},
          {"meta", v.metadata}};
}

}  // namespace cccd
