#include "cccd/multi_anchor.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "cccd/error.hpp"
#include "cccd/montecarlo.hpp"
#include "cccd/quadrature.hpp"

namespace cccd {

CompositionIterator::CompositionIterator(int total, int parts, int max_part)
    : total_(total), parts_(parts), max_part_(max_part), current_(std::max(parts, 0), 0) {
  if (total < 0 || parts < 1 || max_part < 0) throw InvalidArgument("CompositionIterator: bad arguments");
  if (static_cast<long>(parts) * max_part < total) {
    done_ = true;
    return;
  }
  fill_from(0, total);
}

void CompositionIterator::fill_from(int index, int remaining) {
  // Lexicographically smallest completion: push the mass to the right.
  for (int i = parts_ - 1; i >= index; --i) {
    current_[i] = std::min(max_part_, remaining);
    remaining -= current_[i];
  }
}

CompositionIterator& CompositionIterator::operator++() {
  int suffix = current_[parts_ - 1];
  for (int i = parts_ - 2; i >= 0; --i) {
    if (current_[i] < max_part_ && suffix >= 1) {
      ++current_[i];
      fill_from(i + 1, suffix - 1);
      return *this;
    }
    suffix += current_[i];
  }
  done_ = true;
  return *this;
}

AnchorConditional make_conditional(const DensityModel& fx, std::vector<double> anchors, bool hu_family,
                                   SupportInterval hu_support) {
  if (anchors.empty()) throw InvalidArgument("make_conditional: need at least one anchor");
  std::sort(anchors.begin(), anchors.end());
  if (std::adjacent_find(anchors.begin(), anchors.end()) != anchors.end())
    throw InvalidArgument("make_conditional: anchors must be distinct");
  AnchorConditional c;
  c.anchors = anchors;
  const std::size_t m = anchors.size();
  if (hu_family) {
    const double lo = hu_support.lo;
    const double hi = hu_support.hi;
    if (!(anchors.front() > lo && anchors.back() < hi))
      throw InvalidArgument("make_conditional: H_U anchors must lie inside the support");
    auto shared = std::make_shared<const DensityModel>(fx);
    double prev = lo;
    for (std::size_t j = 0; j <= m; ++j) {
      const double next = j == m ? hi : anchors[j];
      c.cell_probs.push_back((next - prev) / (hi - lo));
      if (j > 0 && j < m) c.cell_models.push_back(shared);
      prev = next;
    }
    return c;
  }
  double prev_cdf = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double next_cdf = j == m ? 1.0 : fx.cdf(anchors[j]);
    const double mass = std::max(0.0, next_cdf - prev_cdf);
    c.cell_probs.push_back(mass);
    if (j > 0 && j < m)
      c.cell_models.push_back(mass > 0.0 ? std::make_shared<const DensityModel>(
                                               restrict_to(fx, anchors[j - 1], anchors[j]))
                                         : nullptr);
    prev_cdf = next_cdf;
  }
  return c;
}

namespace {

void guard(std::size_t n, std::size_t m) {
  if (n + m > kMaxEnumeration)
    throw InvalidArgument("exact enumeration limited to n + m <= 24; use Monte Carlo (--mc)");
}

/// p_{n_j}(F_j) for every middle cell, memoized per (cell, n_j).
class CellProbabilities {
 public:
  CellProbabilities(const AnchorConditional& c, std::size_t n, const QuadratureConfig& cfg)
      : cond_(c), cfg_(cfg), memo_(c.cell_models.size(), std::vector<double>(n + 1, -1.0)) {}

  /// Middle cell index 0..m-2.
  double operator()(std::size_t cell, std::size_t nj) {
    double& slot = memo_[cell][nj];
    if (slot < 0.0) {
      const auto& model = cond_.cell_models[cell];
      // H_U cells share one model, so reuse the first cell's values.
      if (cell > 0 && model && model == cond_.cell_models[0]) {
        slot = (*this)(0, nj);
      } else {
        slot = (!model || nj < 2) ? 0.0 : p_exact(*model, nj, cfg_).value;
      }
    }
    return slot;
  }

 private:
  const AnchorConditional& cond_;
  QuadratureConfig cfg_;
  std::vector<std::vector<double>> memo_;
};

double log_factorial(std::size_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double multinomial_probability(const std::vector<int>& counts, const std::vector<double>& probs, std::size_t n) {
  double log_p = log_factorial(n);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    if (probs[j] <= 0.0) return 0.0;
    log_p += counts[j] * std::log(probs[j]) - log_factorial(counts[j]);
  }
  return std::exp(log_p);
}

/// Occupancy vectors below this weight use p = 0 instead of a quadrature.
constexpr double kNegligible = 1e-15;

double zeta(int k, int nj) { return (nj == 0 && k == 0) || (nj >= 1 && k == 1) ? 1.0 : 0.0; }

double eta(int k, int nj, double p) {
  if (nj == 0 && k == 0) return 1.0;
  if (!(nj >= k && k >= 1)) return 0.0;
  return k == 2 ? p : 1.0 - p;
}

}  // namespace

double pmf_conditional(const AnchorConditional& cond, std::size_t n, int k, const QuadratureConfig& cfg) {
  const std::size_t m = cond.anchors.size();
  guard(n, m);
  if (k < 0 || k > static_cast<int>(2 * m)) return 0.0;
  CellProbabilities pcell(cond, n, cfg);
  const int cells = static_cast<int>(m + 1);
  double total = 0.0;
  for (CompositionIterator nv(static_cast<int>(n), cells, static_cast<int>(n)); !nv.done(); ++nv) {
    const auto& nn = *nv;
    const double pn = multinomial_probability(nn, cond.cell_probs, n);
    if (pn == 0.0) continue;
    double inner = 0.0;
    for (CompositionIterator kv(k, cells, 2); !kv.done(); ++kv) {
      const auto& kk = *kv;
      double term = zeta(kk[0], nn[0]) * zeta(kk[m], nn[m]);
      for (std::size_t j = 1; j < m && term != 0.0; ++j)
        term *= eta(kk[j], nn[j], nn[j] >= 1 && pn >= kNegligible ? pcell(j - 1, nn[j]) : 0.0);
      inner += term;
    }
    total += pn * inner;
  }
  return total;
}

std::vector<double> pmf_conditional_table(const AnchorConditional& cond, std::size_t n, const QuadratureConfig& cfg) {
  const std::size_t m = cond.anchors.size();
  guard(n, m);
  CellProbabilities pcell(cond, n, cfg);
  std::vector<double> table(2 * m + 1, 0.0);
  std::vector<double> dist;
  for (CompositionIterator nv(static_cast<int>(n), static_cast<int>(m + 1), static_cast<int>(n)); !nv.done();
       ++nv) {
    const auto& nn = *nv;
    const double pn = multinomial_probability(nn, cond.cell_probs, n);
    if (pn == 0.0) continue;
    // Convolve the per-cell laws of γ(D^j).
    dist.assign(2 * m + 1, 0.0);
    dist[0] = 1.0;
    int top = 0;
    for (std::size_t j = 0; j <= m; ++j) {
      if (nn[j] == 0) continue;
      const bool end = j == 0 || j == m;
      const double p2 = end || pn < kNegligible ? 0.0 : pcell(j - 1, nn[j]);
      for (int v = top; v >= 0; --v) {
        const double mass = dist[v];
        dist[v] = 0.0;
        dist[v + 1] += mass * (1.0 - p2);
        if (p2 > 0.0) dist[v + 2] += mass * p2;
      }
      top += end ? 1 : 2;
    }
    for (std::size_t v = 0; v < table.size(); ++v) table[v] += pn * dist[v];
  }
  return table;
}

namespace {

/// Gauss-Legendre on (0,1). When the anchor density vanishes or blows up at
/// an end, its quantile has root-type behaviour there and the nodes are
/// pushed through u = t^3 (10 - 15t + 6t^2) to flatten it.
quad::Rule anchor_rule(const DensityModel& fy, int q) {
  auto rule = quad::gauss_legendre_unit(q);
  const auto s = fy.support();
  const auto a = fy.one_sided_derivative(s.lo, Side::right, 0);
  const auto b = fy.one_sided_derivative(s.hi, Side::left, 0);
  if (!a.infinite && !b.infinite && a.value > 0.0 && b.value > 0.0) return rule;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    rule.nodes[i] = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    rule.weights[i] *= 30.0 * t * t * (1.0 - t) * (1.0 - t);
  }
  return rule;
}

/// Integrates g(u_1..u_m) against m! on 0 < u_1 < ... < u_m < 1 with a
/// q-point Gauss-Legendre product rule on the sequential map
/// u_{i+1} = u_i + (1 - u_i) t_{i+1}.
template <class G>
void integrate_simplex(const quad::Rule& rule, std::size_t m, G&& g) {
  const int q = static_cast<int>(rule.nodes.size());
  double mfact = 1.0;
  for (std::size_t i = 2; i <= m; ++i) mfact *= static_cast<double>(i);
  std::vector<double> u(m);
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t depth, double prev, double weight) {
    if (depth == m) {
      g(u, weight * mfact);
      return;
    }
    const double span = 1.0 - prev;
    for (int i = 0; i < q; ++i) {
      u[depth] = prev + span * rule.nodes[i];
      rec(depth + 1, u[depth], weight * rule.weights[i] * span);
    }
  };
  rec(0, 0.0, 1.0);
}

/// Order 16 per axis for m <= 2; the q^3 cost at m = 3 forces 12, which
/// still agrees with order 32 to about 1e-7 on smooth models.
int simplex_order(std::size_t n, std::size_t m) {
  return std::max<int>(m >= 3 ? 12 : 16, static_cast<int>((n + m) / 2 + 4));
}

}  // namespace

std::vector<double> pmf_random_anchors_table(const DensityModel& fx, const DensityModel& fy, std::size_t n,
                                             std::size_t m, bool hu_family, const QuadratureConfig& cfg) {
  if (m == 0) throw InvalidArgument("pmf_random_anchors: m must be at least 1");
  if (m > 3) throw InvalidArgument("pmf_random_anchors: deterministic integration needs m <= 3; use Monte Carlo");
  guard(n, m);
  std::vector<double> table(2 * m + 1, 0.0);
  integrate_simplex(anchor_rule(fy, simplex_order(n, m)), m, [&](const std::vector<double>& u, double w) {
    std::vector<double> ys(m);
    for (std::size_t i = 0; i < m; ++i) ys[i] = fy.quantile(u[i]);
    for (std::size_t i = 1; i < m; ++i)
      if (!(ys[i] > ys[i - 1])) return;
    const auto cond = make_conditional(fx, ys, hu_family, fy.support());
    const auto t = pmf_conditional_table(cond, n, cfg);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] += w * t[k];
  });
  return table;
}

double pmf_random_anchors(const DensityModel& fx, const DensityModel& fy, std::size_t n, std::size_t m, int k,
                          bool hu_family, const QuadratureConfig& cfg) {
  const auto t = pmf_random_anchors_table(fx, fy, n, m, hu_family, cfg);
  return k < 0 || k >= static_cast<int>(t.size()) ? 0.0 : t[k];
}

double expected_gamma(const DensityModel& fx, const DensityModel& fy, std::size_t n, std::size_t m, bool hu_family,
                      const QuadratureConfig& cfg) {
  if (n == 0 || m == 0) throw InvalidArgument("expected_gamma: n and m must be at least 1");
  if (m > 3) throw InvalidArgument("expected_gamma: deterministic integration needs m <= 3; use Monte Carlo");
  const auto rule = anchor_rule(fy, simplex_order(n, m));
  const int q = static_cast<int>(rule.nodes.size());
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const auto ys = fy.support();

  auto mass_left = [&](double y) { return hu_family ? (y - ys.lo) / ys.length() : fx.cdf(y); };

  // End cells: P(X_(1) < Y_(1)) and P(X_(n) > Y_(m)).
  double end_terms = 2.0;
  for (int i = 0; i < q; ++i) {
    const double u = rule.nodes[i];
    const double a = mass_left(fy.quantile(u));
    end_terms -= rule.weights[i] * dm * std::pow(1.0 - u, dm - 1.0) * std::pow(1.0 - a, dn);
    end_terms -= rule.weights[i] * dm * std::pow(u, dm - 1.0) * std::pow(a, dn);
  }

  std::vector<double> hu_p(n + 1, -1.0);
  auto p_of = [&](double lo, double hi, std::size_t k) -> double {
    if (k < 2) return 0.0;
    if (hu_family) {
      if (hu_p[k] < 0.0) hu_p[k] = p_exact(fx, k, cfg).value;
      return hu_p[k];
    }
    return p_exact(restrict_to(fx, lo, hi), k, cfg).value;
  };

  double middle = 0.0;
  for (std::size_t j = 2; j <= m; ++j) {
    const double coef = std::exp(std::lgamma(dm + 1.0) - std::lgamma(static_cast<double>(j) - 1.0) -
                                 std::lgamma(dm - static_cast<double>(j) + 1.0));
    for (int a = 0; a < q; ++a) {
      const double u = rule.nodes[a];
      for (int b = 0; b < q; ++b) {
        const double v = u + (1.0 - u) * rule.nodes[b];
        const double w = rule.weights[a] * rule.weights[b] * (1.0 - u);
        const double density = coef * std::pow(u, static_cast<double>(j) - 2.0) *
                                std::pow(1.0 - v, dm - static_cast<double>(j));
        const double ylo = fy.quantile(u);
        const double yhi = fy.quantile(v);
        const double mass = std::clamp(mass_left(yhi) - mass_left(ylo), 0.0, 1.0);
        if (!(mass > 0.0) || !(yhi > ylo)) continue;
        double s = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
          const double log_binom = std::lgamma(dn + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                                   std::lgamma(dn - static_cast<double>(k) + 1.0);
          const double pk = std::exp(log_binom + static_cast<double>(k) * std::log(mass) +
                                     (dn - static_cast<double>(k)) * std::log1p(-mass));
          if (pk == 0.0) continue;
          s += pk * (1.0 + (pk < kNegligible ? 0.0 : p_of(ylo, yhi, k)));
        }
        middle += w * density * s;
      }
    }
  }
  return end_terms + middle;
}

double expected_gamma_hu(std::size_t n, std::size_t m, const std::vector<double>& p_table) {
  if (n == 0 || m == 0) throw InvalidArgument("expected_gamma_hu: n and m must be at least 1");
  if (p_table.size() < n) throw InvalidArgument("expected_gamma_hu: p_table needs p_1..p_n");
  if (n + m <= 170) {
    auto fact = [](std::size_t k) {
      mpz_class r(1);
      for (std::size_t i = 2; i <= k; ++i) r *= static_cast<unsigned long>(i);
      return r;
    };
    mpq_class sum(0);
    for (std::size_t i = 1; i <= n; ++i)
      sum += mpq_class(fact(n + m - i - 1), fact(n - i)) * (mpq_class(1) + mpq_class(p_table[i - 1]));
    mpq_class total = mpq_class(2 * n, n + m) +
                      mpq_class(fact(n) * static_cast<unsigned long>(m * (m - 1)), fact(n + m)) * sum;
    total.canonicalize();
    return total.get_d();
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  double sum = 0.0;
  const double log_front = std::lgamma(dn + 1.0) + std::log(dm) + std::log(dm - 1.0) - std::lgamma(dn + dm + 1.0);
  for (std::size_t i = 1; i <= n && m > 1; ++i) {
    const double di = static_cast<double>(i);
    sum += std::exp(log_front + std::lgamma(dn + dm - di) - std::lgamma(dn - di + 1.0)) * (1.0 + p_table[i - 1]);
  }
  return 2.0 * dn / (dn + dm) + sum;
}

std::map<int, double> asymptotic_law_fixed_m(const std::vector<double>& p_cell_limits, std::size_t m) {
  if (m == 0) throw InvalidArgument("asymptotic_law_fixed_m: m must be at least 1");
  const std::size_t middle = m - 1;
  if (middle > 0 && p_cell_limits.size() != middle && p_cell_limits.size() != 1)
    throw InvalidArgument("asymptotic_law_fixed_m: need one limit per middle cell, or a single shared one");
  for (double p : p_cell_limits)
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("asymptotic_law_fixed_m: limits must lie in [0,1]");
  std::vector<double> dist{1.0};
  for (std::size_t j = 0; j < middle; ++j) {
    const double p = p_cell_limits.size() == 1 ? p_cell_limits[0] : p_cell_limits[j];
    std::vector<double> next(dist.size() + 1, 0.0);
    for (std::size_t v = 0; v < dist.size(); ++v) {
      next[v] += dist[v] * (1.0 - p);
      next[v + 1] += dist[v] * p;
    }
    dist = std::move(next);
  }
  std::map<int, double> law;
  for (std::size_t v = 0; v < dist.size(); ++v) law[static_cast<int>(m + 1 + v)] = dist[v];
  return law;
}

GrowthReport gamma_growth_check(const std::vector<std::size_t>& n_grid, std::size_t reps, std::uint64_t seed,
                                unsigned threads) {
  GrowthReport rep;
  const auto uniform = DensityModel::make(family::Uniform{});
  for (std::size_t n : n_grid) {
    SimulationPlan plan(uniform);
    plan.fy = uniform;
    plan.n = n;
    plan.m = n;
    plan.reps = reps;
    plan.seed = seed + n;
    plan.parallelism = threads;
    const auto emp = run(plan);
    double var = 0.0;
    const double mean = emp.mean();
    for (auto [k, c] : emp.counts) var += static_cast<double>(c) * (k - mean) * (k - mean);
    var /= std::max<double>(1.0, static_cast<double>(emp.reps) - 1.0);
    rep.points.push_back({n, mean, std::sqrt(var / static_cast<double>(emp.reps))});
  }
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    if (!(rep.points[i].mean > rep.points[i - 1].mean)) rep.strictly_increasing = false;
  if (!rep.points.empty())
    rep.last_at_least_half_n = rep.points.back().mean >= 0.5 * static_cast<double>(rep.points.back().n);
  return rep;
}

}  // namespace cccd
