#include "cccd/cccd_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "cccd/error.hpp"

namespace cccd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double CccdInstance::cell_lo(std::size_t j) const { return j == 0 ? -kInf : ys_[j - 1]; }
double CccdInstance::cell_hi(std::size_t j) const { return j == ys_.size() ? kInf : ys_[j]; }

CccdInstance build_instance(std::vector<double> xs, std::vector<double> ys) {
  if (ys.empty()) throw InvalidArgument("build_instance: need at least one anchor");
  for (double v : xs)
    if (!std::isfinite(v)) throw InvalidArgument("build_instance: non-finite x value");
  for (double v : ys)
    if (!std::isfinite(v)) throw InvalidArgument("build_instance: non-finite y value");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] == xs[i - 1]) throw TieError("tie: duplicate x value " + fmt(xs[i]));
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (ys[i] == ys[i - 1]) throw TieError("tie: duplicate y value " + fmt(ys[i]));

  CccdInstance inst;
  inst.offsets_.assign(ys.size() + 2, 0);
  std::size_t i = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    while (i < xs.size() && xs[i] < ys[j]) ++i;
    if (i < xs.size() && xs[i] == ys[j]) throw TieError("tie: x value equals y value " + fmt(ys[j]));
    inst.offsets_[j + 1] = i;
  }
  inst.offsets_[ys.size() + 1] = xs.size();
  inst.counts_.resize(ys.size() + 1);
  for (std::size_t j = 0; j <= ys.size(); ++j) inst.counts_[j] = inst.offsets_[j + 1] - inst.offsets_[j];
  inst.xs_ = std::move(xs);
  inst.ys_ = std::move(ys);
  return inst;
}

ProximityBall proximity_ball(const CccdInstance& inst, std::size_t i) {
  const double x = inst.xs().at(i);
  const auto& ys = inst.ys();
  const auto it = std::lower_bound(ys.begin(), ys.end(), x);
  double r = kInf;
  if (it != ys.end()) r = std::min(r, *it - x);
  if (it != ys.begin()) r = std::min(r, x - *(it - 1));
  return {x, r};
}

std::vector<std::pair<std::size_t, std::size_t>> arcs(const CccdInstance& inst) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < inst.cell_count(); ++j) {
    for (std::size_t a = inst.cell_begin(j); a < inst.cell_end(j); ++a) {
      const auto ball = proximity_ball(inst, a);
      for (std::size_t b = inst.cell_begin(j); b < inst.cell_end(j); ++b)
        if (a != b && ball.contains(inst.xs()[b])) out.emplace_back(a, b);
    }
  }
  return out;
}

GammaOneRegion gamma_one_region(const CccdInstance& inst, std::size_t j) {
  if (j == 0 || j >= inst.m()) throw InvalidArgument("gamma_one_region: not a middle cell");
  if (inst.counts()[j] == 0) throw InvalidArgument("gamma_one_region: cell is empty");
  const double min_x = inst.xs()[inst.cell_begin(j)];
  const double max_x = inst.xs()[inst.cell_end(j) - 1];
  return {(max_x + inst.cell_lo(j)) / 2.0, (min_x + inst.cell_hi(j)) / 2.0};
}

DominationResult domination_number_fast(const CccdInstance& inst) {
  DominationResult res;
  const auto& xs = inst.xs();
  for (std::size_t j = 0; j < inst.cell_count(); ++j) {
    const std::size_t nj = inst.counts()[j];
    int g = 0;
    if (nj > 0 && inst.is_end_cell(j)) {
      // The point farthest from the anchor has the largest ball and covers the rest.
      g = 1;
      res.dominating_set.push_back(j == 0 ? xs[inst.cell_begin(j)] : xs[inst.cell_end(j) - 1]);
    } else if (nj > 0) {
      const auto region = gamma_one_region(inst, j);
      std::size_t witness = inst.cell_end(j);
      for (std::size_t i = inst.cell_begin(j); i < inst.cell_end(j); ++i) {
        const double x = xs[i];
        if (x == region.lo || x == region.hi) ++res.boundary_hits;
        if (region.contains(x)) {
          witness = i;
          break;
        }
      }
      if (witness != inst.cell_end(j)) {
        g = 1;
        res.dominating_set.push_back(xs[witness]);
      } else {
        // Closest points to the midpoint from either side; each ball reaches
        // its own anchor and so covers its half.
        g = 2;
        const double mid = 0.5 * (inst.cell_lo(j) + inst.cell_hi(j));
        const auto first = xs.begin() + static_cast<std::ptrdiff_t>(inst.cell_begin(j));
        const auto last = xs.begin() + static_cast<std::ptrdiff_t>(inst.cell_end(j));
        const auto right = std::lower_bound(first, last, mid);
        res.dominating_set.push_back(*(right - 1));
        res.dominating_set.push_back(*right);
      }
    }
    res.per_interval.push_back({j, nj, g});
    res.total += g;
  }
  return res;
}

bool dominates(const CccdInstance& inst, const std::vector<double>& set) {
  std::vector<ProximityBall> balls;
  for (double s : set) {
    const auto it = std::lower_bound(inst.xs().begin(), inst.xs().end(), s);
    if (it == inst.xs().end() || *it != s) return false;
    balls.push_back(proximity_ball(inst, static_cast<std::size_t>(it - inst.xs().begin())));
  }
  for (double x : inst.xs()) {
    bool covered = false;
    for (const auto& b : balls) {
      if (b.center == x || b.contains(x)) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

int domination_number_oracle(const CccdInstance& inst) {
  const std::size_t n = inst.n();
  if (n > 20) throw InvalidArgument("domination_number_oracle: n must be at most 20");
  if (n == 0) return 0;
  // Closed out-neighbourhood bitmasks from the arc list.
  std::vector<std::uint32_t> closed(n);
  for (std::size_t i = 0; i < n; ++i) closed[i] = 1u << i;
  for (auto [a, b] : arcs(inst)) closed[a] |= 1u << b;
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  int best = static_cast<int>(n);
  for (std::uint32_t s = 1; s <= all; ++s) {
    const int size = std::popcount(s);
    if (size >= best) continue;
    std::uint32_t cover = 0;
    for (std::uint32_t t = s; t; t &= t - 1) cover |= closed[std::countr_zero(t)];
    if (cover == all) best = size;
  }
  return best;
}

std::pair<double, double> nf_ball(const DensityModel& model, double x) {
  const auto s = model.support();
  if (!(x > s.lo && x < s.hi)) throw InvalidArgument("nf_ball: x outside the support");
  const double u = model.cdf(x);
  const double r = std::min(u, 1.0 - u);
  return {model.quantile(u - r), model.quantile(u + r)};
}

int transformed_digraph_gamma(const DensityModel& model, const std::vector<double>& xs) {
  const auto s = model.support();
  std::vector<double> us;
  us.reserve(xs.size());
  for (double x : xs) {
    if (!(x > s.lo && x < s.hi)) throw InvalidArgument("transformed_digraph_gamma: x outside the support");
    us.push_back(model.cdf(x));
  }
  return domination_number_fast(build_instance(std::move(us), {0.0, 1.0})).total;
}

UpperBound upper_bound(const CccdInstance& inst) {
  UpperBound ub;
  for (std::size_t j = 0; j < inst.cell_count(); ++j) {
    const std::size_t nj = inst.counts()[j];
    if (inst.is_end_cell(j)) {
      ub.k2 += nj > 0;
    } else {
      ub.k1 += nj > 1;
      ub.k2 += nj == 1;
    }
  }
  return ub;
}

CccdInstance instance_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> xs;
  std::vector<double> ys;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    double v;
    std::string rest;
    if ((tag != "x" && tag != "y") || !(ls >> v) || (ls >> rest))
      throw InvalidArgument("instance line " + std::to_string(lineno) + ": expected 'x <value>' or 'y <value>'");
    (tag == "x" ? xs : ys).push_back(v);
  }
  return build_instance(std::move(xs), std::move(ys));
}

CccdInstance instance_from_json(const nlohmann::json& j) {
  auto read = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw InvalidArgument(std::string(key) + ": expected an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) throw InvalidArgument(std::string(key) + ": expected numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  return build_instance(read("xs"), read("ys"));
}

nlohmann::json instance_to_json(const CccdInstance& inst) { return {{"xs", inst.xs()}, {"ys", inst.ys()}}; }

nlohmann::json domination_to_json(const DominationResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.per_interval) cells.push_back({{"j", c.j + 1}, {"n_j", c.count}, {"gamma", c.gamma}});
  return {{"gamma", r.total},
          {"per_interval", cells},
          {"dominating_set", r.dominating_set},
          {"boundary_hits", r.boundary_hits}};
}

}  // namespace cccd
