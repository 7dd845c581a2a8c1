#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cccd/densities.hpp"
#include "json.hpp"

namespace cccd {

/// One simulation setup. Anchors are either `anchors` (fixed) or m draws
/// from `fy` per replicate.
struct SimulationPlan {
  explicit SimulationPlan(DensityModel x) : fx(std::move(x)) {}

  DensityModel fx;
  std::optional<DensityModel> fy;
  std::vector<double> anchors;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  /// 0 picks the default worker count.
  unsigned parallelism = 0;
  /// Cell masses proportional to cell length on `hu_support`, and within a
  /// cell X follows fx rescaled to that cell.
  bool hu_family = false;
  SupportInterval hu_support{};
  /// Use the N_F digraph: points and anchors are mapped through fx.cdf.
  bool transformed = false;
};

struct CellTally {
  std::uint64_t gamma1 = 0;
  std::uint64_t gamma2 = 0;
};

struct EmpiricalDistribution {
  std::map<int, std::uint64_t> counts;
  std::uint64_t reps = 0;
  /// Middle cells keyed by (0-based cell index, points in the cell).
  std::map<std::pair<std::size_t, std::size_t>, CellTally> cells;
  std::uint64_t bound_violations = 0;
  std::uint64_t boundary_hits = 0;
  std::uint64_t tie_resamples = 0;

  std::uint64_t count(int k) const;
  double fraction(int k) const;
  double mean() const;
  void merge(const EmpiricalDistribution& other);
};

/// Worker count: CCCD_THREADS caps `requested` (or the hardware count when 0).
unsigned resolve_threads(unsigned requested);

/// Replicate r draws from the Philox stream (seed, r), so the counts do not
/// depend on the worker count.
EmpiricalDistribution run(const SimulationPlan& plan);

struct AtomComparison {
  int k;
  double empirical;
  double predicted;
  double z;
};

struct ComparisonVerdict {
  double statistic = 0.0;  // max |z|
  double threshold = 4.0;
  bool pass = true;
  std::vector<AtomComparison> per_atom;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Per-atom binomial z-scores; pass iff every |z| <= threshold.
ComparisonVerdict compare(const EmpiricalDistribution& empirical, const std::map<int, double>& predicted,
                          double threshold = 4.0);

/// Law of 1 + Bernoulli(p).
std::map<int, double> one_plus_bernoulli(double p);

nlohmann::json empirical_to_json(const EmpiricalDistribution& e);
nlohmann::json verdict_to_json(const ComparisonVerdict& v);

}  // namespace cccd
