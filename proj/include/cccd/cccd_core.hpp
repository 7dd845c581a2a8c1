#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cccd/densities.hpp"
#include "json.hpp"

namespace cccd {

/// Sorted X-sample and Y-anchors. Cell j (0-based, j = 0..m) is
/// (ys[j-1], ys[j]) with ys[-1] = -inf and ys[m] = +inf.
class CccdInstance {
 public:
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  std::size_t n() const { return xs_.size(); }
  std::size_t m() const { return ys_.size(); }
  std::size_t cell_count() const { return ys_.size() + 1; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  /// Index into xs() of the first point of cell j.
  std::size_t cell_begin(std::size_t j) const { return offsets_[j]; }
  std::size_t cell_end(std::size_t j) const { return offsets_[j + 1]; }
  double cell_lo(std::size_t j) const;
  double cell_hi(std::size_t j) const;
  bool is_end_cell(std::size_t j) const { return j == 0 || j == ys_.size(); }

 private:
  friend CccdInstance build_instance(std::vector<double> xs, std::vector<double> ys);
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> offsets_;
};

/// Sorts and partitions. Throws TieError on x = y, duplicate values or
/// non-finite input; ys must be nonempty.
CccdInstance build_instance(std::vector<double> xs, std::vector<double> ys);

/// Raised by build_instance; Monte Carlo callers resample on it.
class TieError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProximityBall {
  double center;
  double radius;
  /// Open-ball membership, strict on both sides.
  bool contains(double x) const { return x > center - radius && x < center + radius; }
};

ProximityBall proximity_ball(const CccdInstance& inst, std::size_t i);

/// Loopless arc list (i, j), indices into xs(), sorted lexicographically.
std::vector<std::pair<std::size_t, std::size_t>> arcs(const CccdInstance& inst);

struct GammaOneRegion {
  double lo;
  double hi;
  bool empty() const { return !(lo < hi); }
  bool contains(double x) const { return x > lo && x < hi; }
};

/// Region for a middle cell j (0-based, 1 <= j <= m-1) with points in it.
GammaOneRegion gamma_one_region(const CccdInstance& inst, std::size_t j);

struct CellDomination {
  std::size_t j;
  std::size_t count;
  int gamma;
};

struct DominationResult {
  int total = 0;
  std::vector<CellDomination> per_interval;
  std::vector<double> dominating_set;
  /// Floating-point ties on a Γ1 boundary, counted as non-membership.
  std::size_t boundary_hits = 0;
};

DominationResult domination_number_fast(const CccdInstance& inst);

/// Exhaustive minimum dominating set over all vertex subsets; n <= 20.
int domination_number_oracle(const CccdInstance& inst);

/// Whether every vertex is in `set` or inside the ball of a member.
bool dominates(const CccdInstance& inst, const std::vector<double>& set);

/// Domination number under N_F(x) = F^{-1}(N_Y(F(x))) with ys = {0, 1}.
int transformed_digraph_gamma(const DensityModel& model, const std::vector<double>& xs);

/// N_F(x) as an interval of the original scale.
std::pair<double, double> nf_ball(const DensityModel& model, double x);

/// k1: middle cells with at least two points; k2: occupied end cells plus
/// middle cells holding exactly one point. Then γ <= 2 k1 + k2.
struct UpperBound {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t bound() const { return 2 * k1 + k2; }
};
UpperBound upper_bound(const CccdInstance& inst);

/// Lines "x <value>" / "y <value>"; blank lines and '#' comments ignored.
CccdInstance instance_from_text(const std::string& text);
CccdInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const CccdInstance& inst);
nlohmann::json domination_to_json(const DominationResult& r);

}  // namespace cccd
