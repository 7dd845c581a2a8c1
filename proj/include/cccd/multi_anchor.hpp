#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "cccd/densities.hpp"
#include "cccd/exact_dist.hpp"

namespace cccd {

/// Enumerates Θ^S_{a,b} with S = {0, ..., max_part} in lexicographic order.
class CompositionIterator {
 public:
  CompositionIterator(int total, int parts, int max_part);
  bool done() const { return done_; }
  const std::vector<int>& operator*() const { return current_; }
  CompositionIterator& operator++();

 private:
  void fill_from(int index, int remaining);

  int total_;
  int parts_;
  int max_part_;
  bool done_ = false;
  std::vector<int> current_;
};

/// Anchors with the X-mass of every cell and the law inside each middle cell.
struct AnchorConditional {
  std::vector<double> anchors;
  /// m + 1 cell masses, end cells included.
  std::vector<double> cell_probs;
  /// m - 1 middle-cell models on (0,1); null when the cell has no mass.
  std::vector<std::shared_ptr<const DensityModel>> cell_models;
};

/// Regular mode: masses from fx.cdf, cell laws are fx restricted to the cell.
/// H_U mode: masses are cell lengths relative to `hu_support` and every
/// middle cell follows fx itself.
AnchorConditional make_conditional(const DensityModel& fx, std::vector<double> anchors, bool hu_family = false,
                                   SupportInterval hu_support = {});

/// Largest n + m handled by exact enumeration.
inline constexpr std::size_t kMaxEnumeration = 24;

/// P(γ = k | anchors) by the double composition sum.
double pmf_conditional(const AnchorConditional& cond, std::size_t n, int k, const QuadratureConfig& cfg = {});

/// All of P(γ = k | anchors), k = 0..2m, by per-cell convolution.
std::vector<double> pmf_conditional_table(const AnchorConditional& cond, std::size_t n,
                                          const QuadratureConfig& cfg = {});

/// Unconditional pmf over ordered anchors drawn from fy; m <= 3.
std::vector<double> pmf_random_anchors_table(const DensityModel& fx, const DensityModel& fy, std::size_t n,
                                             std::size_t m, bool hu_family = false, const QuadratureConfig& cfg = {});
double pmf_random_anchors(const DensityModel& fx, const DensityModel& fy, std::size_t n, std::size_t m, int k,
                          bool hu_family = false, const QuadratureConfig& cfg = {});

/// End-cell occupation probabilities plus the per-cell count expansion.
double expected_gamma(const DensityModel& fx, const DensityModel& fy, std::size_t n, std::size_t m,
                      bool hu_family = false, const QuadratureConfig& cfg = {});

/// p_table[i-1] = p_i(F) for i = 1..n.
double expected_gamma_hu(std::size_t n, std::size_t m, const std::vector<double>& p_table);

/// Law of m + 1 + Σ B_j over the m - 1 middle cells. A single limit is
/// used for every cell.
std::map<int, double> asymptotic_law_fixed_m(const std::vector<double>& p_cell_limits, std::size_t m);

struct GrowthPoint {
  std::size_t n;
  double mean;
  double std_error;
};

struct GrowthReport {
  std::vector<GrowthPoint> points;
  bool strictly_increasing = true;
  bool last_at_least_half_n = true;
};

/// Monte Carlo E[γ(D_{n,n})] for uniform X and uniform anchors.
GrowthReport gamma_growth_check(const std::vector<std::size_t>& n_grid, std::size_t reps, std::uint64_t seed,
                                unsigned threads = 0);

}  // namespace cccd
