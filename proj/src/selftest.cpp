#include "cccd/selftest.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cccd/cccd_core.hpp"
#include "cccd/densities.hpp"
#include "cccd/exact_dist.hpp"
#include "cccd/multi_anchor.hpp"
#include "cccd/rng.hpp"

namespace cccd {
namespace {

std::vector<DensityModel> mixed_families() {
  return {DensityModel::make(family::Uniform{}),        DensityModel::make(family::Linear{1.5}),
          DensityModel::make(family::GapUniform{0.1}),  DensityModel::make(family::Beta{2.0, 5.0}),
          DensityModel::make(family::AbsSine{}),        DensityModel::make(family::ArcSine{}),
          DensityModel::make(family::ThreeStep{-0.5})};
}

SelftestCheck oracle_check(std::uint64_t seed) {
  const auto models = mixed_families();
  std::size_t mismatches = 0;
  std::size_t bad_witness = 0;
  std::size_t bound_violations = 0;
  std::size_t done = 0;
  for (std::uint64_t r = 0; done < 1000; ++r) {
    RandomStream rng(seed, r);
    const auto& fx = models[rng.next_u64() % models.size()];
    const std::size_t n = rng.next_u64() % 13;
    const std::size_t m = 1 + rng.next_u64() % 4;
    std::vector<double> ys(m);
    for (auto& y : ys) y = -0.2 + 1.4 * rng.next_uniform();
    try {
      const auto inst = build_instance(fx.sample(n, rng), ys);
      const auto fast = domination_number_fast(inst);
      if (fast.total != domination_number_oracle(inst)) ++mismatches;
      if (!dominates(inst, fast.dominating_set)) ++bad_witness;
      const auto g = static_cast<std::size_t>(fast.total);
      if (g > upper_bound(inst).bound() || g > std::min(n, 2 * m)) ++bound_violations;
      ++done;
    } catch (const TieError&) {
    }
  }
  std::ostringstream os;
  os << "instances=" << done << " mismatches=" << mismatches << " bad_witness=" << bad_witness
     << " bound_violations=" << bound_violations;
  return {"oracle equivalence", mismatches == 0 && bad_witness == 0 && bound_violations == 0, os.str()};
}

SelftestCheck agreement_check(bool inject_fault) {
  const std::vector<DensityModel> models{DensityModel::make(family::ShrunkUniform{0.1}),
                                         DensityModel::make(family::GapUniform{0.1}),
                                         DensityModel::make(family::TwoStep{0.5})};
  double worst = 0.0;
  for (const auto& m : models) {
    for (std::size_t n : {2, 5, 10}) {
      double closed = p_closed_form(m, n).value;
      if (inject_fault) closed += 1e-3;
      worst = std::max(worst, std::abs(closed - p_quadrature(m, n).value));
    }
  }
  for (std::size_t n : {2, 5, 10}) {
    const auto sq = DensityModel::make(family::SquareCdf{});
    worst = std::max(worst, std::abs(p_multinomial_squarecdf(n).value - p_quadrature(sq, n).value));
  }
  std::ostringstream os;
  os << "max |exact - quadrature| = " << worst;
  return {"method agreement", worst <= 1e-6, os.str()};
}

SelftestCheck normalization_check() {
  const auto uniform = DensityModel::make(family::Uniform{});
  const auto linear = DensityModel::make(family::Linear{1.0});
  double worst = 0.0;
  for (std::size_t m = 1; m <= 4; ++m) {
    std::vector<double> anchors;
    for (std::size_t i = 1; i <= m; ++i) anchors.push_back(double(i) / double(m + 1));
    for (std::size_t n = 1; n + m <= 8; ++n) {
      for (const auto* fx : {&uniform, &linear}) {
        const auto cond = make_conditional(*fx, anchors);
        double total = 0.0;
        for (int k = 0; k <= int(2 * m); ++k) total += pmf_conditional(cond, n, k);
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
  }
  std::ostringstream os;
  os << "max |sum pmf - 1| = " << worst;
  return {"pmf normalization", worst <= 1e-9, os.str()};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  return {oracle_check(options.seed), agreement_check(options.inject_fault), normalization_check()};
}

}  // namespace cccd
