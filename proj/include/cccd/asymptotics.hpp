#pragma once

#include "cccd/densities.hpp"
#include "cccd/exact_dist.hpp"
#include "json.hpp"

namespace cccd {

/// Orders and one-sided derivative values at lo, mid and hi that give p_F.
struct AsymptoticProfile {
  int k = 0;
  int ell = 0;
  double d_lo = 0.0;
  double d_hi = 0.0;
  double d_mid_right = 0.0;
  double d_mid_left = 0.0;
  double alpha_k = 0.0;
  double beta_ell = 0.0;
  double p_limit = 0.0;
};

/// Throws InvalidArgument when a needed derivative is infinite (use
/// limit_unbounded) or no order up to 2 satisfies the hypotheses.
AsymptoticProfile asymptotic_profile(const DensityModel& model);

/// True when the profile would need an unbounded derivative value.
bool needs_unbounded_limit(const DensityModel& model);

/// Limit formula stated for the family; throws for families without one.
double limit_family_formula(const DensityModel& model);

/// δ → 0+ limit of the derivative ratio evaluated off the critical points.
double limit_unbounded(const DensityModel& model);

double limit_matched_derivatives(int k, int ell);

/// p_F as a report: the profile when bounded, limit_unbounded otherwise.
ProbabilityReport p_limit(const DensityModel& model);

/// Leading correction p_n - p_F ≈ c1 n^{-e1} + c2 n^{-e2}.
/// Informational: assembled from the first-order expansion at the corner.
struct RateConstant {
  double c1 = 0.0;
  double e1 = 0.0;
  double c2 = 0.0;
  double e2 = 0.0;
  double correction(double n) const;
};

RateConstant rate_constant(const DensityModel& model);

nlohmann::json profile_to_json(const AsymptoticProfile& p);

}  // namespace cccd
