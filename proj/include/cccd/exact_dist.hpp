#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cccd/densities.hpp"
#include "json.hpp"

namespace cccd {

enum class Method { closed_form, multinomial, quadrature, monte_carlo, asymptotic };

std::string method_name(Method m);

/// A value of p_n(F) or p_F. `n` is 0 for limits.
struct ProbabilityReport {
  double value = 0.0;
  std::size_t n = 0;
  Method method = Method::closed_form;
  double abs_error_bound = 0.0;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json report_to_json(const ProbabilityReport& r);

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 20000;
  bool log_domain = true;

  void validate() const;
};

/// 4/9 - (16/9) 4^{-n}.
ProbabilityReport p_uniform(std::size_t n);

bool has_closed_form(const DensityModel& model);
/// Uniform, ShrunkUniform, GapUniform and TwoStep; anything else throws.
ProbabilityReport p_closed_form(const DensityModel& model, std::size_t n);

/// Integrates n(n-1) f(x1) f(xn) G^{n-2} over the region where neither
/// extreme lies in the Γ1-region. Throws ConvergenceError when a
/// subdivision limit is hit.
ProbabilityReport p_quadrature(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg = {});

/// Exact rational evaluation for f(x) = 2x, 2 <= n <= 60.
ProbabilityReport p_multinomial_squarecdf(std::size_t n);

/// Fraction of γ = 2 over `reps` samples with anchors at the support ends;
/// the error bound is the 95% Wilson half-width.
ProbabilityReport p_monte_carlo(const DensityModel& model, std::size_t n, std::size_t reps, std::uint64_t seed,
                                unsigned threads = 0);

/// Closed form when available, the exact polynomial route for SquareCdf,
/// quadrature otherwise.
ProbabilityReport p_exact(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg = {});

enum class StochasticOrder { below_uniform, above_uniform, equal, inconclusive };
std::string order_name(StochasticOrder o);

StochasticOrder check_stochastic_order(const DensityModel& model, std::size_t n, const QuadratureConfig& cfg = {});

}  // namespace cccd
