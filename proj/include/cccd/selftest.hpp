#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cccd {

struct SelftestCheck {
  std::string name;
  bool pass;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 20240601;
  /// Perturbs the closed-form values fed to the agreement check, to show
  /// that the suite notices a broken constant.
  bool inject_fault = false;
};

/// Oracle equivalence on 10^3 random instances, closed form against
/// quadrature for n in {2, 5, 10}, and pmf normalization.
std::vector<SelftestCheck> run_selftest(const SelftestOptions& options = {});

}  // namespace cccd
