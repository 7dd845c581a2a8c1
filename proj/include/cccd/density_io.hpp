#pragma once

#include <string>

#include "cccd/densities.hpp"
#include "json.hpp"

namespace cccd {

/// Parses {"family": "...", "params": {...}, "support": [lo, hi]}.
/// Errors name the offending field.
DensityModel density_from_json(const nlohmann::json& spec);
DensityModel density_from_string(const std::string& text);

nlohmann::json density_to_json(const DensityModel& model);

}  // namespace cccd
