#include "cccd/density_io.hpp"

#include <functional>
#include <map>
#include <set>

#include "cccd/error.hpp"

namespace cccd {
namespace {

using nlohmann::json;

double number_param(const json& params, const std::string& key) {
  if (!params.contains(key)) throw InvalidArgument("params." + key + ": missing");
  const auto& v = params.at(key);
  if (!v.is_number()) throw InvalidArgument("params." + key + ": expected a number");
  return v.get<double>();
}

void reject_unknown(const json& params, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : params.items())
    if (!allowed.count(key)) throw InvalidArgument("params." + key + ": unknown parameter");
}

using Builder = std::function<Family(const json&)>;

const std::map<std::string, std::pair<std::set<std::string>, Builder>>& registry() {
  static const std::map<std::string, std::pair<std::set<std::string>, Builder>> table = {
      {"uniform", {{}, [](const json&) -> Family { return family::Uniform{}; }}},
      {"shrunk-uniform",
       {{"delta"}, [](const json& p) -> Family { return family::ShrunkUniform{number_param(p, "delta")}; }}},
      {"gap-uniform",
       {{"delta"}, [](const json& p) -> Family { return family::GapUniform{number_param(p, "delta")}; }}},
      {"two-step", {{"delta"}, [](const json& p) -> Family { return family::TwoStep{number_param(p, "delta")}; }}},
      {"three-step",
       {{"delta"}, [](const json& p) -> Family { return family::ThreeStep{number_param(p, "delta")}; }}},
      {"linear", {{"a"}, [](const json& p) -> Family { return family::Linear{number_param(p, "a")}; }}},
      {"truncated-normal",
       {{"mu", "sigma"},
        [](const json& p) -> Family {
          return family::TruncatedNormal{number_param(p, "mu"), number_param(p, "sigma")};
        }}},
      {"q-power", {{"q"}, [](const json& p) -> Family { return family::QPower{number_param(p, "q")}; }}},
      {"piece-quadratic",
       {{"delta"}, [](const json& p) -> Family { return family::PieceQuadratic{number_param(p, "delta")}; }}},
      {"arcsine", {{}, [](const json&) -> Family { return family::ArcSine{}; }}},
      {"abs-sine", {{}, [](const json&) -> Family { return family::AbsSine{}; }}},
      {"beta",
       {{"nu1", "nu2"},
        [](const json& p) -> Family { return family::Beta{number_param(p, "nu1"), number_param(p, "nu2")}; }}},
      {"square-cdf", {{}, [](const json&) -> Family { return family::SquareCdf{}; }}},
      {"general-linear",
       {{"a"}, [](const json& p) -> Family { return family::GeneralLinear{number_param(p, "a")}; }}},
  };
  return table;
}

}  // namespace

DensityModel density_from_json(const json& desc) {
  if (!desc.is_object()) throw InvalidArgument("density: expected a JSON object");
  for (const auto& [key, _] : desc.items())
    if (key != "family" && key != "params" && key != "support")
      throw InvalidArgument(key + ": unknown field");
  if (!desc.contains("family") || !desc.at("family").is_string())
    throw InvalidArgument("family: missing or not a string");
  const std::string name = desc.at("family").get<std::string>();
  const auto it = registry().find(name);
  if (it == registry().end()) throw InvalidArgument("family: unknown family '" + name + "'");

  json params = json::object();
  if (desc.contains("params")) {
    params = desc.at("params");
    if (!params.is_object()) throw InvalidArgument("params: expected an object");
  }
  reject_unknown(params, it->second.first);

  SupportInterval support;
  if (desc.contains("support")) {
    const auto& s = desc.at("support");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
      throw InvalidArgument("support: expected [lo, hi]");
    support = {s[0].get<double>(), s[1].get<double>()};
  }
  return DensityModel::make(it->second.second(params), support);
}

DensityModel density_from_string(const std::string& text) {
  json desc;
  try {
    desc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("density: malformed JSON: ") + e.what());
  }
  return density_from_json(desc);
}

json density_to_json(const DensityModel& model) {
  json params = json::object();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::ShrunkUniform> || std::is_same_v<T, family::GapUniform> ||
                      std::is_same_v<T, family::TwoStep> || std::is_same_v<T, family::ThreeStep> ||
                      std::is_same_v<T, family::PieceQuadratic>) {
          params["delta"] = f.delta;
        } else if constexpr (std::is_same_v<T, family::Linear> || std::is_same_v<T, family::GeneralLinear>) {
          params["a"] = f.a;
        } else if constexpr (std::is_same_v<T, family::TruncatedNormal>) {
          params["mu"] = f.mu;
          params["sigma"] = f.sigma;
        } else if constexpr (std::is_same_v<T, family::QPower>) {
          params["q"] = f.q;
        } else if constexpr (std::is_same_v<T, family::Beta>) {
          params["nu1"] = f.nu1;
          params["nu2"] = f.nu2;
        } else if constexpr (std::is_same_v<T, family::Restricted>) {
          params["base"] = density_to_json(*f.base);
          params["lo"] = f.lo;
          params["hi"] = f.hi;
        }
      },
      model.family());
  return {{"family", model.name()}, {"params", params}, {"support", {model.support().lo, model.support().hi}}};
}

}  // namespace cccd
