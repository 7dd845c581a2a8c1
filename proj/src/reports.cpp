#include "cccd/reports.hpp"

#include <sstream>

#include "cccd/error.hpp"

namespace cccd {
namespace {

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  }
  if (v.is_structured()) return csv_cell(nlohmann::json(v.dump()));
  return v.dump();
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw InvalidArgument("format: expected json or csv");
}

std::string render(const nlohmann::json& config, const std::vector<std::string>& columns,
                   const std::vector<nlohmann::json>& rows, Format format) {
  std::ostringstream os;
  if (format == Format::json) {
    os << nlohmann::json{{"config", config}}.dump() << '\n';
    for (const auto& r : rows) os << r.dump() << '\n';
    return os.str();
  }
  os << "# config: " << config.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << (i ? "," : "") << (r.contains(columns[i]) ? csv_cell(r.at(columns[i])) : "");
    os << '\n';
  }
  return os.str();
}

}  // namespace cccd
