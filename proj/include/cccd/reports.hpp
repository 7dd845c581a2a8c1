#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace cccd {

enum class Format { json, csv };

Format parse_format(const std::string& name);

/// JSON lines: a {"config": ...} header line, then one object per row.
/// CSV: a "# config: {...}" comment line, a header row, then the rows with
/// `columns` picked from each object. Keys are emitted in sorted order, so
/// the text is a pure function of the inputs.
std::string render(const nlohmann::json& config, const std::vector<std::string>& columns,
                   const std::vector<nlohmann::json>& rows, Format format);

}  // namespace cccd
