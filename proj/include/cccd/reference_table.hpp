#pragma once

#include <string>
#include <vector>

#include "cccd/exact_dist.hpp"
#include "json.hpp"

namespace cccd {

enum class Check { close, at_most, at_least };

/// One checkable published value next to the recomputed one.
struct TableRow {
  std::string label;
  double paper_value = 0.0;
  double computed_value = 0.0;
  std::string method;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  Check check = Check::close;
  bool pass = false;
};

/// `include_slow` adds the n = 1000 quadrature rows.
std::vector<TableRow> reference_table(bool include_slow = true, const QuadratureConfig& cfg = {});

nlohmann::json row_to_json(const TableRow& r);

}  // namespace cccd
