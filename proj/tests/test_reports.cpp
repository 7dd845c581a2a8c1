#include <doctest.h>

#include <set>

#include "cccd/error.hpp"
#include "cccd/reference_table.hpp"
#include "cccd/reports.hpp"
#include "cccd/selftest.hpp"

using namespace cccd;
using nlohmann::json;

TEST_CASE("json lines rendering") {
  const json config = {{"n", 5}, {"command", "exact"}};
  const auto text = render(config, {"k"}, {json{{"k", 1}, {"p", 0.5}}}, Format::json);
  CHECK(text == "{\"config\":{\"command\":\"exact\",\"n\":5}}\n{\"k\":1,\"p\":0.5}\n");
}

TEST_CASE("csv rendering quotes awkward cells") {
  const json config = {{"command", "simulate"}};
  const std::vector<json> rows{{{"k", 1}, {"label", "a,b"}, {"meta", {{"x", 1}}}},
                               {{"k", 2}, {"label", "say \"hi\""}, {"meta", nullptr}}};
  const auto text = render(config, {"k", "label", "meta", "missing"}, rows, Format::csv);
  CHECK(text ==
        "# config: {\"command\":\"simulate\"}\n"
        "k,label,meta,missing\n"
        "1,\"a,b\",\"{\"\"x\"\":1}\",\n"
        "2,\"say \"\"hi\"\"\",,\n");
}

TEST_CASE("format names") {
  CHECK(parse_format("json") == Format::json);
  CHECK(parse_format("csv") == Format::csv);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("reference table without the slow rows passes") {
  const auto rows = reference_table(false);
  CHECK(rows.size() > 30);
  std::set<std::string> labels;
  for (const auto& r : rows) {
    CAPTURE(r.label);
    CHECK(r.pass);
    CHECK(labels.insert(r.label).second);
  }
  CHECK(labels.count("uniform n=inf") == 1);
  CHECK(labels.count("E gamma n=2 m=2") == 1);
}

TEST_CASE("reference table with the slow rows") {
  const auto rows = reference_table(true);
  std::set<std::string> failing;
  for (const auto& r : rows) {
    if (!r.pass) failing.insert(r.label);
    if (r.label == "abs-sine p1000") CHECK(r.computed_value == doctest::Approx(0.6400).epsilon(1e-3));
    if (r.label == "linear a=1 p1000") CHECK(std::abs(r.computed_value - 0.3753) <= 5e-4);
    if (r.label == "beta(4,1) p1000") CHECK(r.computed_value <= 1e-5);
  }
  // Recomputed values disagree with the published ones for these two.
  CHECK(failing == std::set<std::string>{"arcsine p1000", "beta(2,2) p1000"});

  const auto j = row_to_json(rows.front());
  for (const char* key : {"label", "paper_value", "computed_value", "method", "abs_diff", "pass"})
    CHECK(j.contains(key));
}

TEST_CASE("selftest") {
  const auto clean = run_selftest();
  REQUIRE(clean.size() == 3);
  for (const auto& c : clean) CHECK(c.pass);

  SelftestOptions broken;
  broken.inject_fault = true;
  bool any_fail = false;
  for (const auto& c : run_selftest(broken)) any_fail = any_fail || !c.pass;
  CHECK(any_fail);
}
