#include "cccd/reference_table.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "cccd/asymptotics.hpp"
#include "cccd/densities.hpp"
#include "cccd/error.hpp"
#include "cccd/multi_anchor.hpp"

namespace cccd {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class Builder {
 public:
  void add(std::string label, double paper, double tol, Check check, const std::function<ProbabilityReport()>& f) {
    TableRow row;
    row.label = std::move(label);
    row.paper_value = paper;
    row.tolerance = tol;
    row.check = check;
    try {
      const auto r = f();
      row.computed_value = r.value;
      row.method = method_name(r.method);
      row.abs_diff = std::abs(r.value - paper);
      switch (check) {
        case Check::close: row.pass = row.abs_diff <= tol; break;
        case Check::at_most: row.pass = r.value <= tol; break;
        case Check::at_least: row.pass = r.value >= tol; break;
      }
    } catch (const std::exception& e) {
      row.method = std::string("error: ") + e.what();
      row.computed_value = std::nan("");
      row.abs_diff = std::nan("");
      row.pass = false;
    }
    rows.push_back(std::move(row));
  }

  std::vector<TableRow> rows;
};

ProbabilityReport value(double v, Method m) {
  ProbabilityReport r;
  r.value = v;
  r.method = m;
  return r;
}

}  // namespace

std::vector<TableRow> reference_table(bool include_slow, const QuadratureConfig& cfg) {
  Builder b;
  const auto uniform = DensityModel::make(family::Uniform{});

  for (std::size_t n : {1, 2, 5})
    b.add("uniform p" + std::to_string(n), 4.0 / 9.0 - 16.0 / 9.0 * std::pow(4.0, -double(n)), 1e-15, Check::close,
          [n] { return p_uniform(n); });
  b.add("uniform n=inf", 4.0 / 9.0, 1e-15, Check::close, [&] { return p_limit(uniform); });

  b.add("shrunk-uniform delta=0 p5", 4.0 / 9.0 - 16.0 / 9.0 / 1024.0, 1e-15, Check::close,
        [] { return p_closed_form(DensityModel::make(family::ShrunkUniform{0.0}), 5); });
  b.add("shrunk-uniform delta=1/3 p10", 0.0, 1e-15, Check::close,
        [] { return p_closed_form(DensityModel::make(family::ShrunkUniform{1.0 / 3.0}), 10); });
  b.add("gap-uniform delta=0.1 p5000", 1.0, 1e-9, Check::close,
        [] { return p_closed_form(DensityModel::make(family::GapUniform{0.1}), 5000); });
  b.add("gap-uniform delta=0 p5", 4.0 / 9.0 - 16.0 / 9.0 / 1024.0, 1e-15, Check::close,
        [] { return p_closed_form(DensityModel::make(family::GapUniform{0.0}), 5); });
  b.add("two-step delta=0 p3", 4.0 / 9.0 - 16.0 / 9.0 / 64.0, 1e-15, Check::close,
        [] { return p_closed_form(DensityModel::make(family::TwoStep{0.0}), 3); });

  auto limit_row = [&](const std::string& label, double paper, Family fam) {
    b.add(label, paper, 1e-12, Check::close, [fam] { return p_limit(DensityModel::make(fam)); });
  };
  limit_row("abs-sine limit", 16.0 / 25.0, family::AbsSine{});
  limit_row("piece-quadratic delta=0 limit", 16.0 / 27.0, family::PieceQuadratic{0.0});
  for (double a : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
    limit_row("linear a=" + num(a) + " limit", (4.0 - a * a) / (9.0 - a * a), family::Linear{a});
  for (double q : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    const std::string label = "q-power q=" + num(q) + " limit";
    const double paper = std::pow(2.0, q + 2.0) / (3.0 * (1.0 + std::pow(2.0, q + 1.0)));
    if (q <= 2.0) {
      limit_row(label, paper, family::QPower{q});
    } else {
      // f^(q) agrees at 0+ and 1/2+, with k = q beyond the tabulated derivative orders.
      b.add(label, paper, 1e-12, Check::close,
            [q] { return value(limit_matched_derivatives(static_cast<int>(q), 0), Method::asymptotic); });
    }
  }
  for (double d : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    limit_row("two-step delta=" + num(d) + " limit", 4.0 * (1.0 - d * d) / (9.0 - d * d), family::TwoStep{d});
    limit_row("three-step delta=" + num(d) + " limit", 4.0 * (1.0 + d) * (1.0 + d) / ((3.0 + d) * (3.0 + d)),
              family::ThreeStep{d});
  }
  b.add("arcsine limit", 1.0, 1e-6, Check::close,
        [] { return p_limit(DensityModel::make(family::ArcSine{})); });

  b.add("E gamma n=1 m=1", 1.0, 1e-12, Check::close,
        [] { return value(expected_gamma_hu(1, 1, {0.0}), Method::closed_form); });
  b.add("E gamma n=2 m=1", 4.0 / 3.0, 1e-12, Check::close,
        [] { return value(expected_gamma_hu(2, 1, {0.0, 1.0 / 3.0}), Method::closed_form); });
  b.add("E gamma n=2 m=2", 14.0 / 9.0, 1e-12, Check::close,
        [] { return value(expected_gamma_hu(2, 2, {0.0, 1.0 / 3.0}), Method::closed_form); });

  if (include_slow) {
    auto p1000 = [&](const std::string& label, double paper, double tol, Check check, Family fam) {
      b.add(label, paper, tol, check, [fam, &cfg] { return p_quadrature(DensityModel::make(fam), 1000, cfg); });
    };
    p1000("linear a=1 p1000", 0.3753, 5e-4, Check::close, family::Linear{1.0});
    p1000("abs-sine p1000", 0.6400, 5e-4, Check::close, family::AbsSine{});
    p1000("arcsine p1000", 1.000, 0.999, Check::at_least, family::ArcSine{});
    p1000("beta(4,1) p1000", 0.000005, 1e-5, Check::at_most, family::Beta{4.0, 1.0});
    p1000("beta(1,4) p1000", 0.000005, 1e-5, Check::at_most, family::Beta{1.0, 4.0});
    p1000("beta(4,2) p1000", 0.00001, 1e-5, Check::at_most, family::Beta{4.0, 2.0});
    p1000("beta(2,4) p1000", 0.00001, 1e-5, Check::at_most, family::Beta{2.0, 4.0});
    p1000("beta(2,2) p1000", 0.000001, 1e-5, Check::at_most, family::Beta{2.0, 2.0});
  }
  return b.rows;
}

nlohmann::json row_to_json(const TableRow& r) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  const char* check = r.check == Check::close ? "abs" : (r.check == Check::at_most ? "le" : "ge");
  return {{"label", r.label},         {"paper_value", r.paper_value}, {"computed_value", finite(r.computed_value)},
          {"method", r.method},       {"abs_diff", finite(r.abs_diff)}, {"tolerance", r.tolerance},
          {"check", check},           {"pass", r.pass}};
}

}  // namespace cccd
