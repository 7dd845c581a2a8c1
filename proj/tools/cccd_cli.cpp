#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "cccd/asymptotics.hpp"
#include "cccd/cccd_core.hpp"
#include "cccd/density_io.hpp"
#include "cccd/error.hpp"
#include "cccd/exact_dist.hpp"
#include "cccd/montecarlo.hpp"
#include "cccd/multi_anchor.hpp"
#include "cccd/reference_table.hpp"
#include "cccd/reports.hpp"
#include "cccd/selftest.hpp"

namespace {

using nlohmann::json;
using namespace cccd;

constexpr int kOk = 0;
constexpr int kComputationFailure = 1;
constexpr int kBadArguments = 2;
constexpr int kTableMismatch = 3;

struct Options {
  std::string density = R"({"family":"uniform"})";
  std::string fx;
  std::string fy;
  std::string anchors;
  std::size_t n = 5;
  std::size_t m = 2;
  std::size_t reps = 100000;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::string out;
  std::string format = "json";
  std::string input;
  bool hu = false;
  bool transformed = false;
  bool paper = false;
  bool inject_fault = false;
};

QuadratureConfig quad_config(const Options& o) {
  QuadratureConfig cfg;
  cfg.rel_tol = o.rel_tol;
  cfg.abs_tol = o.abs_tol;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("anchors: '" + item + "' is not a number");
    }
  }
  return out;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(std::to_string(v)); }

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InvalidArgument("out: cannot open " + o.out);
  f << text;
}

json base_config(const std::string& command, const Options& o) {
  return {{"command", command}, {"format", o.format}};
}

int cmd_exact(const Options& o, bool force_quadrature) {
  const auto model = density_from_string(o.density);
  const auto cfg = quad_config(o);
  auto config = base_config(force_quadrature ? "quadrature" : "exact", o);
  config["density"] = density_to_json(model);
  config["n"] = o.n;
  config["rel_tol"] = cfg.rel_tol;
  config["abs_tol"] = cfg.abs_tol;
  const auto r = force_quadrature ? p_quadrature(model, o.n, cfg) : p_exact(model, o.n, cfg);
  auto row = report_to_json(r);
  emit(o, render(config, {"n", "value", "method", "error_bound", "meta"}, {row}, parse_format(o.format)));
  return kOk;
}

int cmd_asymptotic(const Options& o) {
  const auto model = density_from_string(o.density);
  auto config = base_config("asymptotic", o);
  config["density"] = density_to_json(model);
  const auto d = density_to_json(model);
  json row = {{"family", d["family"]}, {"params", d["params"]}};
  if (needs_unbounded_limit(model)) {
    row["k"] = nullptr;
    row["ell"] = nullptr;
    row["p_limit"] = limit_unbounded(model);
    row["method"] = "unbounded-ratio";
  } else {
    const auto p = asymptotic_profile(model);
    row["k"] = p.k;
    row["ell"] = p.ell;
    row["p_limit"] = p.p_limit;
    row["method"] = "derivative-profile";
  }
  try {
    row["family_formula"] = limit_family_formula(model);
  } catch (const InvalidArgument&) {
    row["family_formula"] = nullptr;
  }
  emit(o, render(config, {"family", "params", "k", "ell", "p_limit", "family_formula", "method"}, {row},
                 parse_format(o.format)));
  return kOk;
}

/// Random-anchor predictions integrate the exact pmf over the anchor
/// simplex; past these sizes that costs far more than the simulation.
constexpr std::size_t kRandomAnchorPredictionLimit = 12;
constexpr std::size_t kRandomAnchorPredictionMaxM = 2;

int cmd_simulate(const Options& o) {
  const auto fx = density_from_string(o.fx.empty() ? o.density : o.fx);
  SimulationPlan plan(fx);
  plan.n = o.n;
  plan.reps = o.reps;
  plan.seed = o.seed;
  plan.parallelism = o.threads;
  plan.hu_family = o.hu;
  plan.transformed = o.transformed;
  auto config = base_config("simulate", o);
  config["fx"] = density_to_json(fx);
  if (!o.fy.empty()) {
    plan.fy = density_from_string(o.fy);
    plan.m = o.m;
    plan.hu_support = plan.fy->support();
    config["fy"] = density_to_json(*plan.fy);
    config["m"] = o.m;
  } else {
    plan.anchors = o.anchors.empty() ? std::vector<double>{fx.support().lo, fx.support().hi} : parse_list(o.anchors);
    plan.hu_support = fx.support();
    config["anchors"] = plan.anchors;
  }
  config["n"] = o.n;
  config["reps"] = o.reps;
  config["seed"] = o.seed;
  config["hu"] = o.hu;
  config["transformed"] = o.transformed;

  const auto emp = run(plan);

  // Predicted law where an exact route exists.
  std::optional<std::map<int, double>> predicted;
  try {
    if (o.transformed) {
      if (plan.anchors.size() == 2 && plan.anchors[0] == fx.support().lo && plan.anchors[1] == fx.support().hi)
        predicted = o.n == 0 ? std::map<int, double>{{0, 1.0}} : one_plus_bernoulli(p_uniform(o.n).value);
    } else if (!plan.fy) {
      const auto cond = make_conditional(fx, plan.anchors, o.hu, plan.hu_support);
      const auto t = pmf_conditional_table(cond, o.n, quad_config(o));
      predicted.emplace();
      for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] > 0.0) (*predicted)[static_cast<int>(k)] = t[k];
    } else if (o.m <= kRandomAnchorPredictionMaxM && o.n + o.m <= kRandomAnchorPredictionLimit) {
      const auto t = pmf_random_anchors_table(fx, *plan.fy, o.n, o.m, o.hu, quad_config(o));
      predicted.emplace();
      for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] > 0.0) (*predicted)[static_cast<int>(k)] = t[k];
    }
  } catch (const std::exception&) {
    predicted.reset();
  }

  std::vector<json> rows;
  std::map<int, double> z;
  config["verdict"] = nullptr;
  if (predicted) {
    const auto v = compare(emp, *predicted);
    for (const auto& a : v.per_atom) z[a.k] = a.z;
    config["verdict"] = v.pass ? "pass" : "fail";
    config["chi_square"] = v.metadata["chi_square"];
  }
  std::set<int> ks;
  for (auto [k, _] : emp.counts) ks.insert(k);
  if (predicted)
    for (auto [k, _] : *predicted) ks.insert(k);
  for (int k : ks) {
    json row = {{"k", k}, {"count", emp.count(k)}, {"fraction", emp.fraction(k)}};
    if (predicted) {
      const auto it = predicted->find(k);
      row["predicted"] = it == predicted->end() ? 0.0 : it->second;
      row["z"] = jnum(z[k]);
    } else {
      row["predicted"] = nullptr;
      row["z"] = nullptr;
    }
    rows.push_back(row);
  }
  config["mean"] = emp.mean();
  config["bound_violations"] = emp.bound_violations;
  config["boundary_hits"] = emp.boundary_hits;
  config["tie_resamples"] = emp.tie_resamples;
  emit(o, render(config, {"k", "count", "fraction", "predicted", "z"}, rows, parse_format(o.format)));
  return kOk;
}

int cmd_multi(const Options& o) {
  const auto fx = density_from_string(o.fx.empty() ? o.density : o.fx);
  const auto cfg = quad_config(o);
  auto config = base_config("multi", o);
  config["fx"] = density_to_json(fx);
  config["n"] = o.n;
  config["hu"] = o.hu;
  std::vector<double> table;
  std::optional<double> expectation;
  std::optional<EmpiricalDistribution> emp;
  std::optional<DensityModel> fy;
  std::vector<double> anchors;
  if (!o.anchors.empty()) {
    anchors = parse_list(o.anchors);
    config["anchors"] = anchors;
  } else {
    fy = density_from_string(o.fy.empty() ? R"({"family":"uniform"})" : o.fy);
    config["fy"] = density_to_json(*fy);
    config["m"] = o.m;
  }
  if (o.mc > 0) {
    SimulationPlan plan(fx);
    plan.n = o.n;
    plan.reps = o.mc;
    plan.seed = o.seed;
    plan.parallelism = o.threads;
    plan.hu_family = o.hu;
    if (fy) {
      plan.fy = fy;
      plan.m = o.m;
      plan.hu_support = fy->support();
    } else {
      plan.anchors = anchors;
      plan.hu_support = fx.support();
    }
    config["mc"] = o.mc;
    config["seed"] = o.seed;
    emp = run(plan);
    expectation = emp->mean();
    for (auto [k, c] : emp->counts) {
      if (table.size() <= static_cast<std::size_t>(k)) table.resize(k + 1, 0.0);
      table[k] = emp->fraction(k);
    }
    config["method"] = "monte-carlo";
  } else if (fy) {
    table = pmf_random_anchors_table(fx, *fy, o.n, o.m, o.hu, cfg);
    expectation = expected_gamma(fx, *fy, o.n, o.m, o.hu, cfg);
    config["method"] = "exact";
  } else {
    const auto cond = make_conditional(fx, anchors, o.hu, fx.support());
    table = pmf_conditional_table(cond, o.n, cfg);
    double e = 0.0;
    for (std::size_t k = 0; k < table.size(); ++k) e += static_cast<double>(k) * table[k];
    expectation = e;
    config["method"] = "exact";
  }
  config["expected_gamma"] = *expectation;
  std::vector<json> rows;
  for (std::size_t k = 0; k < table.size(); ++k) rows.push_back({{"k", k}, {"probability", table[k]}});
  emit(o, render(config, {"k", "probability"}, rows, parse_format(o.format)));
  return kOk;
}

int cmd_table(const Options& o) {
  auto config = base_config("table", o);
  config["paper"] = o.paper;
  const auto rows = reference_table(o.paper, quad_config(o));
  std::vector<json> out;
  bool all_pass = true;
  for (const auto& r : rows) {
    out.push_back(row_to_json(r));
    all_pass = all_pass && r.pass;
  }
  config["all_pass"] = all_pass;
  emit(o, render(config,
                 {"label", "paper_value", "computed_value", "method", "abs_diff", "tolerance", "check", "pass"}, out,
                 parse_format(o.format)));
  return all_pass ? kOk : kTableMismatch;
}

int cmd_selftest(const Options& o) {
  SelftestOptions so;
  so.seed = o.seed;
  so.inject_fault = o.inject_fault;
  const auto checks = run_selftest(so);
  bool ok = true;
  std::vector<json> rows;
  for (const auto& c : checks) {
    rows.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    ok = ok && c.pass;
  }
  auto config = base_config("selftest", o);
  config["seed"] = o.seed;
  config["inject_fault"] = o.inject_fault;
  emit(o, render(config, {"check", "pass", "detail"}, rows, parse_format(o.format)));
  return ok ? kOk : kComputationFailure;
}

int cmd_gamma(const Options& o) {
  std::string text;
  if (o.input.empty() || o.input == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream f(o.input);
    if (!f) throw InvalidArgument("input: cannot open " + o.input);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  CccdInstance inst = first != std::string::npos && text[first] == '{'
                          ? instance_from_json(json::parse(text))
                          : instance_from_text(text);
  const auto r = domination_number_fast(inst);
  auto config = base_config("gamma", o);
  config["instance"] = instance_to_json(inst);
  config["gamma"] = r.total;
  config["dominating_set"] = r.dominating_set;
  config["boundary_hits"] = r.boundary_hits;
  std::vector<json> rows;
  for (const auto& c : r.per_interval) rows.push_back({{"j", c.j + 1}, {"n_j", c.count}, {"gamma", c.gamma}});
  emit(o, render(config, {"j", "n_j", "gamma"}, rows, parse_format(o.format)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class cover catch digraphs in one dimension: domination number and its distribution"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Write output here instead of stdout");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads, "Worker threads (0: default; CCCD_THREADS caps)");
    sub->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance");
    sub->add_option("--abs-tol", o.abs_tol, "Quadrature absolute tolerance");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo law of the domination number");
  simulate->add_option("--density,--fx", o.fx, "X density as JSON");
  simulate->add_option("--fy", o.fy, "Anchor density as JSON (random anchors)");
  simulate->add_option("--anchors", o.anchors, "Fixed anchors, comma separated");
  simulate->add_option("--n", o.n, "Number of X points");
  simulate->add_option("--m", o.m, "Number of random anchors");
  simulate->add_option("--reps", o.reps, "Replicates");
  simulate->add_flag("--hu", o.hu, "Cell masses by length, fx rescaled into each cell");
  simulate->add_flag("--transformed", o.transformed, "Use the N_F proximity map");
  common(simulate);

  auto* exact = app.add_subcommand("exact", "p_n(F) by closed form, polynomial expansion or quadrature");
  exact->add_option("--density", o.density, "Density as JSON");
  exact->add_option("--n", o.n, "Sample size");
  common(exact);

  auto* quadrature = app.add_subcommand("quadrature", "p_n(F) by adaptive quadrature");
  quadrature->add_option("--density", o.density, "Density as JSON");
  quadrature->add_option("--n", o.n, "Sample size");
  common(quadrature);

  auto* asymptotic = app.add_subcommand("asymptotic", "Limit of p_n(F)");
  asymptotic->add_option("--density", o.density, "Density as JSON");
  common(asymptotic);

  auto* multi = app.add_subcommand("multi", "Domination number law with several anchors");
  multi->add_option("--fx,--density", o.fx, "X density as JSON");
  multi->add_option("--fy", o.fy, "Anchor density as JSON");
  multi->add_option("--anchors", o.anchors, "Fixed anchors, comma separated");
  multi->add_option("--n", o.n, "Number of X points");
  multi->add_option("--m", o.m, "Number of anchors");
  multi->add_option("--mc", o.mc, "Use Monte Carlo with this many replicates");
  multi->add_flag("--hu", o.hu, "Cell masses by length, fx rescaled into each cell");
  common(multi);

  auto* table = app.add_subcommand("table", "Published values next to recomputed ones");
  table->add_flag("--paper", o.paper, "Include the n = 1000 quadrature rows; exit 3 on any mismatch");
  common(table);

  auto* selftest = app.add_subcommand("selftest", "Fast invariant checks");
  selftest->add_flag("--inject-fault", o.inject_fault)->group("");
  common(selftest);

  auto* gamma = app.add_subcommand("gamma", "Domination number of one instance (text or JSON)");
  gamma->add_option("--input", o.input, "Instance file, '-' for stdin");
  common(gamma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadArguments;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*exact) return cmd_exact(o, false);
    if (*quadrature) return cmd_exact(o, true);
    if (*asymptotic) return cmd_asymptotic(o);
    if (*multi) return cmd_multi(o);
    if (*table) return cmd_table(o);
    if (*selftest) return cmd_selftest(o);
    if (*gamma) return cmd_gamma(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputationFailure;
  }
  return kBadArguments;
}
