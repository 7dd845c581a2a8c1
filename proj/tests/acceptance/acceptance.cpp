// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or, with --expect-fail,
// when exactly the listed criteria fail.

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "cccd/asymptotics.hpp"
#include "cccd/cccd_core.hpp"
#include "cccd/error.hpp"
#include "cccd/exact_dist.hpp"
#include "cccd/montecarlo.hpp"
#include "cccd/multi_anchor.hpp"

using namespace cccd;
namespace fam = cccd::family;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DensityModel make(Family f) { return DensityModel::make(std::move(f)); }

/// Bound violations seen by every simulation and instance check below.
std::uint64_t g_violations = 0;
std::uint64_t g_instances = 0;

EmpiricalDistribution simulate(SimulationPlan plan) {
  auto e = run(plan);
  g_violations += e.bound_violations;
  g_instances += e.reps;
  return e;
}

SimulationPlan fixed_plan(Family f, std::vector<double> anchors, std::size_t n, std::size_t reps, std::uint64_t seed) {
  SimulationPlan p(make(std::move(f)));
  p.anchors = std::move(anchors);
  p.m = p.anchors.size();
  p.n = n;
  p.reps = reps;
  p.seed = seed;
  return p;
}

Outcome c1_uniform_mc() {
  const auto t0 = Clock::now();
  const auto e = simulate(fixed_plan(fam::Uniform{}, {0.0, 1.0}, 5, 200000, 1001));
  const double p = e.fraction(2);
  const double t = seconds_since(t0);
  const bool ok = std::abs(p - 0.442708) <= 0.0045 && t < 10.0;
  return {ok, "p_hat=" + fmt("%.5f", p) + " target 0.442708+-0.0045, " + fmt("%.2f", t) + " s"};
}

Outcome c2_closed_vs_quadrature() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& m : {make(fam::ShrunkUniform{0.1}), make(fam::GapUniform{0.1}), make(fam::TwoStep{0.5})})
    for (std::size_t n : {2, 5, 10, 25})
      worst = std::max(worst, std::abs(p_closed_form(m, n).value - p_quadrature(m, n).value));
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 30.0, "max |closed - quadrature| = " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s"};
}

Outcome c3_paper_quadrature() {
  struct Item {
    const char* name;
    Family f;
    std::function<bool(double)> ok;
    const char* target;
  };
  const std::vector<Item> items{
      {"linear(1)", fam::Linear{1.0}, [](double v) { return std::abs(v - 0.3753) <= 5e-4; }, "0.3753+-5e-4"},
      {"abs-sine", fam::AbsSine{}, [](double v) { return std::abs(v - 0.6400) <= 5e-4; }, "0.6400+-5e-4"},
      {"arcsine", fam::ArcSine{}, [](double v) { return v >= 0.999; }, ">=0.999"},
      {"beta(2,2)", fam::Beta{2.0, 2.0}, [](double v) { return v <= 1e-5; }, "<=1e-5"}};
  bool all = true;
  std::string detail;
  for (const auto& it : items) {
    const auto t0 = Clock::now();
    const double v = p_quadrature(make(it.f), 1000).value;
    const double t = seconds_since(t0);
    const bool ok = it.ok(v) && t < 60.0;
    all = all && ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string(it.name) + " " + fmt("%.6g", v) + " (" + it.target + ", " + fmt("%.1f", t) + " s) " +
              (ok ? "ok" : "MISS");
  }
  return {all, detail};
}

Outcome c4_limits() {
  struct Item {
    Family f;
    double expected;
  };
  const std::vector<Item> items{{fam::Uniform{}, 4.0 / 9.0},          {fam::Linear{1.0}, 3.0 / 8.0},
                                {fam::AbsSine{}, 16.0 / 25.0},        {fam::PieceQuadratic{0.0}, 16.0 / 27.0},
                                {fam::QPower{1.0}, 8.0 / 15.0},       {fam::Linear{2.0}, 0.0},
                                {fam::Linear{-2.0}, 0.0}};
  double worst = 0.0;
  for (const auto& it : items) worst = std::max(worst, std::abs(asymptotic_profile(make(it.f)).p_limit - it.expected));
  return {worst <= 1e-12, "max deviation " + fmt("%.2e", worst)};
}

Outcome c5_symmetry() {
  const auto a = simulate(fixed_plan(fam::Beta{4.0, 1.0}, {0.0, 1.0}, 50, 100000, 501));
  const auto b = simulate(fixed_plan(fam::Beta{1.0, 4.0}, {0.0, 1.0}, 50, 100000, 502));
  const double pa = a.fraction(2), pb = b.fraction(2);
  auto sigma = [](double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n); };
  const bool mc_ok = std::abs(pa - pb) <= 4.0 * (sigma(pa, 1e5) + sigma(pb, 1e5));
  const double qa = p_quadrature(make(fam::Beta{4.0, 1.0}), 50).value;
  const double qb = p_quadrature(make(fam::Beta{1.0, 4.0}), 50).value;
  const bool q_ok = std::abs(qa - qb) <= 1e-8;
  return {mc_ok && q_ok, "MC " + fmt("%.5f", pa) + " vs " + fmt("%.5f", pb) + ", quadrature |diff| = " +
                             fmt("%.2e", std::abs(qa - qb))};
}

Outcome c6_oracle() {
  const auto t0 = Clock::now();
  const std::vector<DensityModel> models{make(fam::Uniform{}), make(fam::Beta{4.0, 1.0}), make(fam::GapUniform{0.1}),
                                         make(fam::ArcSine{}),  make(fam::SquareCdf{}),   make(fam::TwoStep{0.5}),
                                         make(fam::Linear{-1.0}), make(fam::AbsSine{})};
  std::mt19937_64 g(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nd(0, 12), md(1, 4), pick(0, static_cast<int>(models.size()) - 1);
  int done = 0, mismatches = 0;
  while (done < 10000) {
    const int n = nd(g), m = md(g);
    const auto& fx = models[pick(g)];
    const auto& fy = models[pick(g)];
    std::vector<double> xs(n), ys(m);
    for (auto& y : ys) y = fy.quantile(u(g));
    for (auto& x : xs) x = -0.1 + 1.2 * fx.quantile(u(g));
    CccdInstance inst;
    try {
      inst = build_instance(xs, ys);
    } catch (const TieError&) {
      continue;
    }
    const auto fast = domination_number_fast(inst);
    const int brute = oracle::brute_gamma(inst.xs(), inst.ys());
    if (fast.total != brute || fast.total != domination_number_oracle(inst) || !dominates(inst, fast.dominating_set))
      ++mismatches;
    const auto cap = std::min(inst.n(), 2 * inst.m());
    if (static_cast<std::size_t>(fast.total) > cap || static_cast<std::size_t>(fast.total) > upper_bound(inst).bound())
      ++g_violations;
    ++g_instances;
    ++done;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 60.0,
          std::to_string(done) + " instances, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f", t) + " s"};
}

Outcome c8_multi_anchor() {
  std::vector<double> pt{p_uniform(1).value, p_uniform(2).value};
  const double e_hu = expected_gamma_hu(2, 2, pt);
  const bool exact_ok = std::abs(e_hu - 14.0 / 9.0) <= 1e-12;

  SimulationPlan plan(make(fam::Uniform{}));
  plan.fy = make(fam::Uniform{});
  plan.m = 2;
  plan.n = 2;
  plan.reps = 1000000;
  plan.seed = 808;
  plan.hu_family = true;
  const auto e = simulate(plan);
  double s2 = 0.0;
  for (const auto& [k, c] : e.counts) s2 += static_cast<double>(c) * k * k;
  const double mean = e.mean();
  const double se = std::sqrt((s2 / e.reps - mean * mean) / e.reps);
  const bool mc_ok = std::abs(mean - 14.0 / 9.0) <= 4.0 * se;

  std::mt19937_64 g(809);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<DensityModel> fxs{make(fam::Uniform{}), make(fam::Linear{1.0}), make(fam::TwoStep{-0.5}),
                                      make(fam::Beta{2.0, 3.0})};
  double worst = 0.0;
  int configs = 0;
  for (std::size_t n = 1; n <= 11; ++n) {
    for (std::size_t m = 1; n + m <= 12; ++m) {
      std::vector<double> ys(m);
      for (auto& y : ys) y = u(g);
      const auto table = pmf_conditional_table(make_conditional(fxs[configs % fxs.size()], ys), n);
      double sum = 0.0;
      for (double v : table) sum += v;
      worst = std::max(worst, std::abs(sum - 1.0));
      ++configs;
    }
  }
  const bool norm_ok = worst <= 1e-9;
  return {exact_ok && mc_ok && norm_ok, "E_hu=" + fmt("%.12f", e_hu) + ", MC " + fmt("%.5f", mean) + "+-" +
                                            fmt("%.5f", se) + ", max |sum pmf - 1| = " + fmt("%.1e", worst) +
                                            " over " + std::to_string(configs) + " (n,m)"};
}

Outcome c9_fixed_m_law() {
  const auto e = simulate(fixed_plan(fam::Uniform{}, {0.25, 0.5, 0.75}, 5000, 20000, 909));
  const auto law = asymptotic_law_fixed_m({4.0 / 9.0}, 3);
  std::set<int> ks;
  for (const auto& [k, _] : law) ks.insert(k);
  for (const auto& [k, _] : e.counts) ks.insert(k);
  double tv = 0.0;
  for (int k : ks) {
    const auto it = law.find(k);
    tv += std::abs(e.fraction(k) - (it == law.end() ? 0.0 : it->second));
  }
  tv *= 0.5;
  return {tv <= 0.03, "TV = " + fmt("%.4f", tv)};
}

Outcome c10_rates() {
  const std::vector<double> ns{50, 100, 200, 400};
  std::vector<double> lin, beta;
  for (double n : ns) {
    const auto k = static_cast<std::size_t>(n);
    lin.push_back(std::abs(p_quadrature(make(fam::Linear{1.0}), k).value - 3.0 / 8.0));
    beta.push_back(std::abs(p_quadrature(make(fam::Beta{2.0, 2.0}), k).value - 0.0));
  }
  const double s_lin = -oracle::loglog_slope(ns, lin);
  const double s_beta = -oracle::loglog_slope(ns, beta);
  const bool lin_ok = std::abs(s_lin - 1.0) <= 0.15;
  const bool beta_ok = std::abs(s_beta - 2.0) <= 0.3;
  return {lin_ok && beta_ok, "linear(1) slope " + fmt("%.3f", s_lin) + (lin_ok ? " ok" : " MISS") +
                                 " (1.0+-0.15); beta(2,2) slope " + fmt("%.3f", s_beta) +
                                 (beta_ok ? " ok" : " MISS") + " (2.0+-0.3)"};
}

Outcome c11_transformed() {
  SimulationPlan plan(make(fam::SquareCdf{}));
  plan.anchors = {0.0, 1.0};
  plan.m = 2;
  plan.n = 10;
  plan.reps = 100000;
  plan.seed = 1111;
  plan.transformed = true;
  const auto e = simulate(plan);
  const double p = 4.0 / 9.0 - 16.0 / 9.0 * std::pow(4.0, -10.0);
  const auto v = compare(e, one_plus_bernoulli(p));
  return {v.pass, "P(gamma=2)=" + fmt("%.5f", e.fraction(2)) + " vs " + fmt("%.5f", p) + ", max |z| = " +
                      fmt("%.2f", v.statistic)};
}

std::string capture(const std::string& cmd, int& status) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  status = pclose(pipe.release());
  return out;
}

Outcome c12_cli_determinism(const std::string& cli) {
  const std::vector<std::string> invocations{
      R"(simulate --density '{"family":"beta","params":{"nu1":2,"nu2":3}}' --fy '{"family":"uniform"}' --m 3 --n 20 --reps 40000 --seed 12)",
      R"(simulate --density '{"family":"square-cdf"}' --transformed --n 10 --reps 40000 --seed 13 --format csv)",
      R"(simulate --density '{"family":"linear","params":{"a":1}}' --anchors 0.2,0.5,0.9 --n 8 --reps 40000 --seed 14)",
      R"(multi --fx '{"family":"uniform"}' --anchors 0.3,0.6 --n 6 --mc 30000 --seed 15)",
      R"(exact --density '{"family":"abs-sine"}' --n 100)"};
  int identical = 0;
  std::string failures;
  for (const auto& args : invocations) {
    int s1 = 0, s1b = 0, s8 = 0;
    const auto a = capture(cli + " " + args + " --threads 1", s1);
    const auto a2 = capture(cli + " " + args + " --threads 1", s1b);
    const auto b = capture(cli + " " + args + " --threads 8", s8);
    if (s1 == 0 && s1b == 0 && s8 == 0 && !a.empty() && a == a2 && a == b)
      ++identical;
    else
      failures += " [" + args.substr(0, args.find(' ')) + "]";
  }
  return {identical == static_cast<int>(invocations.size()),
          std::to_string(identical) + "/" + std::to_string(invocations.size()) +
              " invocations byte-identical at threads 1, 1, 8" + failures};
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string expect_fail;
  std::string cli = CCCD_CLI_PATH;
  app.add_option("--expect-fail", expect_fail, "Comma-separated criteria known to fail");
  app.add_option("--cli", cli, "Path to the cccd executable");
  CLI11_PARSE(app, argc, argv);

  std::map<int, std::function<Outcome()>> criteria{
      {1, c1_uniform_mc},
      {2, c2_closed_vs_quadrature},
      {3, c3_paper_quadrature},
      {4, c4_limits},
      {5, c5_symmetry},
      {6, c6_oracle},
      {8, c8_multi_anchor},
      {9, c9_fixed_m_law},
      {10, c10_rates},
      {11, c11_transformed},
      {12, [&] { return c12_cli_determinism(cli); }},
  };

  std::map<int, Outcome> results;
  for (auto& [id, fn] : criteria) {
    try {
      results[id] = fn();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("error: ") + e.what()};
    }
  }
  // Bounds are checked on every instance generated above.
  results[7] = {g_violations == 0,
                std::to_string(g_violations) + " violations over " + std::to_string(g_instances) + " instances"};

  std::set<int> failed;
  for (const auto& [id, r] : results) {
    std::cout << "criterion " << id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << '\n';
    if (!r.pass) failed.insert(id);
  }
  const auto expected = parse_ids(expect_fail);
  if (failed == expected) return 0;
  std::cout << "unexpected outcome: failing set differs from --expect-fail\n";
  return 1;
}
