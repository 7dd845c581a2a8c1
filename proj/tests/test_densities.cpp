#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cccd/densities.hpp"
#include "cccd/density_io.hpp"
#include "cccd/error.hpp"
#include "oracles.hpp"

using namespace cccd;
namespace fam = cccd::family;

namespace {

std::vector<DensityModel> bounded_models() {
  return {
      DensityModel::make(fam::Uniform{}),
      DensityModel::make(fam::ShrunkUniform{0.1}),
      DensityModel::make(fam::ShrunkUniform{0.3}),
      DensityModel::make(fam::GapUniform{0.1}),
      DensityModel::make(fam::GapUniform{0.4}),
      DensityModel::make(fam::TwoStep{0.5}),
      DensityModel::make(fam::TwoStep{-1.0}),
      DensityModel::make(fam::ThreeStep{0.5}),
      DensityModel::make(fam::ThreeStep{-1.0}),
      DensityModel::make(fam::Linear{1.0}),
      DensityModel::make(fam::Linear{-2.0}),
      DensityModel::make(fam::TruncatedNormal{0.5, 0.1}),
      DensityModel::make(fam::TruncatedNormal{0.2, 1.0}),
      DensityModel::make(fam::QPower{0.0}),
      DensityModel::make(fam::QPower{2.0}),
      DensityModel::make(fam::QPower{3.5}),
      DensityModel::make(fam::PieceQuadratic{0.0}),
      DensityModel::make(fam::PieceQuadratic{0.5}),
      DensityModel::make(fam::AbsSine{}),
      DensityModel::make(fam::Beta{2.0, 2.0}),
      DensityModel::make(fam::Beta{4.0, 1.0}),
      DensityModel::make(fam::Beta{2.0, 3.0}),
      DensityModel::make(fam::SquareCdf{}),
      DensityModel::make(fam::GeneralLinear{0.4}, {2.0, 4.0}),
  };
}

std::vector<DensityModel> all_models() {
  auto v = bounded_models();
  v.push_back(DensityModel::make(fam::ArcSine{}));
  v.push_back(DensityModel::make(fam::Beta{1.5, 1.0}));
  return v;
}

/// Simpson over each smooth piece, nudged inside the piece ends.
double piecewise_simpson(const DensityModel& m, double a, double b) {
  std::vector<double> cuts{a};
  for (double p : m.breakpoints())
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double eps = 1e-13 * (cuts[i + 1] - cuts[i]);
    total += oracle::simpson([&](double x) { return m.pdf(x); }, cuts[i] + eps, cuts[i + 1] - eps, 4000);
  }
  return total;
}

}  // namespace

TEST_CASE("pdf examples") {
  CHECK(DensityModel::make(fam::Uniform{}).pdf(0.5) == 1.0);
  CHECK(DensityModel::make(fam::TwoStep{0.3}).pdf(0.25) == doctest::Approx(1.3));
  CHECK(DensityModel::make(fam::ArcSine{}).pdf(0.5) == doctest::Approx(2.0 / std::numbers::pi));
  CHECK(DensityModel::make(fam::Uniform{}).pdf(1.5) == 0.0);
}

TEST_CASE("cdf examples") {
  CHECK(DensityModel::make(fam::SquareCdf{}).cdf(0.5) == doctest::Approx(0.25));
  CHECK(DensityModel::make(fam::ShrunkUniform{0.1}).cdf(0.1) == 0.0);
  CHECK(DensityModel::make(fam::GapUniform{0.1}).cdf(0.5) == doctest::Approx(0.5));
}

TEST_CASE("quantile examples") {
  CHECK(DensityModel::make(fam::Uniform{}).quantile(0.3) == doctest::Approx(0.3));
  CHECK(DensityModel::make(fam::SquareCdf{}).quantile(0.25) == doctest::Approx(0.5));
  CHECK(DensityModel::make(fam::ArcSine{}).quantile(0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(DensityModel::make(fam::Uniform{}).quantile(1.5), InvalidArgument);
}

TEST_CASE("one-sided derivative examples") {
  const auto abs_sine = DensityModel::make(fam::AbsSine{});
  CHECK(abs_sine.one_sided_derivative(0.0, Side::right, 1).value ==
        doctest::Approx(std::numbers::pi * std::numbers::pi));
  CHECK(abs_sine.one_sided_derivative(0.5, Side::right, 1).value ==
        doctest::Approx(std::numbers::pi * std::numbers::pi));
  CHECK(DensityModel::make(fam::QPower{2.0}).one_sided_derivative(0.0, Side::right, 2).value == doctest::Approx(24.0));
  const auto arc = DensityModel::make(fam::ArcSine{}).one_sided_derivative(0.0, Side::right, 0);
  CHECK(arc.infinite);
  CHECK(arc.value == std::numeric_limits<double>::infinity());
}

TEST_CASE("one-sided derivative rejects bad requests") {
  const auto m = DensityModel::make(fam::Linear{1.0});
  CHECK_THROWS_AS(m.one_sided_derivative(0.0, Side::right, 3), InvalidArgument);
  CHECK_THROWS_AS(m.one_sided_derivative(0.3, Side::right, 0), InvalidArgument);
}

TEST_CASE("densities integrate to one") {
  for (const auto& m : bounded_models()) {
    CAPTURE(m.name());
    CHECK(piecewise_simpson(m, m.support().lo, m.support().hi) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("cdf agrees with the integrated pdf") {
  for (const auto& m : bounded_models()) {
    CAPTURE(m.name());
    const auto s = m.support();
    CHECK(m.cdf(s.lo) == 0.0);
    CHECK(m.cdf(s.hi) == 1.0);
    for (double t : {0.13, 0.37, 0.5, 0.71, 0.94}) {
      const double x = s.lo + t * s.length();
      CHECK(m.cdf(x) == doctest::Approx(piecewise_simpson(m, s.lo, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("cdf is monotone and quantile inverts it") {
  for (const auto& m : all_models()) {
    CAPTURE(m.name());
    const auto s = m.support();
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double x = s.lo + s.length() * i / 1000.0;
      const double c = m.cdf(x);
      CHECK(c >= prev);
      prev = c;
      // Skip gap edges (generalized inverse) and near-flat stretches.
      const bool conditioned = m.pdf(x) > 1e-3 && m.pdf(x - 1e-9 * s.length()) > 1e-3;
      if (conditioned) CHECK(m.quantile(c) == doctest::Approx(x).epsilon(1e-9).scale(1.0));
    }
    for (int i = 0; i <= 100; ++i) {
      const double u = i / 100.0;
      CHECK(std::abs(m.cdf(m.quantile(u)) - u) <= 1e-10);
    }
  }
}

TEST_CASE("beta symmetry pairs") {
  for (auto [a, b] : {std::pair{4.0, 1.0}, std::pair{4.0, 2.0}, std::pair{2.0, 3.5}}) {
    const auto f1 = DensityModel::make(fam::Beta{a, b});
    const auto f2 = DensityModel::make(fam::Beta{b, a});
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      CHECK(std::abs(f1.cdf(x) - (1.0 - f2.cdf(1.0 - x))) <= 1e-12);
    }
  }
}

TEST_CASE("analytic derivatives match central differences") {
  for (const auto& m : bounded_models()) {
    CAPTURE(m.name());
    const auto s = m.support();
    for (double t : {0.11, 0.33, 0.62, 0.87}) {
      const double x = s.lo + t * s.length();
      const double h = 1e-4 * s.length();
      bool smooth = true;
      for (double b : m.breakpoints()) smooth = smooth && std::abs(b - x) > 4 * h;
      if (!smooth) continue;
      const double d1 = (m.pdf(x + h) - m.pdf(x - h)) / (2 * h);
      const double d2 = (m.pdf(x + h) - 2 * m.pdf(x) + m.pdf(x - h)) / (h * h);
      CHECK(m.derivative(x, 1, Side::right) == doctest::Approx(d1).epsilon(1e-4).scale(1.0));
      CHECK(m.derivative(x, 2, Side::right) == doctest::Approx(d2).epsilon(1e-4).scale(10.0));
    }
  }
}

TEST_CASE("one-sided order-0 values are limits of the pdf") {
  for (const auto& m : bounded_models()) {
    CAPTURE(m.name());
    const auto s = m.support();
    const double eps = 1e-10 * s.length();
    CHECK(m.one_sided_derivative(s.lo, Side::right, 0).value == doctest::Approx(m.pdf(s.lo + eps)).epsilon(1e-8).scale(1.0));
    CHECK(m.one_sided_derivative(s.hi, Side::left, 0).value == doctest::Approx(m.pdf(s.hi - eps)).epsilon(1e-8).scale(1.0));
    CHECK(m.one_sided_derivative(s.mid(), Side::right, 0).value ==
          doctest::Approx(m.pdf(s.mid() + eps)).epsilon(1e-8).scale(1.0));
    CHECK(m.one_sided_derivative(s.mid(), Side::left, 0).value ==
          doctest::Approx(m.pdf(s.mid() - eps)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("sampling") {
  RandomStream rng(5, 0);
  CHECK(DensityModel::make(fam::Uniform{}).sample(0, rng).empty());

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto u = DensityModel::make(fam::Uniform{}).sample(100000, rng);
  CHECK(std::is_sorted(u.begin(), u.end()));
  CHECK(std::abs(mean(u) - 0.5) <= 0.005);

  const auto beta = DensityModel::make(fam::Beta{4.0, 1.0});
  const double exact_mean = oracle::simpson([&](double x) { return x * beta.pdf(x); }, 1e-15, 1.0 - 1e-15);
  CHECK(exact_mean == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(std::abs(mean(beta.sample(100000, rng)) - exact_mean) <= 0.005);

  RandomStream a(9, 3), b(9, 3);
  CHECK(beta.sample(50, a) == beta.sample(50, b));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DensityModel::make(fam::ShrunkUniform{0.5}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::GapUniform{0.2}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::TwoStep{1.5}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::Linear{2.5}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::Beta{0.5, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::QPower{-1.0}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::TruncatedNormal{0.5, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::GeneralLinear{1.0}, {0.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::Uniform{}, {0.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::make(fam::Uniform{}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("restriction") {
  const auto u = restrict_to(DensityModel::make(fam::Uniform{}), 0.2, 0.7);
  CHECK(u.is<fam::Uniform>());
  const auto base = DensityModel::make(fam::Linear{1.0});
  const auto r = restrict_to(base, 0.2, 0.7);
  const double mass = base.cdf(0.7) - base.cdf(0.2);
  CHECK(r.pdf(0.5) == doctest::Approx(base.pdf(0.45) * 0.5 / mass));
  CHECK(r.cdf(0.5) == doctest::Approx((base.cdf(0.45) - base.cdf(0.2)) / mass));
  CHECK(r.quantile(r.cdf(0.3)) == doctest::Approx(0.3));
}

TEST_CASE("density json round trip") {
  for (const auto& m : all_models()) {
    const auto j = density_to_json(m);
    const auto back = density_from_json(j);
    CHECK(density_to_json(back) == j);
    CHECK(back.pdf(0.3 * m.support().hi + 0.7 * m.support().lo) ==
          doctest::Approx(m.pdf(0.3 * m.support().hi + 0.7 * m.support().lo)));
  }
}

TEST_CASE("density json errors name the field") {
  auto message = [](const std::string& text) {
    try {
      density_from_string(text);
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"family":"beta","params":{"nu1":2}})").find("params.nu2") != std::string::npos);
  CHECK(message(R"({"family":"linear","params":{"a":1,"b":2}})").find("params.b") != std::string::npos);
  CHECK(message(R"({"family":"cauchy"})").find("family") != std::string::npos);
  CHECK(message(R"({"family":"uniform","support":[0]})").find("support") != std::string::npos);
  CHECK(message(R"({"family":"linear","params":{"a":7}})").find("params.a") != std::string::npos);
}

TEST_CASE("narrow restricted cells keep full precision") {
  // Linear(1) has F(x) = x/2 + x^2/2, so on lo + w t the local cdf is
  // t (1/2 + lo + w t / 2) / (1/2 + lo + w / 2).
  const auto base = DensityModel::make(fam::Linear{1.0});
  for (double w : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const double lo = 0.3;
    const auto r = restrict_to(base, lo, lo + w);
    const double len = (lo + w) - lo;
    for (double t : {0.1, 0.37, 0.5, 0.93}) {
      const double exact = t * (0.5 + lo + 0.5 * len * t) / (0.5 + lo + 0.5 * len);
      CAPTURE(w);
      CHECK(std::abs(r.cdf(t) - exact) <= 1e-13);
      CHECK(std::abs(r.quantile(exact) - t) <= 1e-12);
    }
    CHECK(r.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}
