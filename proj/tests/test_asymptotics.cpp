#include <doctest.h>

#include <cmath>

#include "cccd/asymptotics.hpp"
#include "cccd/error.hpp"
#include "cccd/exact_dist.hpp"
#include "oracles.hpp"

using namespace cccd;
namespace fam = cccd::family;

namespace {

DensityModel make(Family f, SupportInterval s = {}) { return DensityModel::make(std::move(f), s); }

}  // namespace

TEST_CASE("profile examples") {
  const auto u = asymptotic_profile(make(fam::Uniform{}));
  CHECK(u.k == 0);
  CHECK(u.ell == 0);
  CHECK(u.p_limit == doctest::Approx(4.0 / 9.0).epsilon(1e-14));

  CHECK(std::abs(asymptotic_profile(make(fam::Linear{1.0})).p_limit - 3.0 / 8.0) <= 1e-12);

  const auto s = asymptotic_profile(make(fam::AbsSine{}));
  CHECK(s.k == 1);
  CHECK(s.ell == 1);
  CHECK(std::abs(s.p_limit - 16.0 / 25.0) <= 1e-12);

  CHECK(std::abs(asymptotic_profile(make(fam::PieceQuadratic{0.0})).p_limit - 16.0 / 27.0) <= 1e-12);
  CHECK(std::abs(asymptotic_profile(make(fam::QPower{1.0})).p_limit - 8.0 / 15.0) <= 1e-12);
  CHECK(asymptotic_profile(make(fam::Linear{2.0})).p_limit == 0.0);
  CHECK(asymptotic_profile(make(fam::Linear{-2.0})).p_limit == 0.0);
}

TEST_CASE("profile invariants") {
  const auto p = asymptotic_profile(make(fam::TruncatedNormal{0.3, 0.2}));
  CHECK(p.alpha_k == doctest::Approx(p.d_lo + std::ldexp(p.d_mid_right, -(p.k + 1))));
  CHECK(p.beta_ell == doctest::Approx(p.d_hi + std::ldexp(p.d_mid_left, -(p.ell + 1))));
  CHECK(p.alpha_k != 0.0);
  CHECK(p.beta_ell != 0.0);
  CHECK(p.p_limit == doctest::Approx(p.d_lo * p.d_hi / (p.alpha_k * p.beta_ell)));
  CHECK(p.p_limit >= 0.0);
  CHECK(p.p_limit <= 1.0);
}

TEST_CASE("family formulas agree with the profile") {
  std::vector<DensityModel> models{make(fam::Uniform{}),
                                   make(fam::TruncatedNormal{0.5, 0.2}),
                                   make(fam::TruncatedNormal{0.3, 0.15}),
                                   make(fam::TruncatedNormal{0.8, 1.0}),
                                   make(fam::PieceQuadratic{0.0}),
                                   make(fam::PieceQuadratic{0.4}),
                                   make(fam::AbsSine{}),
                                   make(fam::Beta{2.0, 2.0}),
                                   make(fam::Beta{4.0, 1.0}),
                                   make(fam::Beta{1.0, 1.0}),
                                   make(fam::ShrunkUniform{0.1}),
                                   make(fam::GapUniform{0.1}),
                                   make(fam::GeneralLinear{0.3}, {1.0, 3.0}),
                                   make(fam::GeneralLinear{-2.0}, {0.0, 1.0})};
  for (double a : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) models.push_back(make(fam::Linear{a}));
  for (double q : {0.0, 1.0, 2.0}) models.push_back(make(fam::QPower{q}));
  for (double d : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    models.push_back(make(fam::TwoStep{d}));
    models.push_back(make(fam::ThreeStep{d}));
  }
  for (const auto& m : models) {
    CAPTURE(m.name());
    CHECK(std::abs(limit_family_formula(m) - asymptotic_profile(m).p_limit) <= 1e-12);
  }
  CHECK_THROWS_AS(limit_family_formula(make(fam::SquareCdf{})), InvalidArgument);
}

TEST_CASE("family formula examples") {
  CHECK(limit_family_formula(make(fam::Linear{2.0})) == 0.0);
  CHECK(limit_family_formula(make(fam::QPower{0.0})) == doctest::Approx(4.0 / 9.0));
  CHECK(limit_family_formula(make(fam::PieceQuadratic{0.0})) == doctest::Approx(16.0 / 27.0));
  for (double a = -2.0; a <= 2.0; a += 0.25) {
    const double v = limit_family_formula(make(fam::Linear{a}));
    CHECK(v >= 0.0);
    CHECK(v <= 4.0 / 9.0 + 1e-15);
  }
}

TEST_CASE("degenerate endpoints") {
  CHECK(p_limit(make(fam::TwoStep{1.0})).value == 0.0);
  CHECK(p_limit(make(fam::TwoStep{-1.0})).value == 0.0);
  CHECK(p_limit(make(fam::ThreeStep{1.0})).value == doctest::Approx(1.0));
  CHECK(p_limit(make(fam::ThreeStep{-1.0})).value == 0.0);
}

TEST_CASE("truncated normal limit grows with sigma") {
  double prev = -1.0;
  for (double sigma : {0.05, 0.1, 0.5, 1.0, 5.0, 50.0}) {
    const double v = limit_family_formula(make(fam::TruncatedNormal{0.5, sigma}));
    CHECK(v > prev);
    prev = v;
    if (sigma == 0.05) CHECK(v < 1e-3);
    if (sigma == 50.0) CHECK(std::abs(v - 4.0 / 9.0) < 1e-3);
  }
}

TEST_CASE("matched derivatives") {
  CHECK(limit_matched_derivatives(0, 0) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(limit_matched_derivatives(1, 1) == doctest::Approx(16.0 / 25.0).epsilon(1e-15));
  for (int q = 0; q <= 6; ++q) {
    const double formula = std::pow(2.0, q + 2.0) / (3.0 * (1.0 + std::pow(2.0, q + 1.0)));
    CHECK(std::abs(limit_matched_derivatives(q, 0) - formula) <= 1e-14);
  }
  CHECK(std::abs(limit_matched_derivatives(2, 0) - asymptotic_profile(make(fam::QPower{2.0})).p_limit) <= 1e-14);
  CHECK_THROWS_AS(limit_matched_derivatives(-1, 0), InvalidArgument);
}

TEST_CASE("unbounded densities") {
  const auto arc = make(fam::ArcSine{});
  CHECK(needs_unbounded_limit(arc));
  CHECK_THROWS_AS(asymptotic_profile(arc), InvalidArgument);
  CHECK(std::abs(limit_unbounded(arc) - 1.0) <= 1e-6);
  const auto r = p_limit(arc);
  CHECK(r.method == Method::asymptotic);
  CHECK(r.metadata["route"] == "unbounded");
  CHECK(std::abs(r.value - 1.0) <= 1e-6);

  // Zero density at an end forces the limit to zero even with a steep root.
  const auto beta = make(fam::Beta{1.5, 1.0});
  CHECK_FALSE(needs_unbounded_limit(beta));
  CHECK(p_limit(beta).value == 0.0);

  for (const auto& m : {make(fam::Linear{1.0}), make(fam::AbsSine{}), make(fam::Uniform{})}) {
    CHECK_FALSE(needs_unbounded_limit(m));
    CHECK(std::abs(limit_unbounded(m) - asymptotic_profile(m).p_limit) <= 1e-6);
  }
}

TEST_CASE("finite-n values approach the limit") {
  for (const auto& m : {make(fam::Uniform{}), make(fam::Linear{1.0}), make(fam::Linear{-1.0}),
                        make(fam::TwoStep{0.5}), make(fam::QPower{2.0}), make(fam::PieceQuadratic{0.0}),
                        make(fam::AbsSine{})}) {
    CAPTURE(m.name());
    CHECK(std::abs(p_quadrature(m, 2000).value - p_limit(m).value) <= 5e-3);
  }
}

TEST_CASE("rate constant") {
  const auto u = rate_constant(make(fam::Uniform{}));
  CHECK(u.c1 == 0.0);
  CHECK(u.c2 == 0.0);
  CHECK(p_uniform(30).value - 4.0 / 9.0 == doctest::Approx(-16.0 / 9.0 * std::pow(4.0, -30.0)));

  const auto lin = make(fam::Linear{1.0});
  const auto rc = rate_constant(lin);
  CHECK(rc.e1 == 1.0);
  CHECK(rc.e2 == 1.0);
  const double gap = p_quadrature(lin, 400).value - 3.0 / 8.0;
  CHECK(rc.correction(400) == doctest::Approx(gap).epsilon(0.1));

  CHECK_THROWS_AS(rate_constant(make(fam::QPower{2.0})), InvalidArgument);
}

TEST_CASE("fitted convergence rates") {
  const std::vector<double> ns{50, 100, 200, 400};
  std::vector<double> lin;
  for (double n : ns) lin.push_back(p_quadrature(make(fam::Linear{1.0}), static_cast<std::size_t>(n)).value - 3.0 / 8.0);
  CHECK(std::abs(-oracle::loglog_slope(ns, lin) - 1.0) <= 0.1);

  // Beta(2,2) decays like n^-2 only slowly: local slopes climb towards 2.
  const auto beta = make(fam::Beta{2.0, 2.0});
  double prev_p = p_quadrature(beta, 50).value, prev_slope = 0.0;
  for (std::size_t n = 100; n <= 3200; n *= 2) {
    const double p = p_quadrature(beta, n).value;
    const double slope = std::log2(prev_p / p);
    CAPTURE(n);
    CHECK(slope > prev_slope);
    CHECK(slope < 2.0);
    prev_p = p;
    prev_slope = slope;
  }
  CHECK(prev_slope > 1.95);
}

TEST_CASE("profile json") {
  const auto j = profile_to_json(asymptotic_profile(make(fam::AbsSine{})));
  CHECK(j["k"] == 1);
  CHECK(j["ell"] == 1);
  CHECK(j.contains("alpha_k"));
}
