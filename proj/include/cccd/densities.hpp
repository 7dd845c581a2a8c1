#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cccd/rng.hpp"

namespace cccd {

/// Open interval (lo, hi) that holds the X-sample between two anchors.
struct SupportInterval {
  double lo = 0.0;
  double hi = 1.0;

  double mid() const { return 0.5 * (lo + hi); }
  double length() const { return hi - lo; }
  bool operator==(const SupportInterval&) const = default;
};

enum class Side { right, left };

class DensityModel;

/// Density families. Parameters follow the admissible ranges enforced by
/// DensityModel::make; every family except GeneralLinear lives on (0,1).
namespace family {
struct Uniform {};
/// 1/(1-2δ) on (δ, 1-δ).
struct ShrunkUniform { double delta; };
/// 1/(1-2δ) on (0,1/2-δ) ∪ [1/2+δ,1).
struct GapUniform { double delta; };
/// (1+δ) on (0,1/2), (1-δ) on [1/2,1).
struct TwoStep { double delta; };
/// (1+δ), (1-δ), (1+δ) on the quarters (0,1/4), [1/4,3/4), [3/4,1).
struct ThreeStep { double delta; };
/// a·x + 1 - a/2.
struct Linear { double a; };
struct TruncatedNormal { double mu; double sigma; };
/// 2^q (q+1) x^q on (0,1/2), the same shape shifted onto [1/2,1).
struct QPower { double q; };
/// δ + 12(1-δ)x² on (0,1/2), shifted copy on [1/2,1).
struct PieceQuadratic { double delta; };
struct ArcSine {};
/// (π/2)|sin 2πx|.
struct AbsSine {};
struct Beta { double nu1; double nu2; };
/// f(x) = 2x, F(x) = x².
struct SquareCdf {};
/// a·x + b on an arbitrary support, b fixed by normalization.
struct GeneralLinear { double a; };
/// Base model conditioned on (lo, hi) and rescaled onto (0,1).
struct Restricted {
  std::shared_ptr<const DensityModel> base;
  double lo;
  double hi;
  /// Base mass on (lo, hi); filled in by DensityModel::make.
  double mass = 0.0;
};
}  // namespace family

using Family = std::variant<family::Uniform, family::ShrunkUniform, family::GapUniform, family::TwoStep,
                            family::ThreeStep, family::Linear, family::TruncatedNormal, family::QPower,
                            family::PieceQuadratic, family::ArcSine, family::AbsSine, family::Beta,
                            family::SquareCdf, family::GeneralLinear, family::Restricted>;

/// Value of a one-sided derivative. Unbounded limits are flagged, not
/// approximated by a large float.
struct OneSidedDerivative {
  double point = 0.0;
  Side side = Side::right;
  int order = 0;
  double value = 0.0;  // ±inf when `infinite`
  bool infinite = false;
};

/// Immutable density on a support interval. Construction validates the
/// parameters and checks numerically that the pdf integrates to one.
class DensityModel {
 public:
  static DensityModel make(Family family, SupportInterval support = {});

  double pdf(double x) const;
  /// Right-continuous; 0 below the support and 1 above it.
  double cdf(double x) const;
  /// Generalized inverse of cdf; throws for u outside [0,1].
  double quantile(double u) const;

  /// `order`-th derivative of the pdf at `x`, taken as the limit from `side`.
  /// Works at any point of the closed support; may return ±inf.
  /// Orders above 2 are rejected.
  double derivative(double x, int order, Side side) const;

  /// One-sided derivative at lo, the midpoint, or hi only.
  OneSidedDerivative one_sided_derivative(double point, Side side, int order) const;

  /// Points inside the support where the pdf or one of its derivatives jumps.
  std::vector<double> breakpoints() const;

  /// n iid draws via the quantile transform, sorted ascending.
  std::vector<double> sample(std::size_t n, RandomStream& rng) const;

  const Family& family() const { return family_; }
  SupportInterval support() const { return support_; }
  std::string name() const;

  template <class F>
  bool is() const {
    return std::holds_alternative<F>(family_);
  }

 private:
  DensityModel(Family family, SupportInterval support) : family_(std::move(family)), support_(support) {}

  Family family_;
  SupportInterval support_;
};

/// Conditional law of `base` on (lo, hi), mapped affinely onto (0,1).
/// Restricting a uniform law yields Uniform again.
DensityModel restrict_to(const DensityModel& base, double lo, double hi);

/// Canonical family name used in JSON and the CLI.
std::string family_name(const Family& family);

}  // namespace cccd
