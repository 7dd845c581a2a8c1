#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

namespace cccd::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

/// 15-point Kronrod rule with its embedded 7-point Gauss rule on [a, b].
/// The error estimate is the QUADPACK-style scaled difference of the two.
template <class F>
Estimate gauss_kronrod15(F&& f, double a, double b) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += wgk[j] * (f1[j] + f2[j]);
    abs_sum += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += wg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = wgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  Estimate est;
  est.value = kronrod * half;
  double err = std::abs((kronrod - gauss) * half);
  asc *= std::abs(half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double resabs = abs_sum * std::abs(half);
  constexpr double kEps = 2.220446049250313e-16;
  if (resabs > 1e-290 / (50 * kEps)) err = std::max(err, 50 * kEps * resabs);
  est.error = err;
  return est;
}

/// Globally adaptive bisection: the interval with the largest error estimate
/// is split until the summed error meets max(abs_tol, rel_tol·|value|).
/// `breakpoints` must be sorted and include both integration limits.
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, double abs_tol, double rel_tol,
                 int max_subdivisions) {
  struct Panel {
    double a, b;
    Estimate est;
    bool operator<(const Panel& other) const { return est.error < other.est.error; }
  };
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    Panel p{a, b, gauss_kronrod15(f, a, b)};
    total += p.est.value;
    total_err += p.est.error;
    heap.push(p);
  }
  Result res;
  while (!heap.empty() && total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (res.subdivisions >= max_subdivisions) {
      res.converged = false;
      break;
    }
    Panel worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      // Interval cannot be split further in double precision.
      res.converged = false;
      break;
    }
    heap.pop();
    Panel left{worst.a, m, gauss_kronrod15(f, worst.a, m)};
    Panel right{m, worst.b, gauss_kronrod15(f, m, worst.b)};
    total += left.est.value + right.est.value - worst.est.value;
    total_err += left.est.error + right.est.error - worst.est.error;
    heap.push(left);
    heap.push(right);
    ++res.subdivisions;
  }
  // Re-sum to shed the drift of the incremental updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().est.value;
    total_err += heap.top().est.error;
    heap.pop();
  }
  res.value = total;
  res.error = total_err;
  return res;
}

/// Sorted, de-duplicated breakpoints restricted to [a, b], endpoints included.
std::vector<double> clip_breakpoints(std::vector<double> points, double a, double b);

/// Gauss-Legendre nodes and weights on [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_legendre_unit(int order);

}  // namespace cccd::quad
