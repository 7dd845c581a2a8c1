#include <gmpxx.h>

#include <vector>

#include "cccd/error.hpp"
#include "cccd/exact_dist.hpp"

namespace cccd {
namespace {

using Poly = std::vector<mpq_class>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly power(Poly base, std::size_t e) {
  Poly out{mpq_class(1)};
  while (e) {
    if (e & 1) out = multiply(out, base);
    e >>= 1;
    if (e) base = multiply(base, base);
  }
  return out;
}

mpq_class pow_q(const mpq_class& x, std::size_t e) {
  mpq_class r(1);
  for (std::size_t i = 0; i < e; ++i) r *= x;
  return r;
}

/// ∫_a^b x·P(x) dx.
mpq_class integrate_times_x(const Poly& p, const mpq_class& a, const mpq_class& b) {
  mpq_class total(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    total += p[i] * (pow_q(b, i + 2) - pow_q(a, i + 2)) / mpq_class(static_cast<long>(i + 2));
  }
  return total;
}

}  // namespace

ProbabilityReport p_multinomial_squarecdf(std::size_t n) {
  if (n == 1) {
    ProbabilityReport r;
    r.n = 1;
    r.method = Method::multinomial;
    return r;
  }
  if (n < 2 || n > 60) throw InvalidArgument("p_multinomial_squarecdf: n must lie in [2, 60]; use quadrature");
  // With F(x) = x² the inner x_n integral is exact:
  //   (8n/5) x1 [A^{n-1} - B^{n-1}] on [0,1/3], (8n/5) x1 [A^{n-1} - C^{n-1}] on [1/3,1/2],
  // where A = G(x1,1), B = G(x1,(1+x1)/2), C = G(x1,2x1).
  const Poly A{mpq_class(1), mpq_class(-1, 2), mpq_class(-5, 4)};
  const Poly B{mpq_class(1, 16), mpq_class(1, 8), mpq_class(-15, 16)};
  const Poly C{mpq_class(-1, 4), mpq_class(-1, 2), mpq_class(15, 4)};
  const std::size_t e = n - 1;
  const Poly An = power(A, e);
  const Poly Bn = power(B, e);
  const Poly Cn = power(C, e);
  const mpq_class zero(0), third(1, 3), half(1, 2);
  mpq_class total = integrate_times_x(An, zero, half) - integrate_times_x(Bn, zero, third) -
                    integrate_times_x(Cn, third, half);
  total *= mpq_class(static_cast<long>(8 * n), 5);
  total.canonicalize();

  ProbabilityReport r;
  r.value = total.get_d();
  r.n = n;
  r.method = Method::multinomial;
  r.abs_error_bound = 0.0;
  r.metadata["exact"] = total.get_str();
  return r;
}

}  // namespace cccd
