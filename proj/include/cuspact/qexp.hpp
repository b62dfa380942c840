#pragma once

// Truncated q-expansions in q_w = e^{2 pi i tau / w} with exact cyclotomic
// coefficients, plus the coefficient-level operators the Atkin-Lehner
// pipeline needs: degeneracy maps, Galois twists, T-twists, traces down to Q,
// products and Sturm bounds.

#include "cyclo.hpp"
#include "numutil.hpp"

namespace cuspact {

struct SturmBound {
  long k = 0;
  long N = 0;
  long s = 0;
};

// s = floor(k/12 * [SL2(Z) : Gamma_1(N)])
inline SturmBound sturm_bound(long k, long N) {
  if (k < 1 || N < 1) throw std::invalid_argument("sturm_bound: k, N >= 1");
  long idx = gamma1_index(N);
  return SturmBound{k, N, k * idx / 12};
}

// Truncated q-expansion.  prec = number of known coefficients a_0..a_{prec-1};
// arithmetic never reads beyond prec and results carry the minimum valid prec.
class QExp {
 public:
  long width = 1;
  long weight = 0;
  long level = 1;
  std::vector<CycNum> a;  // a[n] = coefficient of q_width^n, n < prec

  QExp() = default;
  QExp(long w, long k, long N, std::vector<CycNum> coeffs)
      : width(w), weight(k), level(N), a(std::move(coeffs)) {}

  long prec() const { return (long)a.size(); }
  const CycNum& coeff(long n) const {
    if (n < 0 || n >= prec()) throw std::out_of_range("QExp: coefficient beyond precision");
    return a[n];
  }
  bool is_cusp_shape() const { return prec() == 0 || a[0].is_zero(); }

  long conductor() const {
    long c = 1;
    for (auto& x : a) c = lcm_l(c, x.conductor());
    return c;
  }

  bool integral() const {
    return std::all_of(a.begin(), a.end(),
                       [](const CycNum& x) { return x.is_integral(); });
  }

  QExp scaled(const Rat& s) const {
    QExp out = *this;
    for (auto& x : out.a) x = s * x;
    return out;
  }

  friend QExp operator+(const QExp& f, const QExp& g) {
    if (f.width != g.width) throw std::invalid_argument("QExp+: width mismatch");
    QExp out(f.width, f.weight, std::max(f.level, g.level), {});
    long n = std::min(f.prec(), g.prec());
    out.a.reserve(n);
    for (long i = 0; i < n; ++i) out.a.push_back(f.a[i] + g.a[i]);
    return out;
  }
  friend QExp operator-(const QExp& f, const QExp& g) {
    if (f.width != g.width) throw std::invalid_argument("QExp-: width mismatch");
    QExp out(f.width, f.weight, std::max(f.level, g.level), {});
    long n = std::min(f.prec(), g.prec());
    out.a.reserve(n);
    for (long i = 0; i < n; ++i) out.a.push_back(f.a[i] - g.a[i]);
    return out;
  }
};

// a_n -> coefficient of q^{d n}; output prec = d * prec(f) (the first d*prec
// coefficients of the image are determined).
inline QExp degeneracy(const QExp& f, long d) {
  if (d < 1) throw std::invalid_argument("degeneracy: d >= 1");
  if (d == 1) return f;
  QExp out(f.width, f.weight, f.level, {});
  out.a.assign(d * f.prec(), CycNum(0));
  for (long n = 0; n < f.prec(); ++n) {
    if (!f.a[n].is_zero()) out.a[d * n] = f.a[n];
  }
  return out;
}

// coefficientwise Galois action
inline QExp galois_twist(const QExp& f, const GaloisChar& s) {
  QExp out = f;
  for (auto& x : out.a) {
    if (s.conductor % x.conductor() != 0)
      throw std::invalid_argument("galois_twist: coefficient conductor must divide the character conductor");
    x = galois_apply(s, x);
  }
  return out;
}

// a_n -> zeta_N^{j n} a_n on width-N expansions (j-fold T action)
inline QExp t_twist(const QExp& f, long j) {
  long N = f.width;
  QExp out = f;
  if (mod_l(j, N) == 0) return out;
  for (long n = 0; n < out.prec(); ++n) {
    if (!out.a[n].is_zero()) {
      out.a[n] = CycNum::zeta(N, mod_l((long)(j % N) * (n % N), N)) * out.a[n];
    }
  }
  return out;
}

// Cauchy product truncated to the valid range; weights add.
inline QExp mul(const QExp& f, const QExp& g) {
  if (f.width != g.width) throw std::invalid_argument("QExp mul: width mismatch");
  QExp out(f.width, f.weight + g.weight, lcm_l(f.level, g.level), {});
  // valid output precision: with inputs known to f.prec, g.prec the product
  // coefficients are complete for n < min over the valuation-aware bound
  long vf = 0, vg = 0;
  while (vf < f.prec() && f.a[vf].is_zero()) ++vf;
  while (vg < g.prec() && g.a[vg].is_zero()) ++vg;
  long n = std::min(f.prec() + vg, g.prec() + vf);
  n = std::max<long>(n, 0);
  out.a.assign(n, CycNum(0));
  for (long i = vf; i < f.prec(); ++i) {
    if (f.a[i].is_zero()) continue;
    for (long j = vg; j < g.prec() && i + j < n; ++j) {
      if (!g.a[j].is_zero()) out.a[i + j] = out.a[i + j] + f.a[i] * g.a[j];
    }
  }
  return out;
}

// product of forms^exponents; exponent vector over a shared basis
inline QExp eval_monomial(const std::vector<long>& expo, const std::vector<QExp>& forms) {
  if (expo.size() != forms.size())
    throw std::invalid_argument("eval_monomial: arity mismatch");
  QExp acc;
  bool first = true;
  for (size_t i = 0; i < expo.size(); ++i) {
    for (long t = 0; t < expo[i]; ++t) {
      if (first) {
        acc = forms[i];
        first = false;
      } else {
        acc = mul(acc, forms[i]);
      }
    }
  }
  if (first) throw std::invalid_argument("eval_monomial: zero monomial");
  return acc;
}

}  // namespace cuspact
