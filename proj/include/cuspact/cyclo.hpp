#pragma once

// Exact arithmetic in cyclotomic fields Q(zeta_n): power-basis elements modulo
// Phi_n, Galois action, the trace pairing and its inverse (used to reconstruct
// Atkin-Lehner matrices from rational trace data).

#include <algorithm>
#include <cassert>
#include <memory>
#include <mutex>
#include <sstream>

#include "numutil.hpp"

namespace cuspact {

namespace detail {

// coefficients of Phi_n, ascending
inline std::vector<Int> cyclotomic_poly(long n) {
  // x^n - 1 divided by prod_{d|n, d<n} Phi_d
  std::vector<Int> poly(n + 1, 0);
  poly[0] = -1;
  poly[n] = 1;
  for (long d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    std::vector<Int> q = cyclotomic_poly(d);
    // exact division poly /= q
    std::vector<Int> out(poly.size() - q.size() + 1, 0);
    for (long i = (long)out.size() - 1; i >= 0; --i) {
      Int c = poly[i + q.size() - 1];
      assert(c % q.back() == 0);
      Int t = c / q.back();
      out[i] = t;
      for (size_t j = 0; j < q.size(); ++j) poly[i + j] -= t * q[j];
    }
    poly = out;
  }
  return poly;
}

}  // namespace detail

// Per-conductor tables, built once and shared read-only.
class CycloContext {
 public:
  explicit CycloContext(long n) : n_(n), phi_(totient(n)) {
    auto phipoly = detail::cyclotomic_poly(n);
    assert((long)phipoly.size() == phi_ + 1);
    // reduction rows for zeta^t, t in [phi, 2 phi - 2]
    std::vector<Rat> base(phi_);
    for (long i = 0; i < phi_; ++i) base[i] = Rat(-phipoly[i]);
    std::vector<Rat> cur = base;
    for (long t = phi_; t <= 2 * phi_ - 2; ++t) {
      red_.push_back(cur);
      std::vector<Rat> nxt(phi_, 0);
      for (long i = 1; i < phi_; ++i) nxt[i] = cur[i - 1];
      if (cur[phi_ - 1] != 0) {
        for (long i = 0; i < phi_; ++i) nxt[i] += cur[phi_ - 1] * base[i];
      }
      cur = nxt;
    }
    // zeta^j in the power basis for 0 <= j < n
    pow_.assign(n, std::vector<Rat>(phi_, 0));
    pow_[0][0] = 1;
    for (long j = 1; j < n; ++j) {
      if (j < phi_) {
        pow_[j][j] = 1;
      } else {
        // shift previous and reduce
        const auto& prev = pow_[j - 1];
        std::vector<Rat> v(phi_, 0);
        Rat top = prev[phi_ - 1];
        for (long i = 1; i < phi_; ++i) v[i] = prev[i - 1];
        if (top != 0) {
          for (long i = 0; i < phi_; ++i) v[i] += top * base[i];
        }
        pow_[j] = v;
      }
    }
    // trace of zeta^j for 0 <= j < n: sum over units d of zeta^{jd}
    trace_pow_.assign(n, Rat(0));
    units_ = units_mod(n);
    if (n == 1) {
      trace_pow_[0] = 1;
    } else {
      for (long j = 0; j < n; ++j) {
        // Tr(zeta^j) = mu(n/g) * phi(n)/phi(n/g), g = gcd(j, n)
        long g = gcd_l(j, n);
        long m = n / g;
        long mu = 1, mm = m;
        for (auto [p, e] : factorize(mm)) {
          if (e > 1) { mu = 0; break; }
          mu = -mu;
        }
        trace_pow_[j] = Rat(mu * (phi_ / totient(m)));
      }
    }
    // inverse Gram matrix of (b,a) -> Tr(zeta^{a+b}), 0 <= a,b < phi
    gram_inv_ = invert_gram();
  }

  long conductor() const { return n_; }
  long degree() const { return phi_; }
  const std::vector<long>& units() const { return units_; }
  const std::vector<Rat>& zeta_pow(long j) const { return pow_[mod_l(j, n_)]; }
  const Rat& trace_of_pow(long j) const { return trace_pow_[mod_l(j, n_)]; }
  const std::vector<std::vector<Rat>>& gram_inverse() const { return gram_inv_; }
  const std::vector<std::vector<Rat>>& reduction_rows() const { return red_; }

  static const CycloContext& get(long n) {
    static std::mutex mu;
    static std::map<long, std::unique_ptr<CycloContext>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
      it = cache.emplace(n, std::make_unique<CycloContext>(n)).first;
    }
    return *it->second;
  }

 private:
  std::vector<std::vector<Rat>> invert_gram() const {
    long d = phi_;
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(2 * d, 0));
    for (long b = 0; b < d; ++b) {
      for (long a = 0; a < d; ++a) m[b][a] = trace_of_pow(a + b);
      m[b][d + b] = 1;
    }
    for (long c = 0; c < d; ++c) {
      long piv = -1;
      for (long r = c; r < d; ++r) {
        if (m[r][c] != 0) { piv = r; break; }
      }
      assert(piv >= 0);
      std::swap(m[c], m[piv]);
      Rat inv = 1 / m[c][c];
      for (auto& x : m[c]) x *= inv;
      for (long r = 0; r < d; ++r) {
        if (r != c && m[r][c] != 0) {
          Rat f = m[r][c];
          for (long j = c; j < 2 * d; ++j) m[r][j] -= f * m[c][j];
        }
      }
    }
    std::vector<std::vector<Rat>> inv(d, std::vector<Rat>(d));
    for (long r = 0; r < d; ++r) {
      for (long c = 0; c < d; ++c) inv[r][c] = m[r][d + c];
    }
    return inv;
  }

  long n_, phi_;
  std::vector<std::vector<Rat>> red_;
  std::vector<std::vector<Rat>> pow_;
  std::vector<Rat> trace_pow_;
  std::vector<long> units_;
  std::vector<std::vector<Rat>> gram_inv_;
};

// Element of Q(zeta_n) in the power basis 1, zeta, ..., zeta^{phi(n)-1}.
class CycNum {
 public:
  CycNum() : n_(1), c_(1, Rat(0)) {}
  explicit CycNum(const Rat& r) : n_(1), c_(1, r) {}
  explicit CycNum(long v) : n_(1), c_(1, Rat(v)) {}
  CycNum(long n, std::vector<Rat> coeffs) : n_(n), c_(std::move(coeffs)) {
    assert((long)c_.size() == totient(n));
  }

  static CycNum zeta(long n, long j = 1) {
    const auto& ctx = CycloContext::get(n);
    return CycNum(n, ctx.zeta_pow(j));
  }

  long conductor() const { return n_; }
  const std::vector<Rat>& coeffs() const { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rat& x) { return x == 0; });
  }
  bool is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i) {
      if (c_[i] != 0) return false;
    }
    return true;
  }
  // rational value; valid only when is_rational()
  const Rat& rational_part() const { return c_[0]; }

  bool is_integral() const {
    return std::all_of(c_.begin(), c_.end(),
                       [](const Rat& x) { return x.get_den() == 1; });
  }

  // lift to conductor m (n | m) via zeta_n = zeta_m^{m/n}
  CycNum lifted(long m) const {
    if (m == n_) return *this;
    assert(m % n_ == 0);
    const auto& ctx = CycloContext::get(m);
    long phim = ctx.degree();
    std::vector<Rat> out(phim, 0);
    long step = m / n_;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      const auto& zp = ctx.zeta_pow((long)i * step);
      for (long j = 0; j < phim; ++j) out[j] += c_[i] * zp[j];
    }
    return CycNum(m, std::move(out));
  }

  // try to shrink the conductor (used to normalize rationals and subfield values)
  CycNum normalized() const {
    if (n_ == 1) return *this;
    if (is_rational()) return CycNum(c_[0]);
    return *this;
  }

  friend CycNum operator+(const CycNum& a, const CycNum& b) {
    auto [x, y] = align(a, b);
    for (size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
    return x;
  }
  friend CycNum operator-(const CycNum& a, const CycNum& b) {
    auto [x, y] = align(a, b);
    for (size_t i = 0; i < x.c_.size(); ++i) x.c_[i] -= y.c_[i];
    return x;
  }
  CycNum operator-() const {
    CycNum r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend CycNum operator*(const CycNum& a, const CycNum& b) {
    auto [x, y] = align(a, b);
    long n = x.n_;
    const auto& ctx = CycloContext::get(n);
    long d = ctx.degree();
    std::vector<Rat> prod(2 * d - 1, 0);
    for (long i = 0; i < d; ++i) {
      if (x.c_[i] == 0) continue;
      for (long j = 0; j < d; ++j) {
        if (y.c_[j] != 0) prod[i + j] += x.c_[i] * y.c_[j];
      }
    }
    std::vector<Rat> out(prod.begin(), prod.begin() + d);
    const auto& red = ctx.reduction_rows();
    for (long t = d; t <= 2 * d - 2; ++t) {
      if (prod[t] == 0) continue;
      const auto& row = red[t - d];
      for (long i = 0; i < d; ++i) {
        if (row[i] != 0) out[i] += prod[t] * row[i];
      }
    }
    return CycNum(n, std::move(out));
  }
  friend CycNum operator*(const Rat& s, const CycNum& a) {
    CycNum r = a;
    for (auto& x : r.c_) x *= s;
    return r;
  }
  friend CycNum operator/(const CycNum& a, const CycNum& b) { return a * b.inverse(); }

  CycNum inverse() const {
    if (is_zero()) throw std::domain_error("CycNum: division by zero");
    if (n_ == 1) return CycNum(Rat(1) / c_[0]);
    // solve x * this = 1 in the power basis
    const auto& ctx = CycloContext::get(n_);
    long d = ctx.degree();
    // columns: this * zeta^i
    std::vector<std::vector<Rat>> m(d, std::vector<Rat>(d + 1, 0));
    for (long i = 0; i < d; ++i) {
      std::vector<Rat> e(d, 0);
      e[i] = 1;
      CycNum col = *this * CycNum(n_, e);
      for (long r = 0; r < d; ++r) m[r][i] = col.c_[r];
    }
    m[0][d] = 1;
    // gaussian elimination
    for (long c = 0; c < d; ++c) {
      long piv = -1;
      for (long r = c; r < d; ++r) {
        if (m[r][c] != 0) { piv = r; break; }
      }
      if (piv < 0) throw std::domain_error("CycNum: inverse of zero divisor");
      std::swap(m[c], m[piv]);
      Rat inv = 1 / m[c][c];
      for (auto& x : m[c]) x *= inv;
      for (long r = 0; r < d; ++r) {
        if (r != c && m[r][c] != 0) {
          Rat f = m[r][c];
          for (long j = c; j <= d; ++j) m[r][j] -= f * m[c][j];
        }
      }
    }
    std::vector<Rat> out(d);
    for (long i = 0; i < d; ++i) out[i] = m[i][d];
    return CycNum(n_, std::move(out));
  }

  friend bool operator==(const CycNum& a, const CycNum& b) {
    auto [x, y] = align(a, b);
    return x.c_ == y.c_;
  }
  friend bool operator!=(const CycNum& a, const CycNum& b) { return !(a == b); }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (!first) os << " + ";
      os << c_[i].get_str();
      if (i > 0) os << "*z" << n_ << "^" << i;
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  static std::pair<CycNum, CycNum> align(const CycNum& a, const CycNum& b) {
    if (a.n_ == b.n_) return {a, b};
    long m = lcm_l(a.n_, b.n_);
    return {a.lifted(m), b.lifted(m)};
  }

  long n_;
  std::vector<Rat> c_;
};

// Galois automorphism sigma_d of Q(zeta_n), zeta |-> zeta^d.
struct GaloisChar {
  long conductor;
  long exponent;  // unit mod conductor

  GaloisChar(long n, long d) : conductor(n), exponent(mod_l(d, n)) {
    if (n > 1 && gcd_l(exponent, n) != 1)
      throw std::invalid_argument("GaloisChar: exponent not a unit");
    if (n == 1) exponent = 0;
  }
  GaloisChar compose(const GaloisChar& o) const {
    assert(conductor == o.conductor);
    if (conductor == 1) return *this;
    return GaloisChar(conductor, mod_l(exponent * o.exponent, conductor));
  }
};

inline CycNum galois_apply(const GaloisChar& s, const CycNum& a) {
  if (a.conductor() == 1) return a;
  long n = a.conductor();
  if (n != s.conductor) {
    // allow conductor of a to divide the character's conductor
    if (s.conductor % n != 0)
      throw std::invalid_argument("galois_apply: conductor mismatch");
    return galois_apply(GaloisChar(n, s.exponent % n), a);
  }
  const auto& ctx = CycloContext::get(n);
  long d = ctx.degree();
  std::vector<Rat> out(d, 0);
  const auto& c = a.coeffs();
  for (long i = 0; i < d; ++i) {
    if (c[i] == 0) continue;
    const auto& zp = ctx.zeta_pow(i * s.exponent % n);
    for (long j = 0; j < d; ++j) out[j] += c[i] * zp[j];
  }
  return CycNum(n, std::move(out));
}

inline Rat trace_to_Q(const CycNum& a) {
  long n = a.conductor();
  const auto& ctx = CycloContext::get(n);
  Rat t = 0;
  const auto& c = a.coeffs();
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0) t += c[i] * ctx.trace_of_pow((long)i);
  }
  return t;
}

// unique x in Q(zeta_n) with Tr(zeta^b x) = traces[b] for b = 0..phi(n)-1
inline CycNum trace_reconstruct(const std::vector<Rat>& traces, long n) {
  const auto& ctx = CycloContext::get(n);
  long d = ctx.degree();
  if ((long)traces.size() != d)
    throw std::invalid_argument("trace_reconstruct: wrong trace count");
  const auto& g = ctx.gram_inverse();
  std::vector<Rat> out(d, 0);
  for (long a = 0; a < d; ++a) {
    for (long b = 0; b < d; ++b) {
      if (traces[b] != 0) out[a] += g[b][a] * traces[b];
    }
  }
  return CycNum(n, std::move(out));
}

}  // namespace cuspact
