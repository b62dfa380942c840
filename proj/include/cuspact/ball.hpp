#pragma once

// Certified midpoint-radius arithmetic over MPFR.  Midpoints carry the working
// precision; radii are kept at a small fixed precision and always rounded up,
// so every ball is a true enclosure of the represented quantity.

#include <complex>
#include <optional>
#include <vector>

#include <mpfr.h>

#include "numutil.hpp"

namespace cuspact {

constexpr mpfr_prec_t kRadPrec = 32;

class RealBall {
 public:
  RealBall() : prec_(64) { init(); }
  explicit RealBall(mpfr_prec_t prec) : prec_(prec) { init(); }
  RealBall(const RealBall& o) : prec_(o.prec_) {
    init();
    mpfr_set(mid_, o.mid_, MPFR_RNDN);
    mpfr_set(rad_, o.rad_, MPFR_RNDU);
  }
  RealBall(RealBall&& o) noexcept : prec_(o.prec_) {
    mid_[0] = o.mid_[0];
    rad_[0] = o.rad_[0];
    o.moved_ = true;
  }
  RealBall& operator=(const RealBall& o) {
    if (this != &o) {
      if (prec_ != o.prec_) {
        clear();
        prec_ = o.prec_;
        init();
      }
      mpfr_set(mid_, o.mid_, MPFR_RNDN);
      mpfr_set(rad_, o.rad_, MPFR_RNDU);
    }
    return *this;
  }
  RealBall& operator=(RealBall&& o) noexcept {
    if (this != &o) {
      clear();
      prec_ = o.prec_;
      mid_[0] = o.mid_[0];
      rad_[0] = o.rad_[0];
      o.moved_ = true;
    }
    return *this;
  }
  ~RealBall() { clear(); }

  static RealBall exact(const Rat& r, mpfr_prec_t prec) {
    RealBall b(prec);
    mpfr_set_q(b.mid_, r.get_mpq_t(), MPFR_RNDN);
    b.set_rounding_radius();
    if (mpfr_cmp_q(b.mid_, r.get_mpq_t()) == 0) mpfr_set_zero(b.rad_, 1);
    return b;
  }
  static RealBall exact_int(const Int& z, mpfr_prec_t prec) {
    RealBall b(prec);
    mpfr_set_z(b.mid_, z.get_mpz_t(), MPFR_RNDN);
    b.set_rounding_radius();
    if (mpfr_cmp_z(b.mid_, z.get_mpz_t()) == 0) mpfr_set_zero(b.rad_, 1);
    return b;
  }
  static RealBall from_double(double d, mpfr_prec_t prec) {
    RealBall b(prec);
    mpfr_set_d(b.mid_, d, MPFR_RNDN);
    mpfr_set_zero(b.rad_, 1);
    return b;
  }
  static RealBall zero(mpfr_prec_t prec) {
    RealBall b(prec);
    return b;
  }

  mpfr_prec_t precision() const { return prec_; }
  double mid_double() const { return mpfr_get_d(mid_, MPFR_RNDN); }
  double rad_double() const { return mpfr_get_d(rad_, MPFR_RNDU); }
  const mpfr_t& mid() const { return mid_; }
  const mpfr_t& rad() const { return rad_; }

  bool is_exact_zero() const { return mpfr_zero_p(mid_) && mpfr_zero_p(rad_); }

  // log2 of radius (very negative when tight); +inf if radius nonzero unknown
  double rad_log2() const {
    if (mpfr_zero_p(rad_)) return -1e300;
    long exp = mpfr_get_exp(rad_);
    return (double)exp;
  }

  RealBall operator-() const {
    RealBall r(*this);
    mpfr_neg(r.mid_, r.mid_, MPFR_RNDN);
    return r;
  }

  friend RealBall operator+(const RealBall& a, const RealBall& b) {
    RealBall r(std::max(a.prec_, b.prec_));
    mpfr_add(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
    mpfr_add(r.rad_, a.rad_, b.rad_, MPFR_RNDU);
    r.add_rounding_radius();
    return r;
  }
  friend RealBall operator-(const RealBall& a, const RealBall& b) {
    RealBall r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
    mpfr_add(r.rad_, a.rad_, b.rad_, MPFR_RNDU);
    r.add_rounding_radius();
    return r;
  }
  friend RealBall operator*(const RealBall& a, const RealBall& b) {
    RealBall r(std::max(a.prec_, b.prec_));
    mpfr_mul(r.mid_, a.mid_, b.mid_, MPFR_RNDN);
    // rad = |a|rad_b + |b|rad_a + rad_a rad_b, all rounded up
    mpfr_t t1, t2;
    mpfr_init2(t1, kRadPrec);
    mpfr_init2(t2, kRadPrec);
    mpfr_abs(t1, a.mid_, MPFR_RNDU);
    mpfr_mul(t1, t1, b.rad_, MPFR_RNDU);
    mpfr_abs(t2, b.mid_, MPFR_RNDU);
    mpfr_mul(t2, t2, a.rad_, MPFR_RNDU);
    mpfr_add(t1, t1, t2, MPFR_RNDU);
    mpfr_mul(t2, a.rad_, b.rad_, MPFR_RNDU);
    mpfr_add(r.rad_, t1, t2, MPFR_RNDU);
    mpfr_clear(t1);
    mpfr_clear(t2);
    r.add_rounding_radius();
    return r;
  }

  // multiply by an exact rational
  RealBall scaled(const Rat& s) const {
    RealBall r(prec_);
    mpfr_t sf;
    mpfr_init2(sf, prec_);
    bool sexact = mpfr_set_q(sf, s.get_mpq_t(), MPFR_RNDN) == 0;
    mpfr_mul(r.mid_, mid_, sf, MPFR_RNDN);
    mpfr_t sa;
    mpfr_init2(sa, kRadPrec);
    mpfr_abs(sa, sf, MPFR_RNDU);
    mpfr_nextabove(sa);
    mpfr_mul(r.rad_, rad_, sa, MPFR_RNDU);
    if (!sexact && !mpfr_zero_p(sf) && !mpfr_zero_p(mid_)) {
      // conversion error of s: at most one ulp of sf
      mpfr_t err, am;
      mpfr_init2(err, kRadPrec);
      mpfr_init2(am, kRadPrec);
      mpfr_set_ui_2exp(err, 1, mpfr_get_exp(sf) - prec_, MPFR_RNDU);
      mpfr_abs(am, mid_, MPFR_RNDU);
      mpfr_add(am, am, rad_, MPFR_RNDU);
      mpfr_mul(err, err, am, MPFR_RNDU);
      mpfr_add(r.rad_, r.rad_, err, MPFR_RNDU);
      mpfr_clears(err, am, (mpfr_ptr)nullptr);
    }
    mpfr_clears(sf, sa, (mpfr_ptr)nullptr);
    r.add_rounding_radius();
    return r;
  }

  RealBall inverse() const {
    // requires 0 outside the ball
    RealBall r(prec_);
    if (!nonzero_certified()) throw std::domain_error("RealBall: inverse of ball containing 0");
    mpfr_ui_div(r.mid_, 1, mid_, MPFR_RNDN);
    // rad = rad / (|m| (|m| - rad))
    mpfr_t am, lo, t;
    mpfr_init2(am, kRadPrec);
    mpfr_init2(lo, kRadPrec);
    mpfr_init2(t, kRadPrec);
    mpfr_abs(am, mid_, MPFR_RNDD);
    mpfr_sub(lo, am, rad_, MPFR_RNDD);
    mpfr_mul(t, am, lo, MPFR_RNDD);
    mpfr_div(r.rad_, rad_, t, MPFR_RNDU);
    mpfr_clears(am, lo, t, (mpfr_ptr)nullptr);
    r.add_rounding_radius();
    return r;
  }

  RealBall sqrt_pos() const {
    // requires positive lower bound
    RealBall r(prec_);
    mpfr_t lo;
    mpfr_init2(lo, kRadPrec);
    mpfr_sub(lo, mid_, rad_, MPFR_RNDD);
    if (mpfr_sgn(lo) <= 0) {
      mpfr_clear(lo);
      throw std::domain_error("RealBall: sqrt of ball not strictly positive");
    }
    mpfr_sqrt(r.mid_, mid_, MPFR_RNDN);
    // |sqrt(x)-sqrt(m)| <= rad / (2 sqrt(lo))
    mpfr_t s;
    mpfr_init2(s, kRadPrec);
    mpfr_sqrt(s, lo, MPFR_RNDD);
    mpfr_mul_ui(s, s, 2, MPFR_RNDD);
    mpfr_div(r.rad_, rad_, s, MPFR_RNDU);
    mpfr_clears(lo, s, (mpfr_ptr)nullptr);
    r.add_rounding_radius();
    return r;
  }

  // e^x with certified bound: |e^x - e^m| <= e^{m+rad} - e^{m}^... use e^{hi} * rad
  RealBall exp() const {
    RealBall r(prec_);
    mpfr_exp(r.mid_, mid_, MPFR_RNDN);
    mpfr_t hi, eh;
    mpfr_init2(hi, kRadPrec);
    mpfr_init2(eh, kRadPrec);
    mpfr_add(hi, mid_, rad_, MPFR_RNDU);
    mpfr_exp(eh, hi, MPFR_RNDU);
    mpfr_mul(eh, eh, rad_, MPFR_RNDU);
    mpfr_nextabove(eh);
    mpfr_set(r.rad_, eh, MPFR_RNDU);
    mpfr_clears(hi, eh, (mpfr_ptr)nullptr);
    r.add_rounding_radius();
    return r;
  }

  bool nonzero_certified() const {
    mpfr_t am;
    mpfr_init2(am, kRadPrec);
    mpfr_abs(am, mid_, MPFR_RNDD);
    int cmp = mpfr_cmp(am, rad_);
    mpfr_clear(am);
    return cmp > 0;
  }

  // |mid| + rad as an upper-bound ball constant
  double abs_upper_double() const {
    mpfr_t t;
    mpfr_init2(t, kRadPrec);
    mpfr_abs(t, mid_, MPFR_RNDU);
    mpfr_add(t, t, rad_, MPFR_RNDU);
    double d = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return d;
  }

  bool contains_rational(const Rat& q) const {
    // |mid - q| <= rad
    mpfr_t d;
    mpfr_init2(d, prec_ + 64);
    mpfr_set_q(d, q.get_mpq_t(), MPFR_RNDN);
    mpfr_sub(d, mid_, d, MPFR_RNDA);
    mpfr_abs(d, d, MPFR_RNDU);
    // allow for the conversion error of q at prec_+64: add 2 ulps
    mpfr_nextabove(d);
    mpfr_nextabove(d);
    int cmp = mpfr_cmp(d, rad_);
    mpfr_clear(d);
    return cmp <= 0;
  }

  bool contains_zero() const { return !nonzero_certified(); }

  // the unique integer z with |mid - z| + rad < margin, if certified
  std::optional<Int> unique_integer(double margin = 0.25) const {
    mpfr_t z, d;
    mpfr_init2(z, std::max<mpfr_prec_t>(prec_, 64));
    mpfr_init2(d, std::max<mpfr_prec_t>(prec_, 64));
    mpfr_round(z, mid_);
    mpfr_sub(d, mid_, z, MPFR_RNDA);
    mpfr_abs(d, d, MPFR_RNDU);
    mpfr_add(d, d, rad_, MPFR_RNDU);
    bool ok = mpfr_cmp_d(d, margin) < 0;
    std::optional<Int> out;
    if (ok) {
      Int zz;
      mpfr_get_z(zz.get_mpz_t(), z, MPFR_RNDN);
      out = zz;
    }
    mpfr_clears(z, d, (mpfr_ptr)nullptr);
    return out;
  }

  void add_error(const RealBall& other_abs) {
    mpfr_add(rad_, rad_, other_abs.rad_, MPFR_RNDU);
    mpfr_t t;
    mpfr_init2(t, kRadPrec);
    mpfr_abs(t, other_abs.mid_, MPFR_RNDU);
    mpfr_add(rad_, rad_, t, MPFR_RNDU);
    mpfr_clear(t);
  }

 private:
  void init() {
    mpfr_init2(mid_, prec_);
    mpfr_set_zero(mid_, 1);
    mpfr_init2(rad_, kRadPrec);
    mpfr_set_zero(rad_, 1);
  }
  void clear() {
    if (!moved_) {
      mpfr_clear(mid_);
      mpfr_clear(rad_);
    }
    moved_ = false;
  }
  void set_rounding_radius() {
    mpfr_set_zero(rad_, 1);
    add_rounding_radius();
  }
  void add_rounding_radius() {
    // one ulp of mid, a safe bound for the rounding error of the last RNDN op
    if (mpfr_zero_p(mid_)) return;
    mpfr_t u;
    mpfr_init2(u, kRadPrec);
    mpfr_set_ui_2exp(u, 1, mpfr_get_exp(mid_) - prec_, MPFR_RNDU);
    mpfr_add(rad_, rad_, u, MPFR_RNDU);
    mpfr_clear(u);
  }

  mpfr_prec_t prec_;
  mutable mpfr_t mid_;
  mutable mpfr_t rad_;
  bool moved_ = false;
};

// pi as a ball
inline RealBall pi_ball(mpfr_prec_t prec) {
  RealBall b(prec);
  mpfr_const_pi(const_cast<mpfr_t&>(b.mid()), MPFR_RNDN);
  mpfr_set_ui_2exp(const_cast<mpfr_t&>(b.rad()), 1,
                   mpfr_get_exp(b.mid()) - prec, MPFR_RNDU);
  return b;
}

// cos(2 pi a / n), sin(2 pi a / n) as balls
inline std::pair<RealBall, RealBall> cos_sin_2pi(long a, long n, mpfr_prec_t prec) {
  RealBall theta = pi_ball(prec).scaled(Rat(2 * mod_l(a, n), n));
  RealBall c(prec), s(prec);
  mpfr_t sc, cc;
  mpfr_init2(sc, prec);
  mpfr_init2(cc, prec);
  mpfr_sin_cos(sc, cc, theta.mid(), MPFR_RNDN);
  // |cos x - cos m| <= |x - m|; same for sin
  RealBall cb(prec), sb(prec);
  mpfr_set(const_cast<mpfr_t&>(cb.mid()), cc, MPFR_RNDN);
  mpfr_set(const_cast<mpfr_t&>(sb.mid()), sc, MPFR_RNDN);
  mpfr_t r;
  mpfr_init2(r, kRadPrec);
  mpfr_set(r, theta.rad(), MPFR_RNDU);
  mpfr_set_ui_2exp(cc, 1, -(long)prec + 2, MPFR_RNDU);  // generous ulp bound
  mpfr_add(r, r, cc, MPFR_RNDU);
  mpfr_set(const_cast<mpfr_t&>(cb.rad()), r, MPFR_RNDU);
  mpfr_set(const_cast<mpfr_t&>(sb.rad()), r, MPFR_RNDU);
  mpfr_clears(sc, cc, r, (mpfr_ptr)nullptr);
  return {cb, sb};
}

class ComplexBall {
 public:
  ComplexBall() = default;
  ComplexBall(RealBall re, RealBall im) : re_(std::move(re)), im_(std::move(im)) {}
  explicit ComplexBall(mpfr_prec_t prec) : re_(prec), im_(prec) {}

  static ComplexBall exact(const Rat& r, mpfr_prec_t prec) {
    return {RealBall::exact(r, prec), RealBall::zero(prec)};
  }
  static ComplexBall zero(mpfr_prec_t prec) {
    return {RealBall::zero(prec), RealBall::zero(prec)};
  }
  // e^{2 pi i a/n}
  static ComplexBall root_of_unity(long a, long n, mpfr_prec_t prec) {
    auto [c, s] = cos_sin_2pi(a, n, prec);
    return {c, s};
  }

  const RealBall& re() const { return re_; }
  const RealBall& im() const { return im_; }

  ComplexBall conj() const { return {re_, -im_}; }
  ComplexBall operator-() const { return {-re_, -im_}; }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  ComplexBall scaled(const Rat& s) const { return {re_.scaled(s), im_.scaled(s)}; }
  ComplexBall mul_real(const RealBall& s) const { return {re_ * s, im_ * s}; }

  RealBall norm() const { return re_ * re_ + im_ * im_; }  // |z|^2
  RealBall abs() const { return norm().sqrt_pos(); }

  ComplexBall inverse() const {
    RealBall n = norm();
    RealBall ninv = n.inverse();
    return {re_ * ninv, (-im_) * ninv};
  }
  friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) {
    return a * b.inverse();
  }

  bool nonzero_certified() const {
    return re_.nonzero_certified() || im_.nonzero_certified();
  }
  bool contains_zero() const { return !nonzero_certified(); }

  bool contains(const std::complex<double>& z) const {
    // loose check used in tests
    return std::abs(re_.mid_double() - z.real()) <= re_.rad_double() + 1e-13 &&
           std::abs(im_.mid_double() - z.imag()) <= im_.rad_double() + 1e-13;
  }

  double rad_log2() const { return std::max(re_.rad_log2(), im_.rad_log2()); }

  std::complex<double> mid_complex() const {
    return {re_.mid_double(), im_.mid_double()};
  }

  // certified containment of the unique Gaussian-free integer (imaginary part
  // must certify to 0 within margin): used for the beta_b rounding step
  std::optional<Int> unique_integer(double margin = 0.25) const {
    auto z = re_.unique_integer(margin);
    if (!z) return std::nullopt;
    auto zi = im_.unique_integer(margin);
    if (!zi || *zi != 0) return std::nullopt;
    return z;
  }

 private:
  RealBall re_, im_;
};

// embed a cyclotomic number via zeta_n -> e^{2 pi i / n}
inline ComplexBall embed_complex(const CycNum& a, mpfr_prec_t prec) {
  if (prec < 32) throw std::invalid_argument("embed_complex: precision >= 32 required");
  long n = a.conductor();
  ComplexBall acc = ComplexBall::zero(prec);
  const auto& c = a.coeffs();
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    acc = acc + ComplexBall::root_of_unity((long)i, n, prec).scaled(c[i]);
  }
  return acc;
}

// Horner evaluation of an integer polynomial (ascending coefficients)
inline ComplexBall eval_poly(const std::vector<Int>& poly, const ComplexBall& z,
                             mpfr_prec_t prec) {
  ComplexBall acc = ComplexBall::zero(prec);
  for (long i = (long)poly.size() - 1; i >= 0; --i) {
    acc = acc * z + ComplexBall::exact(Rat(poly[i]), prec);
  }
  return acc;
}

namespace detail {

// upper bound on |z| as a plain mpfr value (radius precision, rounded up)
inline void cb_abs_upper(const ComplexBall& z, mpfr_t out) {
  mpfr_t a, b;
  mpfr_init2(a, kRadPrec);
  mpfr_init2(b, kRadPrec);
  mpfr_abs(a, z.re().mid(), MPFR_RNDU);
  mpfr_add(a, a, z.re().rad(), MPFR_RNDU);
  mpfr_abs(b, z.im().mid(), MPFR_RNDU);
  mpfr_add(b, b, z.im().rad(), MPFR_RNDU);
  mpfr_hypot(out, a, b, MPFR_RNDU);
  mpfr_clears(a, b, (mpfr_ptr)nullptr);
}

// lower bound on |z| (0 if the ball may contain 0)
inline void cb_abs_lower(const ComplexBall& z, mpfr_t out) {
  mpfr_t a, b;
  mpfr_init2(a, kRadPrec);
  mpfr_init2(b, kRadPrec);
  mpfr_abs(a, z.re().mid(), MPFR_RNDD);
  mpfr_sub(a, a, z.re().rad(), MPFR_RNDD);
  if (mpfr_sgn(a) < 0) mpfr_set_zero(a, 1);
  mpfr_abs(b, z.im().mid(), MPFR_RNDD);
  mpfr_sub(b, b, z.im().rad(), MPFR_RNDD);
  if (mpfr_sgn(b) < 0) mpfr_set_zero(b, 1);
  mpfr_hypot(out, a, b, MPFR_RNDD);
  mpfr_clears(a, b, (mpfr_ptr)nullptr);
}

}  // namespace detail

// all complex roots of a squarefree monic integer polynomial, certified
// pairwise-disjoint enclosing disks (returned as balls)
inline std::vector<ComplexBall> isolate_roots(const std::vector<Int>& poly,
                                              mpfr_prec_t prec) {
  long d = (long)poly.size() - 1;
  if (d == 0) return {};
  std::vector<Int> dpoly(d);
  for (long i = 1; i <= d; ++i) dpoly[i - 1] = poly[i] * i;
  // initial approximations: Aberth-Ehrlich in double precision
  std::vector<std::complex<double>> z(d);
  for (long i = 0; i < d; ++i) {
    double ang = 2 * 3.14159265358979 * i / d + 0.4;
    z[i] = std::polar(1.0 + 0.3 * i / std::max<long>(1, d), ang);
  }
  auto evald = [&](const std::vector<Int>& p, std::complex<double> x) {
    std::complex<double> acc = 0;
    for (long i = (long)p.size() - 1; i >= 0; --i) acc = acc * x + p[i].get_d();
    return acc;
  };
  for (int it = 0; it < 500; ++it) {
    double moved = 0;
    for (long i = 0; i < d; ++i) {
      std::complex<double> p = evald(poly, z[i]);
      std::complex<double> dp = evald(dpoly, z[i]);
      if (std::abs(dp) == 0) { z[i] += 1e-3; continue; }
      std::complex<double> w = p / dp;
      std::complex<double> s = 0;
      for (long j = 0; j < d; ++j) {
        if (j != i) s += 1.0 / (z[i] - z[j]);
      }
      std::complex<double> corr = w / (1.0 - w * s);
      z[i] -= corr;
      moved = std::max(moved, std::abs(corr));
    }
    if (moved < 1e-14) break;
  }
  // Newton refinement at full precision, then certification
  for (int attempt = 0; attempt < 4; ++attempt) {
    mpfr_prec_t p = prec << attempt;
    std::vector<ComplexBall> out;
    bool ok = true;
    for (long i = 0; i < d && ok; ++i) {
      mpfr_t xr, xi;
      mpfr_init2(xr, p);
      mpfr_init2(xi, p);
      mpfr_set_d(xr, z[i].real(), MPFR_RNDN);
      mpfr_set_d(xi, z[i].imag(), MPFR_RNDN);
      for (long it = 0; it < 14; ++it) {
        ComplexBall x(RealBall::from_double(0, p), RealBall::from_double(0, p));
        mpfr_set(const_cast<mpfr_t&>(x.re().mid()), xr, MPFR_RNDN);
        mpfr_set(const_cast<mpfr_t&>(x.im().mid()), xi, MPFR_RNDN);
        ComplexBall pv = eval_poly(poly, x, p);
        ComplexBall dv = eval_poly(dpoly, x, p);
        if (dv.contains_zero()) { ok = false; break; }
        ComplexBall nx = x - pv / dv;
        mpfr_set(xr, nx.re().mid(), MPFR_RNDN);
        mpfr_set(xi, nx.im().mid(), MPFR_RNDN);
      }
      if (!ok) { mpfr_clears(xr, xi, (mpfr_ptr)nullptr); break; }
      ComplexBall x(RealBall::from_double(0, p), RealBall::from_double(0, p));
      mpfr_set(const_cast<mpfr_t&>(x.re().mid()), xr, MPFR_RNDN);
      mpfr_set(const_cast<mpfr_t&>(x.im().mid()), xi, MPFR_RNDN);
      mpfr_clears(xr, xi, (mpfr_ptr)nullptr);
      // certified inclusion radius: the nearest root is within d |p(x)/p'(x)|
      ComplexBall pv = eval_poly(poly, x, p);
      ComplexBall dv = eval_poly(dpoly, x, p);
      mpfr_t up, lo, rho;
      mpfr_init2(up, kRadPrec);
      mpfr_init2(lo, kRadPrec);
      mpfr_init2(rho, kRadPrec);
      detail::cb_abs_upper(pv, up);
      detail::cb_abs_lower(dv, lo);
      if (mpfr_zero_p(lo)) {
        mpfr_clears(up, lo, rho, (mpfr_ptr)nullptr);
        ok = false;
        break;
      }
      mpfr_div(rho, up, lo, MPFR_RNDU);
      mpfr_mul_si(rho, rho, d, MPFR_RNDU);
      mpfr_set(const_cast<mpfr_t&>(x.re().rad()), rho, MPFR_RNDU);
      mpfr_set(const_cast<mpfr_t&>(x.im().rad()), rho, MPFR_RNDU);
      mpfr_clears(up, lo, rho, (mpfr_ptr)nullptr);
      out.push_back(x);
    }
    if (!ok) continue;
    // pairwise disjoint disks (checked with directed rounding)
    bool disjoint = true;
    mpfr_t dx, dy, dist, rsum;
    mpfr_init2(dx, 128);
    mpfr_init2(dy, 128);
    mpfr_init2(dist, 128);
    mpfr_init2(rsum, 128);
    for (long i = 0; i < d && disjoint; ++i) {
      for (long j = i + 1; j < d && disjoint; ++j) {
        mpfr_sub(dx, out[i].re().mid(), out[j].re().mid(), MPFR_RNDZ);
        mpfr_sub(dy, out[i].im().mid(), out[j].im().mid(), MPFR_RNDZ);
        mpfr_hypot(dist, dx, dy, MPFR_RNDD);
        mpfr_nextbelow(dist);
        mpfr_add(rsum, out[i].re().rad(), out[j].re().rad(), MPFR_RNDU);
        if (mpfr_cmp(dist, rsum) <= 0) disjoint = false;
      }
    }
    mpfr_clears(dx, dy, dist, rsum, (mpfr_ptr)nullptr);
    if (disjoint) return out;
  }
  throw std::runtime_error("isolate_roots: could not certify disjoint root disks");
}

}  // namespace cuspact
