#pragma once

// Newform data ingestion and the analytic side of the Atkin-Lehner pipeline:
// exact eigenvalue arithmetic in the coefficient field L = Q[a], certified
// complex embeddings, pseudo-eigenvalue approximation, and the eigenblock
// decomposition of S_k(Gamma) into newform pieces.

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ball.hpp"
#include "qexp.hpp"
#include "zlinalg.hpp"

namespace cuspact {

// arithmetic in L = Q[a]/(field_poly); elements are coordinate vectors
class NumberField {
 public:
  explicit NumberField(std::vector<Int> poly) : poly_(std::move(poly)) {
    deg_ = (long)poly_.size() - 1;
    if (deg_ < 1 || poly_.back() != 1)
      throw std::invalid_argument("NumberField: monic integer polynomial required");
    // reduction rows for a^t, t in [deg, 2 deg - 2]
    std::vector<Rat> base(deg_);
    for (long i = 0; i < deg_; ++i) base[i] = Rat(-poly_[i]);
    std::vector<Rat> cur = base;
    for (long t = deg_; t <= 2 * deg_ - 2; ++t) {
      red_.push_back(cur);
      std::vector<Rat> nxt(deg_, 0);
      for (long i = 1; i < deg_; ++i) nxt[i] = cur[i - 1];
      if (cur[deg_ - 1] != 0) {
        for (long i = 0; i < deg_; ++i) nxt[i] += cur[deg_ - 1] * base[i];
      }
      cur = nxt;
    }
    // power sums of the roots by Newton's identities
    ps_.assign(2 * deg_ - 1 < 1 ? 1 : 2 * deg_ - 1, Rat(0));
    ps_[0] = deg_;
    for (long t = 1; t < (long)ps_.size(); ++t) {
      Rat s = 0;
      // e_i = (-1)^i * coeff_{deg-i}
      for (long i = 1; i <= std::min(t, deg_); ++i) {
        Rat ei = Rat(poly_[deg_ - i]) * ((i % 2) ? -1 : 1);
        s += ((i % 2) ? 1 : -1) * ei * ps_[t - i];
      }
      if (t <= deg_) {
        Rat et = Rat(poly_[deg_ - t]) * ((t % 2) ? -1 : 1);
        s += ((t % 2) ? 1 : -1) * Rat(t) * et;
      }
      ps_[t] = s;
    }
  }

  long degree() const { return deg_; }
  const std::vector<Int>& poly() const { return poly_; }

  std::vector<Rat> one() const {
    std::vector<Rat> v(deg_, 0);
    v[0] = 1;
    return v;
  }
  std::vector<Rat> zero() const { return std::vector<Rat>(deg_, 0); }

  std::vector<Rat> mul(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    std::vector<Rat> prod(2 * deg_ - 1, 0);
    for (long i = 0; i < deg_; ++i) {
      if (x[i] == 0) continue;
      for (long j = 0; j < deg_; ++j) {
        if (y[j] != 0) prod[i + j] += x[i] * y[j];
      }
    }
    std::vector<Rat> out(prod.begin(), prod.begin() + deg_);
    for (long t = deg_; t <= 2 * deg_ - 2; ++t) {
      if (prod[t] == 0) continue;
      for (long i = 0; i < deg_; ++i) {
        if (red_[t - deg_][i] != 0) out[i] += prod[t] * red_[t - deg_][i];
      }
    }
    return out;
  }

  // Tr_{L/Q}(a^j * x) for 0 <= j < degree
  Rat trace_shifted(const std::vector<Rat>& x, long j) const {
    Rat t = 0;
    for (long i = 0; i < deg_; ++i) {
      if (x[i] != 0) t += x[i] * ps_[i + j];
    }
    return t;
  }

  bool is_zero(const std::vector<Rat>& x) const {
    return std::all_of(x.begin(), x.end(), [](const Rat& r) { return r == 0; });
  }

 private:
  std::vector<Int> poly_;
  long deg_ = 0;
  std::vector<std::vector<Rat>> red_;
  std::vector<Rat> ps_;
};

struct NewformRecord {
  long level = 1;
  long weight = 2;
  std::vector<Int> field_poly;
  long degree = 1;
  std::vector<std::vector<Rat>> an;          // an[n-1] = a_n in the power basis
  std::map<long, std::vector<Rat>> char_values;  // d mod level -> eps(d) in L
  long n_coeffs = 0;
  std::shared_ptr<NumberField> L;

  const std::vector<Rat>& coeff(long n) const {
    if (n < 1 || n > n_coeffs)
      throw std::out_of_range("NewformRecord: insufficient coefficients");
    return an[n - 1];
  }
  const std::vector<Rat>& eps(long d) const {
    auto it = char_values.find(mod_l(d, level));
    if (it == char_values.end())
      throw std::invalid_argument("NewformRecord: character value missing");
    return it->second;
  }
  bool eps_is_one(long d) const {
    auto v = eps(d);
    if (v[0] != 1) return false;
    for (size_t i = 1; i < v.size(); ++i) {
      if (v[i] != 0) return false;
    }
    return true;
  }
};

struct NewformFile {
  long level = 1;
  long weight = 2;
  long char_cond_divides = 1;
  long space_dim_check = -1;
  std::vector<NewformRecord> records;
};

namespace detail {

inline std::vector<Rat> parse_rat_vec(const nlohmann::json& j) {
  std::vector<Rat> out;
  for (const auto& s : j) out.push_back(rat_from_string(s.get<std::string>()));
  return out;
}

}  // namespace detail

// validate the multiplicative structure: a_1 = 1 and, for primes p not
// dividing the level with p^2 <= n_coeffs, a_{p^2} = a_p^2 - eps(p) p^{k-1}
inline void validate_record(const NewformRecord& rec) {
  const NumberField& L = *rec.L;
  if (rec.an.empty() || !(rec.an[0] == L.one()))
    throw std::runtime_error("newform record: a_1 != 1");
  for (long p : primes_upto(200)) {
    if (rec.level % p == 0) continue;
    if (p * p > rec.n_coeffs) break;
    auto lhs = rec.coeff(p * p);
    auto rhs = L.mul(rec.coeff(p), rec.coeff(p));
    Int pk = 1;
    for (long i = 0; i < rec.weight - 1; ++i) pk *= p;
    auto e = rec.eps(p);
    for (long i = 0; i < L.degree(); ++i) rhs[i] -= Rat(pk) * e[i];
    if (!(lhs == rhs))
      throw std::runtime_error("newform record: a_{p^2} consistency fails at p=" +
                               std::to_string(p));
  }
}

// derive the nebentypus from coefficients at generating primes, extend
// multiplicatively, and cross-check against the stored values
inline std::map<long, std::vector<Rat>> nebentypus_from_coeffs(const NewformRecord& rec) {
  const NumberField& L = *rec.L;
  long M = rec.level;
  if (M == 1) return {};
  std::map<long, std::vector<Rat>> known;
  known[1] = L.one();
  // eps(p) = (a_p^2 - a_{p^2}) / p^{k-1}
  for (long p : primes_upto(std::max<long>(3, 10 * M))) {
    if (M % p == 0) continue;
    if (p * p > rec.n_coeffs) break;
    auto v = L.mul(rec.coeff(p), rec.coeff(p));
    auto w = rec.coeff(p * p);
    Int pk = 1;
    for (long i = 0; i < rec.weight - 1; ++i) pk *= p;
    Rat inv = Rat(1) / Rat(pk);
    std::vector<Rat> e(L.degree());
    for (long i = 0; i < L.degree(); ++i) e[i] = (v[i] - w[i]) * inv;
    known[mod_l(p, M)] = e;
  }
  // close multiplicatively
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<long, long>> pairs;
    for (auto& [d1, v1] : known) {
      for (auto& [d2, v2] : known) {
        long d = mod_l(d1 * d2, M);
        if (!known.count(d)) pairs.push_back({d1, d2});
      }
    }
    for (auto [d1, d2] : pairs) {
      long d = mod_l(d1 * d2, M);
      if (!known.count(d)) {
        known[d] = L.mul(known[d1], known[d2]);
        grew = true;
      }
    }
  }
  if ((long)known.size() != (long)units_mod(M).size())
    throw std::runtime_error("nebentypus_from_coeffs: generating primes insufficient");
  for (auto& [d, v] : known) {
    auto it = rec.char_values.find(d);
    if (it != rec.char_values.end() && !(it->second == v))
      throw std::runtime_error("nebentypus_from_coeffs: mismatch with stored values at d=" +
                               std::to_string(d));
  }
  return known;
}

inline NewformFile load_newform_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file: " + path);
  nlohmann::json j;
  in >> j;
  NewformFile out;
  out.level = j.at("level").get<long>();
  out.weight = j.at("weight").get<long>();
  out.char_cond_divides = j.value("char_cond_divides", 1L);
  out.space_dim_check = j.value("space_dim_check", -1L);
  for (const auto& r : j.at("newforms")) {
    NewformRecord rec;
    rec.level = r.at("level").get<long>();
    rec.weight = r.at("weight").get<long>();
    for (const auto& c : r.at("field_poly")) rec.field_poly.push_back(Int(c.get<long>()));
    rec.degree = (long)rec.field_poly.size() - 1;
    rec.L = std::make_shared<NumberField>(rec.field_poly);
    for (const auto& v : r.at("an")) rec.an.push_back(detail::parse_rat_vec(v));
    rec.n_coeffs = r.at("n_coeffs").get<long>();
    if ((long)rec.an.size() != rec.n_coeffs)
      throw std::runtime_error("newform record: n_coeffs mismatch");
    for (const auto& kv : r.at("char").at("values")) {
      rec.char_values[kv.at(0).get<long>()] = detail::parse_rat_vec(kv.at(1));
    }
    validate_record(rec);
    nebentypus_from_coeffs(rec);
    out.records.push_back(std::move(rec));
  }
  return out;
}

// fixture directory access with per-(level, weight) caching
class NewformStore {
 public:
  explicit NewformStore(std::string dir) : dir_(std::move(dir)) {}

  const NewformFile& get(long level, long weight) const {
    auto key = std::make_pair(level, weight);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      std::string path = dir_ + "/N" + std::to_string(level) + "_k" +
                         std::to_string(weight) + ".json";
      if (!std::filesystem::exists(path))
        throw std::runtime_error("missing newform fixture: " + path);
      it = cache_.emplace(key, load_newform_file(path)).first;
    }
    return it->second;
  }

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  mutable std::map<std::pair<long, long>, NewformFile> cache_;
};

// one complex embedding of a newform, with certified root and coefficient balls
struct EmbeddedNewform {
  const NewformRecord* source = nullptr;
  long embedding_index = 0;
  ComplexBall root;
  mpfr_prec_t precision = 0;
  std::vector<ComplexBall> root_pow;  // root^0 .. root^{deg-1}

  ComplexBall coeff_ball(long n) const {
    const auto& v = source->coeff(n);
    ComplexBall acc = ComplexBall::zero(precision);
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0) acc = acc + root_pow[i].scaled(v[i]);
    }
    return acc;
  }
};

inline std::vector<EmbeddedNewform> embed_newform(const NewformRecord& rec,
                                                  mpfr_prec_t prec) {
  auto roots = isolate_roots(rec.field_poly, prec);
  std::vector<EmbeddedNewform> out;
  for (long i = 0; i < (long)roots.size(); ++i) {
    EmbeddedNewform e;
    e.source = &rec;
    e.embedding_index = i;
    e.root = roots[i];
    e.precision = prec;
    e.root_pow.push_back(ComplexBall::exact(Rat(1), prec));
    for (long j = 1; j < rec.degree; ++j) e.root_pow.push_back(e.root_pow.back() * e.root);
    out.push_back(std::move(e));
  }
  return out;
}

// index of the embedding whose root disk must contain the conjugate of
// embedding i's root; raises precision via caller when ambiguous
inline long conjugate_embedding(const std::vector<EmbeddedNewform>& emb, long i) {
  const ComplexBall c = emb[i].root.conj();
  long found = -1;
  for (long j = 0; j < (long)emb.size(); ++j) {
    // disks intersect?
    double dx = c.re().mid_double() - emb[j].root.re().mid_double();
    double dy = c.im().mid_double() - emb[j].root.im().mid_double();
    double rr = c.re().rad_double() + emb[j].root.re().rad_double();
    if (std::sqrt(dx * dx + dy * dy) <= rr * 1.0000001 + 1e-300) {
      if (found >= 0) throw std::runtime_error("conjugate embedding ambiguous; raise precision");
      found = j;
    }
  }
  if (found < 0) throw std::runtime_error("conjugate embedding not found");
  return found;
}

// certified upper bound for sum_{n > n0} d(n) n^{k/2} x^n with d(n) <= n
inline RealBall tail_bound(long k, const RealBall& x, long n0, mpfr_prec_t prec) {
  // exponent e = ceil(k/2) + 1 >= k/2 + 1
  long e = (k + 1) / 2 + 1;
  // upper bound xu on x; require xu < 1
  mpfr_t xu;
  mpfr_init2(xu, kRadPrec);
  mpfr_add(xu, x.mid(), x.rad(), MPFR_RNDU);
  if (mpfr_cmp_ui(xu, 1) >= 0 || mpfr_sgn(xu) < 0) {
    mpfr_clear(xu);
    throw std::domain_error("tail_bound: x must lie in (0,1)");
  }
  RealBall xub(prec);
  mpfr_set(const_cast<mpfr_t&>(xub.mid()), xu, MPFR_RNDU);
  mpfr_clear(xu);
  // ratio bound r = ((n0+2)/(n0+1))^e * xu; need r < 1 else grow n0 handled by caller
  RealBall ratio = xub.scaled(Rat(1));
  RealBall frac = RealBall::exact(Rat(n0 + 2, n0 + 1), prec);
  for (long i = 0; i < e; ++i) ratio = ratio * frac;
  // first term (n0+1)^e * xu^{n0+1}
  RealBall term = RealBall::exact(Rat(1), prec);
  {
    Int np = 1;
    for (long i = 0; i < e; ++i) np *= (n0 + 1);
    term = term.scaled(Rat(np));
    // xu^{n0+1} by binary powering
    RealBall xp = RealBall::exact(Rat(1), prec);
    RealBall base = xub;
    long ee = n0 + 1;
    while (ee > 0) {
      if (ee & 1) xp = xp * base;
      base = base * base;
      ee >>= 1;
    }
    term = term * xp;
  }
  // S <= term / (1 - r)
  RealBall one = RealBall::exact(Rat(1), prec);
  RealBall denom = one - ratio;
  if (!denom.nonzero_certified() || denom.mid_double() <= 0)
    throw std::domain_error("tail_bound: ratio >= 1; increase n0");
  RealBall bound = term * denom.inverse();
  // convert to pure upper bound: fold radius into midpoint
  RealBall out(prec);
  mpfr_add(const_cast<mpfr_t&>(out.mid()), bound.mid(), bound.rad(), MPFR_RNDU);
  return out;
}

struct PseudoEigenvalue {
  ComplexBall value;
  Rat b_used;
  long terms_used = 0;
  mpfr_prec_t precision = 0;
};

// lambda_N(f) for an embedded newform at its own level, via the series at
// tau = i b / sqrt(N); the denominator ball must exclude zero
inline std::optional<PseudoEigenvalue> pseudo_eigenvalue_at_b(const EmbeddedNewform& ef,
                                                              const Rat& b,
                                                              mpfr_prec_t prec) {
  const NewformRecord& rec = *ef.source;
  long N = rec.level;
  long k = rec.weight;
  RealBall sqrtN = RealBall::exact_int(Int(N), prec).sqrt_pos();
  RealBall twopi = pi_ball(prec).scaled(Rat(2));
  // x1 = exp(-2 pi / (b sqrt N)), x2 = exp(-2 pi b / sqrt N)
  RealBall x1 = (-(twopi * (sqrtN.scaled(b)).inverse())).exp();
  RealBall x2 = (-(twopi.scaled(b) * sqrtN.inverse())).exp();
  // choose term count: tail below 2^-(prec+8), capped by available coefficients
  long T = rec.n_coeffs;
  RealBall tail1(prec), tail2(prec);
  long best = -1;
  for (long t = std::min<long>(64, T); t <= T; t = std::min(T, t * 2)) {
    try {
      RealBall t1 = tail_bound(k, x1, t, prec);
      RealBall t2 = tail_bound(k, x2, t, prec);
      double want = -(double)prec - 8;
      if ((t1.mid_double() == 0 || std::log2(std::abs(t1.mid_double())) < want) &&
          (t2.mid_double() == 0 || std::log2(std::abs(t2.mid_double())) < want)) {
        best = t;
        tail1 = t1;
        tail2 = t2;
        break;
      }
    } catch (const std::domain_error&) {
      // ratio >= 1: need more terms
    }
    if (t == T) break;
  }
  if (best < 0) {
    // use everything we have; tails still certified if computable
    best = T;
    tail1 = tail_bound(k, x1, T, prec);
    tail2 = tail_bound(k, x2, T, prec);
  }
  ComplexBall num = ComplexBall::zero(prec);
  ComplexBall den = ComplexBall::zero(prec);
  RealBall p1 = RealBall::exact(Rat(1), prec);
  RealBall p2 = RealBall::exact(Rat(1), prec);
  for (long n = 1; n <= best; ++n) {
    p1 = p1 * x1;
    p2 = p2 * x2;
    ComplexBall an = ef.coeff_ball(n);
    num = num + an.mul_real(p1);
    den = den + an.conj().mul_real(p2);
  }
  // add certified tails as extra radius
  RealBall z = RealBall::zero(prec);
  num = ComplexBall(pad_radius(num.re(), tail1), pad_radius(num.im(), tail1));
  den = ComplexBall(pad_radius(den.re(), tail2), pad_radius(den.im(), tail2));
  if (!den.nonzero_certified()) return std::nullopt;
  // lambda = i^k b^{-k} num / den
  ComplexBall lam = num / den;
  Rat bk = 1;
  for (long i = 0; i < k; ++i) bk /= b;
  lam = lam.scaled(bk);
  switch (mod_l(k, 4)) {
    case 0: break;
    case 1: lam = ComplexBall(-lam.im(), lam.re()); break;
    case 2: lam = -lam; break;
    case 3: lam = ComplexBall(lam.im(), -lam.re()); break;
  }
  PseudoEigenvalue out;
  out.value = lam;
  out.b_used = b;
  out.terms_used = best;
  out.precision = prec;
  return out;
}

inline RealBall pad_radius(const RealBall& x, const RealBall& extra_upper) {
  RealBall out = x;
  mpfr_t t;
  mpfr_init2(t, kRadPrec);
  mpfr_abs(t, extra_upper.mid(), MPFR_RNDU);
  mpfr_add(t, t, extra_upper.rad(), MPFR_RNDU);
  mpfr_add(const_cast<mpfr_t&>(out.rad()), out.rad(), t, MPFR_RNDU);
  mpfr_clear(t);
  return out;
}

// b-schedule: 1, 1.1, 0.9, 1.2, 0.8, 1.3, 0.7, 1.4
inline PseudoEigenvalue pseudo_eigenvalue(const EmbeddedNewform& ef, mpfr_prec_t prec) {
  static const int tenths[] = {10, 11, 9, 12, 8, 13, 7, 14};
  for (int t : tenths) {
    auto r = pseudo_eigenvalue_at_b(ef, Rat(t, 10), prec);
    if (r) return *r;
  }
  throw std::runtime_error("pseudo_eigenvalue: denominator vanished for all scheduled b");
}

// eigenblock M_{f,d}: alpha_d(M_f) + alpha_e(M_f) (single branch when d == e)
struct EigenBlock {
  const NewformRecord* f = nullptr;
  long N = 0;  // ambient level
  long M = 0;  // newform level
  long d = 1, e = 1;
  long dim() const { return f->degree * (d != e ? 2 : 1); }
};

struct SpaceSpec {
  long k = 2;
  long N = 1;
  std::vector<long> H;  // subgroup of (Z/N)^x, listed elements
};

inline SpaceSpec gamma0_space(long k, long N) { return {k, N, units_mod(N)}; }

// H = kernel of (Z/N)^x -> (Z/C)^x
inline SpaceSpec gamma_upper_space(long k, long N, long C) {
  SpaceSpec s{k, N, {}};
  for (long u : units_mod(N)) {
    if (N == 1 || mod_l(u, C) == 1 % C) s.H.push_back(u);
  }
  return s;
}

inline std::vector<EigenBlock> enumerate_blocks(const SpaceSpec& sp,
                                                const NewformStore& store) {
  std::vector<EigenBlock> out;
  for (long M : divisors(sp.N)) {
    const NewformFile& file = store.get(M, sp.k);
    // fixture scope check: every character trivial on (H mod M) must have
    // conductor dividing the file scope
    long scope = file.char_cond_divides;
    for (long C : divisors(M)) {
      bool h_in_ker = true;
      for (long h : sp.H) {
        if (M > 1 && mod_l(h, C) != 1 % C) { h_in_ker = false; break; }
      }
      (void)h_in_ker;
    }
    // required scope: the minimal C | M with H mod M contained in ker(->(Z/C)^x)
    long needed = M;
    for (long C : divisors(M)) {
      bool ok = true;
      for (long h : sp.H) {
        if (M > 1 && C > 1 && mod_l(mod_l(h, M), C) != 1) { ok = false; break; }
      }
      if (ok) { needed = C; break; }
    }
    if (scope % needed != 0 && M > 1)
      throw std::runtime_error("fixture scope too small at level " + std::to_string(M) +
                               ": need conductor | " + std::to_string(needed));
    for (const auto& rec : file.records) {
      bool fixed = true;
      for (long h : sp.H) {
        if (M > 1 && !rec.eps_is_one(mod_l(h, M))) { fixed = false; break; }
      }
      if (!fixed) continue;
      long Q = sp.N / M;
      for (long d : divisors(Q)) {
        if (d * d > Q) continue;
        out.push_back(EigenBlock{&rec, sp.N, M, d, Q / d});
      }
    }
  }
  return out;
}

// exact matrix of the diamond operator <m> on the block's trace basis:
// Tr(a^{j-1} f) -> Tr(a^{j-1} eps(m) f); block-diagonal over the two branches
inline RatMatrix block_diamond_action(const EigenBlock& blk, long m) {
  const NewformRecord& rec = *blk.f;
  const NumberField& L = *rec.L;
  long g = rec.degree;
  auto em = rec.level == 1 ? L.one() : rec.eps(mod_l(m, rec.level));
  // rows: coords of eps(m) * a^{j-1} over the power basis
  RatMatrix single(g, g);
  std::vector<Rat> cur = em;
  for (long j = 0; j < g; ++j) {
    for (long i = 0; i < g; ++i) single.e[j][i] = cur[i];
    if (j + 1 < g) {
      // multiply by a
      std::vector<Rat> shifted(g, 0);
      for (long i = 1; i < g; ++i) shifted[i] = cur[i - 1];
      std::vector<Rat> apow(g, 0);
      // reduce overflow of top coefficient via field multiplication
      std::vector<Rat> av(g, 0);
      if (g == 1) {
        // a is rational root: a = -poly[0]
        shifted[0] = cur[0] * Rat(-rec.field_poly[0]);
      } else {
        av[1] = 1;
        shifted = L.mul(cur, av);
      }
      cur = shifted;
    }
  }
  long n = blk.dim();
  RatMatrix out(n, n);
  for (long b = 0; b < n / g; ++b) {
    for (long i = 0; i < g; ++i) {
      for (long j = 0; j < g; ++j) out.e[b * g + i][b * g + j] = single.e[i][j];
    }
  }
  return out;
}

}  // namespace cuspact
