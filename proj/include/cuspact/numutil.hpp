#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cuspact {

using Int = mpz_class;
using Rat = mpq_class;

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline long gcd_l(long a, long b) { return std::gcd(a, b); }

inline long lcm_l(long a, long b) { return std::lcm(a, b); }

inline long mod_l(long a, long n) {
  long r = a % n;
  return r < 0 ? r + n : r;
}

inline long mod_inverse(long a, long n) {
  long t = 0, newt = 1, r = n, newr = mod_l(a, n);
  while (newr != 0) {
    long q = r / newr;
    t = std::exchange(newt, t - q * newt);
    r = std::exchange(newr, r - q * newr);
  }
  if (r != 1) throw std::domain_error("mod_inverse: not invertible");
  return mod_l(t, n);
}

inline long pow_mod(long b, long e, long n) {
  long r = 1 % n;
  b = mod_l(b, n);
  while (e > 0) {
    if (e & 1) r = (long)((__int128)r * b % n);
    b = (long)((__int128)b * b % n);
    e >>= 1;
  }
  return r;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
    if (n % p == 0) return n == p;
  }
  long d = n - 1;
  int s = 0;
  while (d % 2 == 0) d /= 2, ++s;
  for (long a : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
    long x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 1; i < s; ++i) {
      x = (long)((__int128)x * x % n);
      if (x == n - 1) { comp = false; break; }
    }
    if (comp) return false;
  }
  return true;
}

inline std::vector<std::pair<long, int>> factorize(long n) {
  std::vector<std::pair<long, int>> out;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) n /= d, ++e;
      out.push_back({d, e});
    }
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

// prime factors of an arbitrary-precision integer; trial division then Pollard rho
inline void factorize_mpz(Int n, std::vector<Int>& primes_out) {
  if (n < 0) n = -n;
  if (n <= 1) return;
  for (long d = 2; d < 100000; d == 2 ? d = 3 : d += 2) {
    if (n % d == 0) {
      primes_out.push_back(d);
      while (n % d == 0) n /= d;
    }
    if (n == 1) return;
    Int dd(d);
    if (dd * dd > n) break;
  }
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30)) {
    primes_out.push_back(n);
    return;
  }
  // Pollard rho
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(0x5eedul);
  for (;;) {
    Int c = rng.get_z_range(n - 2) + 1;
    Int x = rng.get_z_range(n), y = x, d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      d = gcd(abs(x - y), n);
    }
    if (d != n) {
      factorize_mpz(d, primes_out);
      factorize_mpz(n / d, primes_out);
      return;
    }
  }
}

inline long totient(long n) {
  long r = n;
  for (auto [p, e] : factorize(n)) r -= r / p;
  return r;
}

inline std::vector<long> divisors(long n) {
  std::vector<long> out;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<long> units_mod(long n) {
  std::vector<long> out;
  if (n == 1) return {0};
  for (long x = 1; x < n; ++x) {
    if (gcd_l(x, n) == 1) out.push_back(x);
  }
  return out;
}

inline std::vector<long> primes_upto(long n) {
  std::vector<bool> sieve(n + 1, true);
  std::vector<long> out;
  for (long i = 2; i <= n; ++i) {
    if (sieve[i]) {
      out.push_back(i);
      for (long j = i * i; j <= n; j += i) sieve[j] = false;
    }
  }
  return out;
}

// index [SL2(Z) : Gamma_1(N)]
inline long gamma1_index(long N) {
  if (N == 1) return 1;
  if (N == 2) return 6;
  long idx = N * N;
  for (auto [p, e] : factorize(N)) idx = idx / p / p * (p * p - 1);
  return idx;
}

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

// small deterministic RNG for property tests (splitmix64)
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  long below(long n) { return (long)(next() % (uint64_t)n); }
  long range(long lo, long hi) { return lo + below(hi - lo + 1); }
};

}  // namespace cuspact
