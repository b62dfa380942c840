#pragma once

// Exact linear algebra over Z, Q and Q(zeta_n): Hermite and Smith normal
// forms with transforms, ranks over prime fields, kernels, row-space
// saturation and left solves.

#include <functional>

#include "cyclo.hpp"
#include "numutil.hpp"

namespace cuspact {

struct IntMatrix {
  long rows = 0, cols = 0;
  std::vector<std::vector<Int>> e;

  IntMatrix() = default;
  IntMatrix(long r, long c) : rows(r), cols(c), e(r, std::vector<Int>(c, 0)) {}
  static IntMatrix identity(long n) {
    IntMatrix m(n, n);
    for (long i = 0; i < n; ++i) m.e[i][i] = 1;
    return m;
  }
  Int& operator()(long r, long c) { return e[r][c]; }
  const Int& operator()(long r, long c) const { return e[r][c]; }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix out(a.rows, b.cols);
    for (long i = 0; i < a.rows; ++i) {
      for (long t = 0; t < a.cols; ++t) {
        if (a.e[i][t] == 0) continue;
        for (long j = 0; j < b.cols; ++j) {
          if (b.e[t][j] != 0) out.e[i][j] += a.e[i][t] * b.e[t][j];
        }
      }
    }
    return out;
  }
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
  }
  bool is_zero() const {
    for (auto& r : e) {
      for (auto& x : r) {
        if (x != 0) return false;
      }
    }
    return true;
  }
};

struct RatMatrix {
  long rows = 0, cols = 0;
  std::vector<std::vector<Rat>> e;

  RatMatrix() = default;
  RatMatrix(long r, long c) : rows(r), cols(c), e(r, std::vector<Rat>(c, 0)) {}
  static RatMatrix identity(long n) {
    RatMatrix m(n, n);
    for (long i = 0; i < n; ++i) m.e[i][i] = 1;
    return m;
  }
  Rat& operator()(long r, long c) { return e[r][c]; }
  const Rat& operator()(long r, long c) const { return e[r][c]; }
  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix out(a.rows, b.cols);
    for (long i = 0; i < a.rows; ++i) {
      for (long t = 0; t < a.cols; ++t) {
        if (a.e[i][t] == 0) continue;
        for (long j = 0; j < b.cols; ++j) {
          if (b.e[t][j] != 0) out.e[i][j] += a.e[i][t] * b.e[t][j];
        }
      }
    }
    return out;
  }
  friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
  }
};

inline Int mod_mpz(const Int& a, const Int& p) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
  return r;
}

struct HnfResult {
  IntMatrix H;  // rows x cols Hermite normal form; zero rows lie below the rank rows
  IntMatrix U;  // unimodular with U*A = H
  long rank = 0;
  std::vector<long> pivot_cols;
  int det_sign = 1;  // det(U); +1 whenever a zero row allows normalization
};

// Hermite normal form: upper staircase, positive pivots, entries above a pivot
// reduced into [0, pivot).  U tracks the row transform; det(U) is normalized
// to +1 by a final sign flip on a zero row (or on the last pivot row pair when
// the matrix has full row rank; the flip never changes H for rank < rows).
inline HnfResult hnf(const IntMatrix& A) {
  HnfResult res;
  long m = A.rows, n = A.cols;
  IntMatrix H = A;
  IntMatrix U = IntMatrix::identity(m);
  long detsign = 1;
  long r = 0;
  for (long c = 0; c < n && r < m; ++c) {
    // euclid down column c against rows >= r
    for (;;) {
      long piv = -1;
      for (long i = r; i < m; ++i) {
        if (H.e[i][c] != 0 && (piv < 0 || abs(H.e[i][c]) < abs(H.e[piv][c]))) piv = i;
      }
      if (piv < 0) break;
      if (piv != r) {
        std::swap(H.e[piv], H.e[r]);
        std::swap(U.e[piv], U.e[r]);
        detsign = -detsign;
      }
      bool clean = true;
      for (long i = r + 1; i < m; ++i) {
        if (H.e[i][c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), H.e[i][c].get_mpz_t(), H.e[r][c].get_mpz_t());
        if (q != 0) {
          for (long j = 0; j < n; ++j) H.e[i][j] -= q * H.e[r][j];
          for (long j = 0; j < m; ++j) U.e[i][j] -= q * U.e[r][j];
        }
        if (H.e[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (H.e[r][c] == 0) continue;
    if (H.e[r][c] < 0) {
      for (long j = 0; j < n; ++j) H.e[r][j] = -H.e[r][j];
      for (long j = 0; j < m; ++j) U.e[r][j] = -U.e[r][j];
      detsign = -detsign;
    }
    // reduce entries above the pivot into [0, pivot)
    for (long i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), H.e[i][c].get_mpz_t(), H.e[r][c].get_mpz_t());
      if (q != 0) {
        for (long j = 0; j < n; ++j) H.e[i][j] -= q * H.e[r][j];
        for (long j = 0; j < m; ++j) U.e[i][j] -= q * U.e[r][j];
      }
    }
    res.pivot_cols.push_back(c);
    ++r;
  }
  res.rank = r;
  if (detsign < 0 && r < m) {
    // flip the last row of U; the corresponding row of H is zero
    for (long j = 0; j < m; ++j) U.e[m - 1][j] = -U.e[m - 1][j];
    detsign = 1;
  }
  res.det_sign = detsign;
  res.H = std::move(H);
  res.U = std::move(U);
  return res;
}

struct SnfResult {
  std::vector<Int> divisors;  // b_1 | b_2 | ... (nonzero invariant factors)
  IntMatrix U, V;             // U*A*V = diag(divisors) padded with zeros
};

inline SnfResult snf(const IntMatrix& A) {
  long m = A.rows, n = A.cols;
  IntMatrix M = A;
  IntMatrix U = IntMatrix::identity(m);
  IntMatrix V = IntMatrix::identity(n);
  long t = 0;
  auto col_op = [&](long c1, long c2, const Int& q) {
    // col c1 -= q * col c2
    for (long i = 0; i < m; ++i) M.e[i][c1] -= q * M.e[i][c2];
    for (long i = 0; i < n; ++i) V.e[i][c1] -= q * V.e[i][c2];
  };
  auto col_swap = [&](long c1, long c2) {
    for (long i = 0; i < m; ++i) std::swap(M.e[i][c1], M.e[i][c2]);
    for (long i = 0; i < n; ++i) std::swap(V.e[i][c1], V.e[i][c2]);
  };
  while (t < std::min(m, n)) {
    // find nonzero entry of smallest absolute value in M[t.., t..]
    long pr = -1, pc = -1;
    for (long i = t; i < m; ++i) {
      for (long j = t; j < n; ++j) {
        if (M.e[i][j] != 0 && (pr < 0 || abs(M.e[i][j]) < abs(M.e[pr][pc]))) {
          pr = i;
          pc = j;
        }
      }
    }
    if (pr < 0) break;
    if (pr != t) { std::swap(M.e[pr], M.e[t]); std::swap(U.e[pr], U.e[t]); }
    if (pc != t) col_swap(pc, t);
    bool again = false;
    for (long i = t + 1; i < m; ++i) {
      if (M.e[i][t] == 0) continue;
      Int q = M.e[i][t] / M.e[t][t];
      for (long j = 0; j < n; ++j) M.e[i][j] -= q * M.e[t][j];
      for (long j = 0; j < m; ++j) U.e[i][j] -= q * U.e[t][j];
      if (M.e[i][t] != 0) again = true;
    }
    for (long j = t + 1; j < n; ++j) {
      if (M.e[t][j] == 0) continue;
      Int q = M.e[t][j] / M.e[t][t];
      col_op(j, t, q);
      if (M.e[t][j] != 0) again = true;
    }
    if (again) continue;
    // divisibility sweep: M[t][t] must divide all later entries
    bool fixed = true;
    for (long i = t + 1; i < m && fixed; ++i) {
      for (long j = t + 1; j < n && fixed; ++j) {
        if (M.e[i][j] % M.e[t][t] != 0) {
          // add row i to row t and restart this step
          for (long jj = 0; jj < n; ++jj) M.e[t][jj] += M.e[i][jj];
          for (long jj = 0; jj < m; ++jj) U.e[t][jj] += U.e[i][jj];
          fixed = false;
        }
      }
    }
    if (!fixed) continue;
    if (M.e[t][t] < 0) {
      for (long j = 0; j < n; ++j) M.e[t][j] = -M.e[t][j];
      for (long j = 0; j < m; ++j) U.e[t][j] = -U.e[t][j];
    }
    ++t;
  }
  SnfResult res;
  for (long i = 0; i < t; ++i) res.divisors.push_back(M.e[i][i]);
  res.U = std::move(U);
  res.V = std::move(V);
  return res;
}

inline long rank_mod_p(const IntMatrix& A, const Int& p) {
  if (!mpz_probab_prime_p(p.get_mpz_t(), 30))
    throw std::invalid_argument("rank_mod_p: p not prime");
  long m = A.rows, n = A.cols;
  std::vector<std::vector<Int>> M(m, std::vector<Int>(n));
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) M[i][j] = mod_mpz(A.e[i][j], p);
  }
  long r = 0;
  for (long c = 0; c < n && r < m; ++c) {
    long piv = -1;
    for (long i = r; i < m; ++i) {
      if (M[i][c] != 0) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    Int inv;
    mpz_invert(inv.get_mpz_t(), M[r][c].get_mpz_t(), p.get_mpz_t());
    for (long j = c; j < n; ++j) M[r][j] = M[r][j] * inv % p;
    for (long i = r + 1; i < m; ++i) {
      if (M[i][c] != 0) {
        Int f = M[i][c];
        for (long j = c; j < n; ++j) M[i][j] = mod_mpz(M[i][j] - f * M[r][j], p);
      }
    }
    ++r;
  }
  return r;
}

// left kernel vector mod p (x with x*A == 0 mod p, x != 0 mod p); empty if full row rank
inline std::vector<Int> left_kernel_mod_p(const IntMatrix& A, const Int& p) {
  long m = A.rows, n = A.cols;
  // row-reduce [A | I] over F_p; a zero row of the A part gives the transform row
  std::vector<std::vector<Int>> M(m, std::vector<Int>(n + m));
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) M[i][j] = mod_mpz(A.e[i][j], p);
    M[i][n + i] = 1;
  }
  long r = 0;
  for (long c = 0; c < n && r < m; ++c) {
    long piv = -1;
    for (long i = r; i < m; ++i) {
      if (M[i][c] != 0) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    Int inv;
    mpz_invert(inv.get_mpz_t(), M[r][c].get_mpz_t(), p.get_mpz_t());
    for (long j = 0; j < n + m; ++j) M[r][j] = M[r][j] * inv % p;
    for (long i = 0; i < m; ++i) {
      if (i != r && M[i][c] != 0) {
        Int f = M[i][c];
        for (long j = 0; j < n + m; ++j) M[i][j] = mod_mpz(M[i][j] - f * M[r][j], p);
      }
    }
    ++r;
  }
  if (r == m) return {};
  std::vector<Int> out(m);
  for (long j = 0; j < m; ++j) out[j] = M[r][n + j];
  return out;
}

// right kernel of a rational matrix, echelonized deterministically:
// each basis vector has leading coefficient 1 at its free column
inline std::vector<std::vector<Rat>> kernel(const RatMatrix& A) {
  long m = A.rows, n = A.cols;
  std::vector<std::vector<Rat>> M(A.e);
  std::vector<long> pivots;
  long r = 0;
  for (long c = 0; c < n && r < m; ++c) {
    long piv = -1;
    for (long i = r; i < m; ++i) {
      if (M[i][c] != 0) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    Rat inv = 1 / M[r][c];
    for (long j = c; j < n; ++j) M[r][j] *= inv;
    for (long i = 0; i < m; ++i) {
      if (i != r && M[i][c] != 0) {
        Rat f = M[i][c];
        for (long j = c; j < n; ++j) M[i][j] -= f * M[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<std::vector<Rat>> out;
  std::vector<bool> ispiv(n, false);
  for (long c : pivots) ispiv[c] = true;
  for (long c = 0; c < n; ++c) {
    if (ispiv[c]) continue;
    std::vector<Rat> v(n, 0);
    v[c] = 1;
    for (long i = 0; i < (long)pivots.size(); ++i) v[pivots[i]] = -M[i][c];
    // normalize: first nonzero coordinate 1
    for (auto& x : v) {
      if (x != 0) {
        if (x != 1) {
          Rat inv = 1 / x;
          for (auto& y : v) y *= inv;
        }
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

// solve X*A = B over Q; A must have full row rank. Throws on inconsistency.
inline RatMatrix solve_left(const RatMatrix& A, const RatMatrix& B) {
  // transpose: A^T X^T = B^T, gaussian elimination with the augmented block
  long m = A.rows, n = A.cols, k = B.rows;
  if (B.cols != n) throw std::invalid_argument("solve_left: shape mismatch");
  std::vector<std::vector<Rat>> M(n, std::vector<Rat>(m + k));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) M[i][j] = A.e[j][i];
    for (long j = 0; j < k; ++j) M[i][m + j] = B.e[j][i];
  }
  long r = 0;
  std::vector<long> pivots;
  for (long c = 0; c < m && r < n; ++c) {
    long piv = -1;
    for (long i = r; i < n; ++i) {
      if (M[i][c] != 0) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    Rat inv = 1 / M[r][c];
    for (long j = 0; j < m + k; ++j) M[r][j] *= inv;
    for (long i = 0; i < n; ++i) {
      if (i != r && M[i][c] != 0) {
        Rat f = M[i][c];
        for (long j = 0; j < m + k; ++j) M[i][j] -= f * M[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  if ((long)pivots.size() < m) throw std::domain_error("solve_left: rank-deficient A");
  // consistency: rows beyond rank must be zero in the B block
  for (long i = r; i < n; ++i) {
    for (long j = 0; j < k; ++j) {
      if (M[i][m + j] != 0) throw std::domain_error("solve_left: inconsistent system");
    }
  }
  RatMatrix X(k, m);
  for (long i = 0; i < (long)pivots.size(); ++i) {
    for (long j = 0; j < k; ++j) X.e[j][pivots[i]] = M[i][m + j];
  }
  return X;
}

// determinant by Bareiss fraction-free elimination
inline Int det_bareiss(IntMatrix A) {
  long n = A.rows;
  if (n != A.cols) throw std::invalid_argument("det: not square");
  Int prev = 1;
  long sign = 1;
  for (long k = 0; k < n - 1; ++k) {
    if (A.e[k][k] == 0) {
      long piv = -1;
      for (long i = k + 1; i < n; ++i) {
        if (A.e[i][k] != 0) { piv = i; break; }
      }
      if (piv < 0) return 0;
      std::swap(A.e[k], A.e[piv]);
      sign = -sign;
    }
    for (long i = k + 1; i < n; ++i) {
      for (long j = k + 1; j < n; ++j) {
        A.e[i][j] = (A.e[i][j] * A.e[k][k] - A.e[i][k] * A.e[k][j]) / prev;
      }
      A.e[i][k] = 0;
    }
    prev = A.e[k][k];
  }
  return sign > 0 ? A.e[n - 1][n - 1] : -A.e[n - 1][n - 1];
}

// Matrix over Q(zeta_n); all entries share one conductor.
struct CycMatrix {
  long rows = 0, cols = 0;
  long conductor = 1;
  std::vector<std::vector<CycNum>> e;

  CycMatrix() = default;
  CycMatrix(long r, long c, long n)
      : rows(r), cols(c), conductor(n),
        e(r, std::vector<CycNum>(c, CycNum(0).lifted(n))) {}
  static CycMatrix identity(long n, long conductor) {
    CycMatrix m(n, n, conductor);
    for (long i = 0; i < n; ++i) m.e[i][i] = CycNum(1).lifted(conductor);
    return m;
  }
  static CycMatrix from_int(const IntMatrix& a, long conductor) {
    CycMatrix m(a.rows, a.cols, conductor);
    for (long i = 0; i < a.rows; ++i) {
      for (long j = 0; j < a.cols; ++j) m.e[i][j] = CycNum(Rat(a.e[i][j])).lifted(conductor);
    }
    return m;
  }
  CycNum& operator()(long r, long c) { return e[r][c]; }
  const CycNum& operator()(long r, long c) const { return e[r][c]; }

  friend CycMatrix operator*(const CycMatrix& a, const CycMatrix& b) {
    long n = lcm_l(a.conductor, b.conductor);
    CycMatrix out(a.rows, b.cols, n);
    for (long i = 0; i < a.rows; ++i) {
      for (long t = 0; t < a.cols; ++t) {
        if (a.e[i][t].is_zero()) continue;
        for (long j = 0; j < b.cols; ++j) {
          if (!b.e[t][j].is_zero()) {
            out.e[i][j] = out.e[i][j] + a.e[i][t] * b.e[t][j];
          }
        }
      }
    }
    return out;
  }
  friend bool operator==(const CycMatrix& a, const CycMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) return false;
    for (long i = 0; i < a.rows; ++i) {
      for (long j = 0; j < a.cols; ++j) {
        if (!(a.e[i][j] == b.e[i][j])) return false;
      }
    }
    return true;
  }
  CycMatrix scaled(const Rat& s) const {
    CycMatrix out = *this;
    for (auto& row : out.e) {
      for (auto& x : row) x = s * x;
    }
    return out;
  }
  CycMatrix galois(const GaloisChar& s) const {
    CycMatrix out = *this;
    for (auto& row : out.e) {
      for (auto& x : row) x = galois_apply(s, x.lifted(s.conductor));
    }
    out.conductor = s.conductor;
    return out;
  }
  RatMatrix trace_entrywise() const {
    RatMatrix out(rows, cols);
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) out.e[i][j] = trace_to_Q(e[i][j]);
    }
    return out;
  }
};

// solve X*A = B over Q(zeta); A full row rank required
inline CycMatrix solve_left_cyc(const CycMatrix& A, const CycMatrix& B) {
  long m = A.rows, n = A.cols, k = B.rows;
  long cond = lcm_l(A.conductor, B.conductor);
  if (B.cols != n) throw std::invalid_argument("solve_left_cyc: shape mismatch");
  std::vector<std::vector<CycNum>> M(n, std::vector<CycNum>(m + k));
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) M[i][j] = A.e[j][i].lifted(cond);
    for (long j = 0; j < k; ++j) M[i][m + j] = B.e[j][i].lifted(cond);
  }
  long r = 0;
  std::vector<long> pivots;
  for (long c = 0; c < m && r < n; ++c) {
    long piv = -1;
    for (long i = r; i < n; ++i) {
      if (!M[i][c].is_zero()) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    CycNum inv = M[r][c].inverse();
    for (long j = 0; j < m + k; ++j) M[r][j] = inv * M[r][j];
    for (long i = 0; i < n; ++i) {
      if (i != r && !M[i][c].is_zero()) {
        CycNum f = M[i][c];
        for (long j = 0; j < m + k; ++j) M[i][j] = M[i][j] - f * M[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  if ((long)pivots.size() < m) throw std::domain_error("solve_left_cyc: rank-deficient A");
  for (long i = r; i < n; ++i) {
    for (long j = 0; j < k; ++j) {
      if (!M[i][m + j].is_zero())
        throw std::domain_error("solve_left_cyc: inconsistent system");
    }
  }
  CycMatrix X(k, m, cond);
  for (long i = 0; i < (long)pivots.size(); ++i) {
    for (long j = 0; j < k; ++j) X.e[j][pivots[i]] = M[i][m + j];
  }
  return X;
}

// basis of the saturation of the row lattice of A inside Z^cols
inline IntMatrix saturate_rows(const IntMatrix& A) {
  SnfResult s = snf(A);
  long r = (long)s.divisors.size();
  // U*A*V = D; saturation basis = diag(1/b_i) * (U*A) restricted to first r rows
  IntMatrix UA = s.U * A;
  IntMatrix out(r, A.cols);
  for (long i = 0; i < r; ++i) {
    for (long j = 0; j < A.cols; ++j) {
      // rows of U*A are divisible by b_i after the V-change; but UA itself need not be.
      // use (U*A*V) = D => U*A = D*V^{-1}; row i of U*A = b_i * (row i of V^{-1})
      // hence divisibility holds entrywise.
      Int q, rm;
      mpz_fdiv_qr(q.get_mpz_t(), rm.get_mpz_t(), UA.e[i][j].get_mpz_t(),
                  s.divisors[i].get_mpz_t());
      if (rm != 0) throw std::logic_error("saturate_rows: divisibility failure");
      out.e[i][j] = q;
    }
  }
  return hnf(out).H;
}

}  // namespace cuspact
