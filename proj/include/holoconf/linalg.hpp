#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "holoconf/types.hpp"

namespace holoconf {

/// Dense complex matrix, row-major, small (n <= 8).
struct CMat {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c), cplx(0.0)) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }

  CMat operator*(const CMat& o) const {
    CMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        const cplx v = (*this)(i, k);
        if (v == cplx(0.0)) continue;
        for (int j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }
  CMat operator+(const CMat& o) const {
    CMat r = *this;
    for (std::size_t s = 0; s < a.size(); ++s) r.a[s] += o.a[s];
    return r;
  }
  CMat operator-(const CMat& o) const {
    CMat r = *this;
    for (std::size_t s = 0; s < a.size(); ++s) r.a[s] -= o.a[s];
    return r;
  }
  CMat operator*(cplx c) const {
    CMat r = *this;
    for (auto& x : r.a) x *= c;
    return r;
  }
  CVec operator*(const CVec& v) const {
    CVec r(static_cast<std::size_t>(rows), cplx(0.0));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r[static_cast<std::size_t>(i)] += (*this)(i, j) * v[static_cast<std::size_t>(j)];
    return r;
  }
  CMat transpose() const {
    CMat r(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  double frobenius() const {
    double s = 0.0;
    for (const cplx& c : a) s += std::norm(c);
    return std::sqrt(s);
  }
};

/// LU with partial pivoting; returns determinant, leaves factors in place.
/// Throws singular_metric_error when the pivot collapses.
inline cplx lu_factor(CMat& m, std::vector<int>& piv) {
  const int n = m.rows;
  piv.resize(static_cast<std::size_t>(n));
  cplx det = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        p = i;
      }
    piv[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      det = -det;
    }
    if (best == 0.0) throw singular_metric_error("singular matrix in LU factorization");
    det *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      m(i, k) /= m(k, k);
      for (int j = k + 1; j < n; ++j) m(i, j) -= m(i, k) * m(k, j);
    }
  }
  return det;
}

inline CVec lu_solve(const CMat& lu, const std::vector<int>& piv, CVec b) {
  const int n = lu.rows;
  // Full rows are swapped during factorization (multipliers included), so
  // all row interchanges apply to b before the triangular solves.
  for (int k = 0; k < n; ++k)
    std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv[static_cast<std::size_t>(k)])]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[static_cast<std::size_t>(i)] -= lu(i, k) * b[static_cast<std::size_t>(k)];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[static_cast<std::size_t>(i)] -= lu(i, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(i)] /= lu(i, i);
  }
  return b;
}

inline cplx det(CMat m) {
  std::vector<int> piv;
  try {
    return lu_factor(m, piv);
  } catch (const singular_metric_error&) {
    return 0.0;
  }
}

inline CMat inverse(const CMat& m) {
  CMat lu = m;
  std::vector<int> piv;
  lu_factor(lu, piv);
  const int n = m.rows;
  CMat inv(n, n);
  for (int c = 0; c < n; ++c) {
    CVec e(static_cast<std::size_t>(n), cplx(0.0));
    e[static_cast<std::size_t>(c)] = 1.0;
    CVec x = lu_solve(lu, piv, e);
    for (int r = 0; r < n; ++r) inv(r, c) = x[static_cast<std::size_t>(r)];
  }
  return inv;
}

/// Solve the (possibly overdetermined) system A x = b in the Euclidean
/// least-squares sense using the conjugate-transpose normal equations.
inline CVec lstsq(const CMat& A, const CVec& b) {
  const int m = A.rows, n = A.cols;
  CMat AtA(n, n);
  CVec Atb(static_cast<std::size_t>(n), cplx(0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k) AtA(i, j) += std::conj(A(k, i)) * A(k, j);
    for (int k = 0; k < m; ++k) Atb[static_cast<std::size_t>(i)] += std::conj(A(k, i)) * b[static_cast<std::size_t>(k)];
  }
  CMat lu = AtA;
  std::vector<int> piv;
  lu_factor(lu, piv);
  return lu_solve(lu, piv, Atb);
}

/// Euclidean residual of A x - b.
inline double lstsq_residual(const CMat& A, const CVec& x, const CVec& b) {
  double s = 0.0;
  for (int i = 0; i < A.rows; ++i) {
    cplx r = -b[static_cast<std::size_t>(i)];
    for (int j = 0; j < A.cols; ++j) r += A(i, j) * x[static_cast<std::size_t>(j)];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

/// g-orthonormal frame at a point, as columns of the returned matrix:
/// F^T g F = Id (complex bilinear, no conjugation).
///
/// Complex quadratic forms have isotropic vectors, so plain Gram-Schmidt can
/// hit |g(v,v)| ~ 0. Candidates are chosen by column pivoting on the residual
/// quadratic norm; if every candidate is near-isotropic the current vector is
/// sheared by a small deterministic pseudo-random combination and the step is
/// retried, failing after 8 attempts.
inline CMat orthonormal_frame(const CMat& g, unsigned seed = 0x5eedu) {
  const int n = g.rows;
  auto gdot = [&](const CVec& u, const CVec& v) {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return s;
  };

  std::vector<CVec> frame;
  std::vector<CVec> cand;
  for (int i = 0; i < n; ++i) {
    CVec e(static_cast<std::size_t>(n), cplx(0.0));
    e[static_cast<std::size_t>(i)] = 1.0;
    cand.push_back(e);
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (int k = 0; k < n; ++k) {
    CVec v;
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      // Column pivot: candidate with the largest residual quadratic norm.
      double best = -1.0;
      std::size_t bestIdx = 0;
      for (std::size_t c = 0; c < cand.size(); ++c) {
        CVec w = cand[c];
        for (const CVec& e : frame) {
          cplx pr = gdot(w, e);
          for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= pr * e[static_cast<std::size_t>(i)];
        }
        double q = std::abs(gdot(w, w)) / std::max(vec_norm(w) * vec_norm(w), 1e-300);
        if (q > best) {
          best = q;
          bestIdx = c;
          v = w;
        }
      }
      if (best > 1e-10) {
        cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(bestIdx));
        ok = true;
      } else {
        // Randomized shear: nudge every candidate off the isotropy cone.
        for (CVec& c : cand)
          for (int i = 0; i < n; ++i)
            c[static_cast<std::size_t>(i)] += cplx(0.25 * uni(rng), 0.25 * uni(rng));
      }
    }
    if (!ok) throw numeric_abort("isotropic pivot failure during frame construction");
    cplx q = gdot(v, v);
    cplx s = std::sqrt(q);  // principal branch
    for (auto& x : v) x /= s;
    frame.push_back(v);
  }

  CMat F(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) F(r, c) = frame[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  return F;
}

}  // namespace holoconf
