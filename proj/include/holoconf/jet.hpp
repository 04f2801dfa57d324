#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <vector>

#include "holoconf/types.hpp"

namespace holoconf {

/// Truncated multivariate Taylor expansion of a holomorphic function at a
/// point: value plus full (symmetric) derivative tensors up to `order`.
/// Order 3 carries everything the curvature pipeline needs (up to third
/// derivatives of the metric); order 4 exists for the surface machinery,
/// which differentiates induced quantities once more.
///
/// Arithmetic is the usual jet algebra: Leibniz products and univariate
/// composition, all exact to roundoff. Dimension n <= 4 in practice, so full
/// (unpacked) symmetric storage is cheap.
class Jet {
 public:
  Jet() : n_(0), order_(0), value(0.0) {}
  Jet(int n, int order) : n_(n), order_(order), value(0.0) {
    assert(n >= 1 && order >= 0 && order <= 4);
    std::size_t sz = 1;
    for (int k = 1; k <= order; ++k) {
      sz *= static_cast<std::size_t>(n);
      d_[k - 1].assign(sz, cplx(0.0));
    }
  }

  static Jet constant(cplx c, int n, int order) {
    Jet j(n, order);
    j.value = c;
    return j;
  }

  static Jet variable(int i, cplx v, int n, int order) {
    assert(i >= 0 && i < n);
    Jet j(n, order);
    j.value = v;
    if (order >= 1) j.d_[0][static_cast<std::size_t>(i)] = 1.0;
    return j;
  }

  int dim() const { return n_; }
  int order() const { return order_; }

  cplx value;

  cplx d1(int i) const { return at(1, {i, 0, 0, 0}); }
  cplx d2(int i, int j) const { return at(2, {i, j, 0, 0}); }
  cplx d3(int i, int j, int k) const { return at(3, {i, j, k, 0}); }
  cplx d4(int i, int j, int k, int l) const { return at(4, {i, j, k, l}); }

  cplx at(int k, std::array<int, 4> idx) const {
    if (k == 0) return value;
    if (k > order_) return 0.0;
    return d_[k - 1][flat(k, idx)];
  }
  cplx& ref(int k, std::array<int, 4> idx) {
    assert(k >= 1 && k <= order_);
    return d_[k - 1][flat(k, idx)];
  }

  Jet operator-() const {
    Jet r = *this;
    r.value = -r.value;
    for (auto& lvl : r.d_)
      for (auto& c : lvl) c = -c;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    value += o.value;
    for (int k = 1; k <= order_; ++k)
      for (std::size_t s = 0; s < d_[k - 1].size(); ++s)
        d_[k - 1][s] += o.d_[k - 1][s];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    value -= o.value;
    for (int k = 1; k <= order_; ++k)
      for (std::size_t s = 0; s < d_[k - 1].size(); ++s)
        d_[k - 1][s] -= o.d_[k - 1][s];
    return *this;
  }
  Jet& operator*=(cplx c) {
    value *= c;
    for (auto& lvl : d_)
      for (auto& x : lvl) x *= c;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cplx c) { return a *= c; }
  friend Jet operator*(cplx c, Jet a) { return a *= c; }
  friend Jet operator+(Jet a, cplx c) {
    a.value += c;
    return a;
  }
  friend Jet operator+(cplx c, Jet a) {
    a.value += c;
    return a;
  }
  friend Jet operator-(Jet a, cplx c) {
    a.value -= c;
    return a;
  }

  /// Leibniz product, truncated at the jet order.
  friend Jet operator*(const Jet& f, const Jet& g) {
    assert(f.n_ == g.n_ && f.order_ == g.order_);
    const int n = f.n_, ord = f.order_;
    Jet r(n, ord);
    r.value = f.value * g.value;
    // Each derivative entry is a sum over subsets of its index positions:
    // (fg)_S = sum_{A subset S} f_A g_{S\A}.
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int k = 1; k <= ord; ++k) {
      iterate(n, k, idx, [&](const std::array<int, 4>& ix) {
        cplx acc = 0.0;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
          std::array<int, 4> ia{0, 0, 0, 0}, ib{0, 0, 0, 0};
          int ka = 0, kb = 0;
          for (int p = 0; p < k; ++p) {
            if (mask & (1u << p))
              ia[ka++] = ix[p];
            else
              ib[kb++] = ix[p];
          }
          acc += f.at(ka, ia) * g.at(kb, ib);
        }
        Jet& rr = r;
        rr.ref(k, ix) = acc;
      });
    }
    return r;
  }

  friend Jet operator/(const Jet& f, const Jet& g) {
    if (g.value == cplx(0.0)) throw eval_error("division by zero");
    return f * g.reciprocal();
  }

  /// Composition with a univariate function given by its derivatives
  /// fs[0..order] at this jet's value.
  Jet compose(const std::vector<cplx>& fs) const {
    Jet w = *this;
    w.value = 0.0;  // increment jet
    double fact = 1.0;
    for (int m = 1; m <= order_; ++m) fact *= m;
    Jet r = Jet::constant(fs[static_cast<std::size_t>(order_)] / fact, n_, order_);
    for (int m = order_ - 1; m >= 0; --m) {
      fact = 1.0;
      for (int q = 1; q <= m; ++q) fact *= q;
      r = r * w + fs[static_cast<std::size_t>(m)] / fact;
    }
    return r;
  }

  Jet reciprocal() const {
    if (value == cplx(0.0)) throw eval_error("division by zero");
    std::vector<cplx> fs(static_cast<std::size_t>(order_) + 1);
    cplx p = 1.0 / value;
    double sgn = 1.0, fact = 1.0;
    for (int k = 0; k <= order_; ++k) {
      if (k > 0) {
        fact *= k;
        sgn = -sgn;
        p /= value;
      }
      fs[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 / value : sgn * fact * p);
    }
    return compose(fs);
  }

  template <typename F>
  static void iterate(int n, int k, std::array<int, 4>& idx, F&& f) {
    iterate_rec(n, k, 0, idx, f);
  }

 private:
  template <typename F>
  static void iterate_rec(int n, int k, int pos, std::array<int, 4>& idx, F&& f) {
    if (pos == k) {
      f(idx);
      return;
    }
    for (int i = 0; i < n; ++i) {
      idx[static_cast<std::size_t>(pos)] = i;
      iterate_rec(n, k, pos + 1, idx, f);
    }
  }

  std::size_t flat(int k, const std::array<int, 4>& idx) const {
    std::size_t s = 0;
    for (int p = 0; p < k; ++p)
      s = s * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(p)]);
    return s;
  }

  int n_;
  int order_;
  std::array<std::vector<cplx>, 4> d_;
};

inline Jet jet_exp(const Jet& u) {
  std::vector<cplx> fs(static_cast<std::size_t>(u.order()) + 1, std::exp(u.value));
  return u.compose(fs);
}

inline Jet jet_log(const Jet& u) {
  if (u.value == cplx(0.0)) throw eval_error("log evaluated at 0");
  std::vector<cplx> fs(static_cast<std::size_t>(u.order()) + 1);
  fs[0] = std::log(u.value);  // principal branch
  cplx p = 1.0 / u.value;
  double sgn = 1.0, fact = 1.0;
  for (int k = 1; k <= u.order(); ++k) {
    fs[static_cast<std::size_t>(k)] = sgn * fact * p;
    fact *= k;
    sgn = -sgn;
    p /= u.value;
  }
  return u.compose(fs);
}

inline Jet jet_sqrt(const Jet& u) {
  if (u.value == cplx(0.0)) throw eval_error("sqrt evaluated at branch point 0");
  std::vector<cplx> fs(static_cast<std::size_t>(u.order()) + 1);
  cplx r = std::sqrt(u.value);  // principal branch
  cplx coeff = 1.0;
  double e = 0.5;
  fs[0] = r;
  cplx p = r / u.value;  // u^{-1/2}
  for (int k = 1; k <= u.order(); ++k) {
    coeff *= e - (k - 1);
    fs[static_cast<std::size_t>(k)] = coeff * p;
    p /= u.value;
  }
  return u.compose(fs);
}

inline Jet jet_sin(const Jet& u) {
  std::vector<cplx> fs(static_cast<std::size_t>(u.order()) + 1);
  const cplx s = std::sin(u.value), c = std::cos(u.value);
  const cplx cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= u.order(); ++k) fs[static_cast<std::size_t>(k)] = cyc[k % 4];
  return u.compose(fs);
}

inline Jet jet_cos(const Jet& u) {
  std::vector<cplx> fs(static_cast<std::size_t>(u.order()) + 1);
  const cplx s = std::sin(u.value), c = std::cos(u.value);
  const cplx cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= u.order(); ++k) fs[static_cast<std::size_t>(k)] = cyc[k % 4];
  return u.compose(fs);
}

/// Integer power; negative exponents go through the reciprocal.
inline Jet jet_powi(const Jet& u, int e) {
  if (e < 0) return jet_powi(u, -e).reciprocal();
  Jet r = Jet::constant(1.0, u.dim(), u.order());
  Jet base = u;
  int m = e;
  while (m > 0) {
    if (m & 1) r = r * base;
    base = base * base;
    m >>= 1;
  }
  return r;
}

}  // namespace holoconf
