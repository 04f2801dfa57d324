#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "holoconf/expr.hpp"
#include "holoconf/jet.hpp"
#include "holoconf/linalg.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

/// Partial derivative of a jet in direction `dir`; drops the order by one.
inline Jet jet_partial(const Jet& u, int dir) {
  const int n = u.dim(), ord = u.order() - 1;
  if (ord < 0) throw precondition_error("jet_partial on order-0 jet");
  Jet r(n, ord);
  std::array<int, 4> src{dir, 0, 0, 0};
  r.value = u.at(1, src);
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int k = 1; k <= ord; ++k) {
    Jet::iterate(n, k, idx, [&](const std::array<int, 4>& ix) {
      std::array<int, 4> s{dir, 0, 0, 0};
      for (int p = 0; p < k; ++p) s[static_cast<std::size_t>(p + 1)] = ix[static_cast<std::size_t>(p)];
      r.ref(k, ix) = u.at(k + 1, s);
    });
  }
  return r;
}

/// Copy of a jet truncated to a lower order.
inline Jet jet_truncate(const Jet& u, int order) {
  if (order >= u.order()) return u;
  Jet r(u.dim(), order);
  r.value = u.value;
  std::array<int, 4> idx{0, 0, 0, 0};
  for (int k = 1; k <= order; ++k)
    Jet::iterate(u.dim(), k, idx, [&](const std::array<int, 4>& ix) { r.ref(k, ix) = u.at(k, ix); });
  return r;
}

/// Visit every multi-index alpha in N^n with |alpha| <= maxorder.
template <typename F>
inline void for_each_multiindex(int n, int maxorder, F&& fn) {
  std::array<int, 4> alpha{0, 0, 0, 0};
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      for (int a = 0; a <= remaining; ++a) {
        alpha[static_cast<std::size_t>(pos)] = a;
        fn(alpha);
      }
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      alpha[static_cast<std::size_t>(pos)] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  rec(rec, 0, maxorder);
}

/// Taylor composition: `f` is a jet (in z, at z0 = map[i].value) of a scalar
/// quantity; `map` gives each ambient coordinate z_i as a jet in the
/// parameters. Returns the jet of the pullback in the parameters. Exact as
/// long as f.order() >= the requested output order.
inline Jet compose_multivariate(const Jet& f, const std::vector<Jet>& map) {
  const int nz = f.dim();
  if (static_cast<int>(map.size()) != nz) throw precondition_error("compose_multivariate dimension mismatch");
  const int ns = map[0].dim();
  const int ord = std::min(f.order(), map[0].order());
  // Increment jets of the map around the base point.
  std::vector<Jet> w;
  w.reserve(map.size());
  for (const Jet& m : map) {
    Jet inc = m;
    inc.value = 0.0;
    w.push_back(inc);
  }
  Jet r = Jet::constant(0.0, ns, ord);
  for_each_multiindex(nz, f.order(), [&](const std::array<int, 4>& alpha) {
    int total = 0;
    double afact = 1.0;
    std::array<int, 4> tuple{0, 0, 0, 0};
    int pos = 0;
    for (int d = 0; d < nz; ++d) {
      for (int a = 1; a <= alpha[static_cast<std::size_t>(d)]; ++a) {
        afact *= a;
        if (pos < 4) tuple[static_cast<std::size_t>(pos)] = d;
        ++pos;
      }
      total += alpha[static_cast<std::size_t>(d)];
    }
    if (total > f.order()) return;
    cplx deriv = f.at(total, tuple);
    if (deriv == cplx(0.0)) return;
    Jet term = Jet::constant(deriv / afact, ns, ord);
    for (int d = 0; d < nz; ++d)
      for (int a = 0; a < alpha[static_cast<std::size_t>(d)]; ++a) term = term * w[static_cast<std::size_t>(d)];
    r += term;
  });
  return r;
}

/// Metric derivatives at a point: g, dg, d2g, d3g with the derivative
/// indices leading, i.e. g1(k,i,j) = d_k g_ij, g2(k,l,i,j) = d_k d_l g_ij.
struct MetricJets {
  int n = 0;
  int order = 0;
  Ten g0, g1, g2, g3;

  MetricJets() = default;
  MetricJets(int dim, int ord) : n(dim), order(ord), g0(dim, 2), g1(dim, 3), g2(dim, 4), g3(dim, 5) {}

  /// Populate from per-component jets (comp(i,j) must return the jet of
  /// g_ij, symmetric in i,j).
  template <typename CompFn>
  static MetricJets from_component_jets(int n, int order, CompFn&& comp) {
    MetricJets m(n, order);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const Jet u = comp(i, j);
        m.g0(i, j) = m.g0(j, i) = u.value;
        if (order >= 1)
          for (int k = 0; k < n; ++k) m.g1(k, i, j) = m.g1(k, j, i) = u.d1(k);
        if (order >= 2)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) m.g2(k, l, i, j) = m.g2(k, l, j, i) = u.d2(k, l);
        if (order >= 3)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              for (int q = 0; q < n; ++q) m.g3(k, l, q, i, j) = m.g3(k, l, q, j, i) = u.d3(k, l, q);
      }
    return m;
  }

  CMat matrix() const {
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = g0(i, j);
    return g;
  }
};

/// Holomorphic metric field: upper-triangle component expressions in the
/// coordinates z1..zn, with an optional conformal factor f so that the
/// effective metric is exp(2 f) g.
class MetricField {
 public:
  MetricField() = default;
  MetricField(int n, std::vector<HoloExpr> upper) : n_(n), comps_(std::move(upper)) {
    if (static_cast<int>(comps_.size()) != n_ * (n_ + 1) / 2)
      throw precondition_error("metric needs n(n+1)/2 upper-triangle components");
  }

  int dim() const { return n_; }

  const HoloExpr& component(int i, int j) const {
    if (i > j) std::swap(i, j);
    return comps_[static_cast<std::size_t>(upper_index(i, j))];
  }

  bool has_conformal_factor() const { return factor_.root != nullptr; }
  const HoloExpr& conformal_factor() const { return factor_; }
  void set_conformal_factor(HoloExpr f) { factor_ = std::move(f); }

  /// Multiply the metric by exp(2 f): factors add.
  MetricField conformal_rescale(const HoloExpr& f) const {
    MetricField r = *this;
    if (r.factor_.root)
      r.factor_ = HoloExpr{ast::add(r.factor_.root, f.root), n_};
    else
      r.factor_ = f;
    return r;
  }

  /// Metric derivative data at p, checked for nondegeneracy.
  MetricJets jets(const CVec& p, int order = 3) const {
    Jet factor;
    if (factor_.root) factor = jet_exp(2.0 * eval_jet(factor_, p, order));
    MetricJets m = MetricJets::from_component_jets(n_, order, [&](int i, int j) {
      Jet u = eval_jet(component(i, j), p, order);
      if (factor_.root) u = u * factor;
      return u;
    });
    check_nondegenerate(m.matrix());
    return m;
  }

  CMat matrix_at(const CVec& p) const {
    MetricJets m = jets(p, 0);
    return m.matrix();
  }

  /// Bilinear (no conjugation) inner product at p.
  cplx dot(const CVec& p, const CVec& u, const CVec& v) const {
    const CMat g = matrix_at(p);
    cplx s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += g(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return s;
  }

  /// Induced metric on a parameterized piece: sigma gives each ambient
  /// coordinate as a jet in the parameters (order >= order+1 so the tangent
  /// map is known through the requested depth).
  MetricJets induced_jets(const std::vector<Jet>& sigma, int order) const {
    const int ns = sigma[0].dim();
    CVec z0;
    for (const Jet& s : sigma) z0.push_back(s.value);
    std::vector<Jet> dsig;  // d_a sigma^i, a-major
    for (int a = 0; a < ns; ++a)
      for (int i = 0; i < n_; ++i)
        dsig.push_back(jet_truncate(jet_partial(sigma[static_cast<std::size_t>(i)], a), order));
    Jet factor;
    if (factor_.root) {
      Jet fz = eval_jet(factor_, z0, order + 1);
      factor = jet_truncate(jet_exp(2.0 * compose_multivariate(fz, sigma)), order);
    }
    return MetricJets::from_component_jets(ns, order, [&](int a, int b) {
      Jet acc = Jet::constant(0.0, ns, order);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          Jet gz = eval_jet(component(i, j), z0, order + 1);
          Jet g_ab = jet_truncate(compose_multivariate(gz, sigma), order);
          acc += g_ab * dsig[static_cast<std::size_t>(a * n_ + i)] * dsig[static_cast<std::size_t>(b * n_ + j)];
        }
      if (factor_.root) acc = acc * factor;
      return acc;
    });
  }

  static void check_nondegenerate(const CMat& g) {
    double scale = 0.0;
    for (const cplx& c : g.a) scale = std::max(scale, std::abs(c));
    scale = std::max(scale, 1.0);
    double bound = 1e-12;
    for (int i = 0; i < g.rows; ++i) bound *= scale;
    if (std::abs(det(g)) <= bound) throw singular_metric_error("metric degenerate at evaluation point");
  }

 private:
  int upper_index(int i, int j) const {
    // row-major over the upper triangle
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }

  int n_ = 0;
  std::vector<HoloExpr> comps_;
  HoloExpr factor_;
};

}  // namespace holoconf
