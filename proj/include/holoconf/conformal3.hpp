#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "holoconf/curvature.hpp"
#include "holoconf/expr.hpp"
#include "holoconf/linalg.hpp"
#include "holoconf/metric.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

/// Residual of the dimension-3 identity  * R *  =  -h + (tr h) I,
/// where R acts on 2-forms, * is the 3-dimensional Hodge isomorphism between
/// 1-forms and 2-forms, and h is the normalized Ricci tensor. The star
/// appears twice, so the frame-orientation sign cancels and the residual is
/// orientation independent.
inline double star_r_residual(const CurvatureContext& c, unsigned frame_seed = 0x5eedu) {
  if (c.n != 3) throw precondition_error("star_r_residual needs a 3-dimensional context");
  const CMat F = orthonormal_frame(c.g, frame_seed);
  // 2-form basis e0^e1, e0^e2, e1^e2 in the orthonormal frame
  const int pr[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  CMat M3(3, 3);
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) {
      cplx s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
              s += c.Rop(i, j, k, l) * F(i, pr[A][0]) * F(j, pr[A][1]) * F(k, pr[B][0]) *
                   F(l, pr[B][1]);
      M3(A, B) = s;
    }
  // *e_0 = e1^e2, *e_1 = -(e0^e2), *e_2 = e0^e1 (up to the overall frame
  // sign, which cancels in the double conjugation)
  const int map[3] = {2, 1, 0};
  const double sgn[3] = {1.0, -1.0, 1.0};
  CMat hf(3, 3);
  cplx trh = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      cplx s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += c.hten(i, j) * F(i, a) * F(j, b);
      hf(a, b) = s;
      if (a == b) trh += s;
    }
  double resid = 0.0, scale = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cplx lhs = sgn[a] * sgn[b] * M3(map[a], map[b]);
      const cplx rhs = -hf(a, b) + (a == b ? trh : cplx(0.0));
      resid = std::max(resid, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
  return resid / std::max(1.0, scale);
}

/// Two-path samples of the frame-component formulas for the duality halves
/// of the Weyl tensor: the projection value against the displayed
/// quarter-combinations of plain curvature terms. (X, Y, Z, nu) must be
/// g-orthonormal and positively oriented.
struct WSplitSample {
  cplx lhs_plus, rhs_plus, lhs_minus, rhs_minus;
};

inline WSplitSample w_component_formulas(const CurvatureContext& c, const CVec& X, const CVec& Y,
                                         const CVec& Z, const CVec& nu) {
  if (c.n != 4) throw precondition_error("w_component_formulas needs a 4-dimensional context");
  // frame must be orthonormal for the displayed combinations to be valid
  const CVec* v[4] = {&X, &Y, &Z, &nu};
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const cplx want = a == b ? cplx(1.0) : cplx(0.0);
      if (std::abs(c.dot(*v[a], *v[b]) - want) > 1e-8)
        throw precondition_error("w_component_formulas: frame is not orthonormal");
    }
  WSplitSample s;
  s.lhs_plus = c.weyl_plus(X, Y, Z, X);
  s.lhs_minus = c.weyl_minus(X, Y, Z, X);
  const cplx common = c.riemann(X, Y, Z, X) + c.riemann(Z, nu, Y, nu);
  const cplx odd = c.riemann(X, Y, Y, nu) + c.riemann(Z, nu, Z, X);
  s.rhs_plus = 0.25 * (common + odd);
  s.rhs_minus = 0.25 * (common - odd);
  return s;
}

/// The duality halves of the Cotton tensor of a 4-dimensional context:
/// projection of the 2-form slots onto the (anti-)self-dual subbundle.
inline Ten cotton_split(const CurvatureContext& c, int sign) {
  if (c.n != 4) throw precondition_error("cotton_split needs a 4-dimensional context");
  // star on the first index pair: (*C)(i,j,k) = 1/2 vol_ij^{ab} C(a,b,k)
  Ten out(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        cplx star = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            cplx volup = 0.0;
            for (int cc = 0; cc < 4; ++cc)
              for (int d = 0; d < 4; ++d) volup += c.vol(i, j, cc, d) * c.ginv(cc, a) * c.ginv(d, b);
            star += 0.5 * volup * c.cotton(a, b, k);
          }
        out(i, j, k) = 0.5 * (c.cotton(i, j, k) + double(sign) * star);
      }
  return out;
}

/// A holomorphic hypersurface in C^4: four component expressions in three
/// parameters (written z1, z2, z3).
struct Hypersurface {
  std::vector<HoloExpr> iota;

  explicit Hypersurface(std::vector<HoloExpr> components) : iota(std::move(components)) {
    if (iota.size() != 4) throw precondition_error("hypersurface needs 4 component expressions");
  }

  CVec point(const CVec& q) const {
    CVec p(4);
    for (int i = 0; i < 4; ++i) p[(std::size_t)i] = eval_value(iota[(std::size_t)i], q);
    return p;
  }
};

/// Geometry of a hypersurface at one parameter point: unit normal, second
/// fundamental form, umbilic/totally-geodesic classification, induced
/// 3-dimensional curvature, and an adapted oriented orthonormal frame.
struct HyperContext {
  CVec q, p;
  CMat E;                 // 4x3 tangent map
  CurvatureContext amb;   // ambient curvature (order-3 jets)
  CVec nu;                // unit normal, principal-branch normalization
  CMat g3;                // induced metric at the point (parameter basis)
  CMat II;                // second fundamental form (parameter basis)
  cplx umbilic_lambda = 0.0;
  double umbilic_residual = 0.0;           // || II - lambda g3 || / scale
  double totally_geodesic_residual = 0.0;  // || II || / scale
  CurvatureContext induced;                // intrinsic curvature of the induced metric
  CMat F3;                                 // induced-orthonormal frame, parameter basis
  CVec X, Y, Z;                            // ambient adapted frame, g-orthonormal with nu

  HyperContext(const MetricField& f, const Hypersurface& Q, const CVec& qq,
               double orientation = 1.0, unsigned frame_seed = 0x5eedu)
      : q(qq),
        p(Q.point(qq)),
        E(4, 3),
        amb(f.jets(Q.point(qq), 3), orientation, frame_seed),
        g3(3, 3),
        II(3, 3),
        induced(make_induced(f, Q, qq), orientation, frame_seed) {
    // tangent map and second parameter derivatives
    cplx d2i[4][3][3];
    for (int i = 0; i < 4; ++i) {
      Jet J = eval_jet(Q.iota[(std::size_t)i], qq, 2);
      for (int a = 0; a < 3; ++a) {
        E(i, a) = J.d1(a);
        for (int b = 0; b < 3; ++b) d2i[i][a][b] = J.d2(a, b);
      }
    }

    // induced metric and its nondegeneracy
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        cplx s = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) s += amb.g(i, j) * E(i, a) * E(j, b);
        g3(a, b) = s;
      }
    MetricField::check_nondegenerate(g3);

    // normal: metric-dual of the generalized cross product of the tangents,
    // normalized on the principal branch
    CVec omega(4, cplx(0.0));
    for (int jj = 0; jj < 4; ++jj)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          for (int m = 0; m < 4; ++m) {
            const double e = detail::eps4(jj, k, l, m);
            if (e != 0.0) omega[(std::size_t)jj] += e * E(k, 0) * E(l, 1) * E(m, 2);
          }
    nu = CVec(4, cplx(0.0));
    for (int i = 0; i < 4; ++i)
      for (int jj = 0; jj < 4; ++jj) nu[(std::size_t)i] += amb.ginv(i, jj) * omega[(std::size_t)jj];
    const cplx nn = amb.dot(nu, nu);
    double nscale = 0.0;
    for (const cplx& z : nu) nscale = std::max(nscale, std::abs(z));
    if (std::abs(nn) < 1e-10 * std::max(1.0, nscale * nscale))
      throw precondition_error("hypersurface tangent to the isotropy cone: no unit normal");
    const cplx inv = 1.0 / std::sqrt(nn);
    for (auto& z : nu) z *= inv;

    // second fundamental form II(a,b) = g(nabla_{E_a} E_b, nu)
    double iiscale = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        CVec w(4, cplx(0.0));
        for (int k = 0; k < 4; ++k) {
          cplx acc = d2i[k][a][b];
          for (int i = 0; i < 4; ++i)
            for (int jj = 0; jj < 4; ++jj) acc += amb.Gamma(k, i, jj) * E(i, a) * E(jj, b);
          w[(std::size_t)k] = acc;
        }
        II(a, b) = amb.dot(w, nu);
        iiscale = std::max(iiscale, std::abs(g3(a, b)));
      }
    iiscale = std::max(1.0, iiscale);
    // umbilic factor: least-squares fit of II = lambda g3
    cplx num = 0.0, den = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        num += II(a, b) * g3(a, b);
        den += g3(a, b) * g3(a, b);
      }
    umbilic_lambda = num / den;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        umbilic_residual = std::max(umbilic_residual,
                                    std::abs(II(a, b) - umbilic_lambda * g3(a, b)) / iiscale);
        totally_geodesic_residual =
            std::max(totally_geodesic_residual, std::abs(II(a, b)) / iiscale);
      }

    // adapted frame: orthonormal for the induced metric, pushed into the
    // ambient and reordered so that (X, Y, Z, nu) is positively oriented
    F3 = orthonormal_frame(g3, frame_seed);
    auto push = [&](int col) {
      CVec w(4, cplx(0.0));
      for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 3; ++a) w[(std::size_t)i] += E(i, a) * F3(a, col);
      return w;
    };
    X = push(0);
    Y = push(1);
    Z = push(2);
    cplx o = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int jj = 0; jj < 4; ++jj)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            o += amb.vol(i, jj, k, l) * X[(std::size_t)i] * Y[(std::size_t)jj] *
                 Z[(std::size_t)k] * nu[(std::size_t)l];
    if (std::abs(std::abs(o) - 1.0) > 1e-6)
      throw numeric_abort("adapted frame volume did not resolve to +/-1");
    if (o.real() < 0.0) {
      std::swap(X, Y);
      for (int a = 0; a < 3; ++a) std::swap(F3(a, 0), F3(a, 1));
    }
  }

  bool is_umbilic(double tol = 1e-8) const { return umbilic_residual < tol; }
  bool is_totally_geodesic(double tol = 1e-8) const { return totally_geodesic_residual < tol; }

  /// Frame coordinates (induced, parameter basis) of the adapted frame.
  CVec frame_column(int col) const {
    CVec w(3);
    for (int a = 0; a < 3; ++a) w[(std::size_t)a] = F3(a, col);
    return w;
  }

 private:
  static MetricJets make_induced(const MetricField& f, const Hypersurface& Q, const CVec& qq) {
    std::vector<Jet> sig;
    sig.reserve(4);
    for (const HoloExpr& e : Q.iota) sig.push_back(eval_jet(e, qq, 4));
    return f.induced_jets(sig, 3);
  }
};

/// Normal-derivative identity of the self-dual Weyl tensor against the
/// intrinsic Cotton tensor of a totally geodesic hypersurface:
///   < nabla_nu W+ (X,Y) Z, X > = - C^Q(X,Y)(Y).
struct Theorem8Result {
  cplx lhs = 0.0, rhs = 0.0;
  double residual = 0.0;
};

inline Theorem8Result theorem8_identity(const HyperContext& hc, double selfdual_tol = 1e-7,
                                        double tg_tol = 1e-8) {
  const double wminus = hc.amb.weyl_minus_norm();
  const double rscale = std::max(1.0, hc.amb.M6.frobenius());
  if (wminus > selfdual_tol * rscale)
    throw precondition_error("ambient is not self-dual: anti-self-dual Weyl norm " +
                             std::to_string(wminus));
  if (hc.totally_geodesic_residual > tg_tol)
    throw precondition_error("hypersurface is not totally geodesic: residual " +
                             std::to_string(hc.totally_geodesic_residual));
  Theorem8Result r;
  // lhs = sum_m nu^m (nabla_m W+)(X, Y, X, Z) in the operator pairing
  for (int m = 0; m < 4; ++m) {
    cplx acc = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            acc += hc.amb.nablaWplus(m, i, j, k, l) * hc.X[(std::size_t)i] * hc.Y[(std::size_t)j] *
                   hc.X[(std::size_t)k] * hc.Z[(std::size_t)l];
    r.lhs += hc.nu[(std::size_t)m] * acc;
  }
  const CVec x = hc.frame_column(0), y = hc.frame_column(1);
  cplx cq = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        cq += hc.induced.cotton(i, j, k) * x[(std::size_t)i] * y[(std::size_t)j] *
              y[(std::size_t)k];
  r.rhs = -cq;
  r.residual = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.rhs));
  return r;
}

/// Residual of the identification of the self-dual Cotton half of the
/// ambient with the intrinsic Cotton tensor of an umbilic hypersurface:
/// C+(X,Y)(Z) = C^Q(X,Y)(Z) over the adapted tangent frame.
inline double corollary_cotton_residual(const HyperContext& hc, double selfdual_tol = 1e-7,
                                        double umbilic_tol = 1e-8) {
  const double wminus = hc.amb.weyl_minus_norm();
  const double rscale = std::max(1.0, hc.amb.M6.frobenius());
  if (wminus > selfdual_tol * rscale)
    throw precondition_error("ambient is not self-dual: anti-self-dual Weyl norm " +
                             std::to_string(wminus));
  if (hc.umbilic_residual > umbilic_tol)
    throw precondition_error("hypersurface is not umbilic: residual " +
                             std::to_string(hc.umbilic_residual));
  const Ten cp = cotton_split(hc.amb, +1);
  const CVec* amb[3] = {&hc.X, &hc.Y, &hc.Z};
  const CVec par[3] = {hc.frame_column(0), hc.frame_column(1), hc.frame_column(2)};
  double resid = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cidx = 0; cidx < 3; ++cidx) {
        cplx lhs = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
              lhs += cp(i, j, k) * (*amb[a])[(std::size_t)i] * (*amb[b])[(std::size_t)j] *
                     (*amb[cidx])[(std::size_t)k];
        cplx rhs = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
              rhs += hc.induced.cotton(i, j, k) * par[a][(std::size_t)i] * par[b][(std::size_t)j] *
                     par[cidx][(std::size_t)k];
        resid = std::max(resid, std::abs(lhs - rhs));
      }
  return resid;
}

}  // namespace holoconf
