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

/// A holomorphic parameterized surface in C^4: four component expressions in
/// two parameters (written z1, z2 — the grammar has no separate parameter
/// names).
struct EmbeddedSurface {
  std::vector<HoloExpr> sigma;

  explicit EmbeddedSurface(std::vector<HoloExpr> components) : sigma(std::move(components)) {
    if (sigma.size() != 4) throw precondition_error("embedded surface needs 4 component expressions");
  }

  CVec point(const CVec& s) const {
    CVec p(4);
    for (int i = 0; i < 4; ++i) p[(std::size_t)i] = eval_value(sigma[(std::size_t)i], s);
    return p;
  }
};

/// Curvature data of a totally geodesic surface at one parameter point:
/// induced connection, the trace tensor K(Y)X = tr R(Y,.)X of the ambient
/// curvature restricted to the tangent plane, its covariant derivative, and
/// the Thomas tensor of the induced projective structure.
struct SurfaceContext {
  CVec param;            // parameter point (2 entries)
  CVec p;                // ambient point
  CMat E;                // 4x2 tangent map, E(i,a) = d_a sigma^i
  double tg_residual;    // worst totally-geodesic defect over coordinate pairs
  CurvatureContext amb;  // ambient curvature at p
  Ten Gammat;            // induced connection, (c,a,b) -> Gamma~^c_ab
  Ten K;                 // (a,b) = component form of K(Y)X, X = E_a, Y = E_b
  Ten dK;                // (c,a,b) = partial d_c K(a,b)
  Ten nablaK;            // (c,a,b) covariant derivative over the induced connection
  Ten thomas;            // (a,b,c) = T(X,Y,Z) with X = E_a, Y = E_b, Z = E_c

  SurfaceContext(const MetricField& f, const EmbeddedSurface& S, const CVec& s,
                 double orientation = 1.0, double tg_tol = 1e-6)
      : param(s),
        p(S.point(s)),
        E(4, 2),
        amb(f.jets(S.point(s), 3), orientation),
        Gammat(2, 3),
        K(2, 2),
        dK(2, 3),
        nablaK(2, 3),
        thomas(2, 3) {
    // parameter jets of the embedding
    cplx d2s[4][2][2];
    for (int i = 0; i < 4; ++i) {
      Jet J = eval_jet(S.sigma[(std::size_t)i], s, 2);
      for (int a = 0; a < 2; ++a) {
        E(i, a) = J.d1(a);
        for (int b = 0; b < 2; ++b) d2s[i][a][b] = J.d2(a, b);
      }
    }

    // rank-2 check on the differential via its largest 2x2 minor
    double best = 0.0;
    int r1 = 0, r2 = 1;
    double scale = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 2; ++a) scale = std::max(scale, std::abs(E(i, a)));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double d = std::abs(E(i, 0) * E(j, 1) - E(i, 1) * E(j, 0));
        if (d > best) {
          best = d;
          r1 = i;
          r2 = j;
        }
      }
    if (best < 1e-10 * std::max(1.0, scale * scale))
      throw precondition_error("surface differential is degenerate at the sample point");

    // ambient covariant derivatives of the coordinate fields:
    // A_ab = d_a d_b sigma + Gamma(d_a sigma, d_b sigma)
    std::vector<CVec> tangent = {column(0), column(1)};
    double worst = 0.0;
    std::array<std::array<CVec, 2>, 2> Aab;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        CVec w(4, cplx(0.0));
        for (int k = 0; k < 4; ++k) {
          cplx acc = d2s[k][a][b];
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) acc += amb.Gamma(k, i, j) * E(i, a) * E(j, b);
          w[(std::size_t)k] = acc;
        }
        Aab[(std::size_t)a][(std::size_t)b] = w;
        worst = std::max(worst,
                         residual_mod_span(w, tangent) / std::max(1.0, scale * scale));
      }
    tg_residual = worst;
    if (tg_residual > tg_tol)
      throw precondition_error("surface is not totally geodesic at the sample point");

    // induced connection: solve E * Gamma~_ab = A_ab (least squares; A_ab is
    // tangent up to the residual just checked)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        CVec coef = lstsq(E, Aab[(std::size_t)a][(std::size_t)b]);
        for (int c = 0; c < 2; ++c) Gammat(c, a, b) = coef[(std::size_t)c];
      }

    // pivot 2x2 subsystem used for holomorphic tangent-coefficient solves
    const cplx m00 = E(r1, 0), m01 = E(r1, 1), m10 = E(r2, 0), m11 = E(r2, 1);
    const cplx det = m00 * m11 - m01 * m10;
    auto solve2 = [&](cplx b0, cplx b1) {
      return std::array<cplx, 2>{(m11 * b0 - m01 * b1) / det, (m00 * b1 - m10 * b0) / det};
    };

    // K(a,b) = trace over the tangent plane of W -> R(E_b, W) E_a, together
    // with its parameter derivative by the chain rule
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        cplx kv = 0.0;
        std::array<cplx, 2> dkv = {0.0, 0.0};
        for (int c = 0; c < 2; ++c) {
          // v = R(E_b, E_c) E_a, sub-vector at the pivot rows
          cplx v[2] = {0.0, 0.0};
          cplx dv[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // dv[d][row]
          const int rows[2] = {r1, r2};
          // with the curvature sign convention of this library the traced
          // slot sits first: v = R(E_c, E_b) E_a (calibrated so that the
          // trace equals h on isotropic planes of conformally flat metrics)
          for (int rr = 0; rr < 2; ++rr) {
            const int l = rows[rr];
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                  const cplx Rl = amb.Riem(l, i, j, k);
                  v[rr] += Rl * E(i, c) * E(j, b) * E(k, a);
                  for (int d = 0; d < 2; ++d) {
                    cplx dR = 0.0;
                    for (int m = 0; m < 4; ++m) dR += amb.dRiem(m, l, i, j, k) * E(m, d);
                    dv[d][rr] += dR * E(i, c) * E(j, b) * E(k, a) +
                                 Rl * (d2s[i][d][c] * E(j, b) * E(k, a) +
                                       E(i, c) * d2s[j][d][b] * E(k, a) +
                                       E(i, c) * E(j, b) * d2s[k][d][a]);
                  }
                }
          }
          std::array<cplx, 2> lam = solve2(v[0], v[1]);
          kv += lam[(std::size_t)c];
          for (int d = 0; d < 2; ++d) {
            // d(lam) = M^{-1} (dv - dM * lam)
            const cplx dm00 = d2s[r1][d][0], dm01 = d2s[r1][d][1];
            const cplx dm10 = d2s[r2][d][0], dm11 = d2s[r2][d][1];
            const cplx rhs0 = dv[d][0] - (dm00 * lam[0] + dm01 * lam[1]);
            const cplx rhs1 = dv[d][1] - (dm10 * lam[0] + dm11 * lam[1]);
            std::array<cplx, 2> dlam = solve2(rhs0, rhs1);
            dkv[(std::size_t)d] += dlam[(std::size_t)c];
          }
        }
        K(a, b) = kv;
        for (int d = 0; d < 2; ++d) dK(d, a, b) = dkv[(std::size_t)d];
      }

    // covariant derivative over the induced connection (K is bilinear in its
    // two tangent slots)
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          cplx acc = dK(c, a, b);
          for (int d = 0; d < 2; ++d)
            acc -= Gammat(d, c, a) * K(d, b) + Gammat(d, c, b) * K(a, d);
          nablaK(c, a, b) = acc;
        }

    // Thomas tensor of the induced projective structure
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          thomas(a, b, c) = -2.0 * nablaK(c, a, b) + 2.0 * nablaK(b, a, c) - nablaK(c, b, a) +
                            nablaK(b, c, a);
  }

  CVec column(int a) const {
    CVec w(4);
    for (int i = 0; i < 4; ++i) w[(std::size_t)i] = E(i, a);
    return w;
  }

  /// h(X,Y) of the ambient metric restricted to the tangent plane.
  cplx ambient_h(int a, int b) const {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += amb.hten(i, j) * E(i, a) * E(j, b);
    return s;
  }

  /// Ambient Cotton tensor C(Y,Z)(X) restricted to the tangent plane, in the
  /// slot order of the Thomas tensor: (a,b,c) -> C(E_b, E_c)(E_a).
  cplx ambient_cotton(int a, int b, int c) const {
    return amb.cotton_eval(column(b), column(c), column(a));
  }

  double thomas_norm() const { return thomas.frobenius(); }
};

/// A point of a projective line in homogeneous pair coordinates [u : v].
struct ProjPoint {
  cplx u, v;
};

/// Cross-ratio (p1, p2 : p3, p4) of four distinct points of a projective
/// line. With d(a,b) = u_a v_b - v_a u_b this is
/// d(p3,p1) d(p2,p4) / (d(p3,p4) d(p2,p1)), normalized so that
/// (0, 1 : lambda, infinity) = lambda.
inline cplx cross_ratio(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3,
                        const ProjPoint& p4) {
  auto d = [](const ProjPoint& a, const ProjPoint& b) { return a.u * b.v - a.v * b.u; };
  auto mag = [](const ProjPoint& a) { return std::hypot(std::abs(a.u), std::abs(a.v)); };
  const ProjPoint pts[4] = {p1, p2, p3, p4};
  for (int i = 0; i < 4; ++i) {
    if (mag(pts[i]) < 1e-300) throw precondition_error("cross-ratio: zero homogeneous pair");
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(d(pts[i], pts[j])) < 1e-12 * mag(pts[i]) * mag(pts[j]))
        throw precondition_error("cross-ratio: coincident points");
  }
  return (d(p3, p1) * d(p2, p4)) / (d(p3, p4) * d(p2, p1));
}

}  // namespace holoconf
