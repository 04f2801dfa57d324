#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "holoconf/linalg.hpp"
#include "holoconf/metric.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

/// Sign convention pinned by the divergence identity div W = C on the
/// reference metrics; see the calibration test before touching this.
inline constexpr double kDivWeylSign = 1.0;

namespace detail {
inline int eps4(int i, int j, int k, int l) {
  const int p[4] = {i, j, k, l};
  int sgn = 1;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      if (p[a] == p[b]) return 0;
      if (p[a] > p[b]) sgn = -sgn;
    }
  return sgn;
}
}  // namespace detail

/// Everything the identity checks need at a single point, assembled from
/// metric derivatives of order 3: connection, curvature, the (0,4)
/// curvature operator, its Schouten/Weyl split, Cotton tensor, covariant
/// derivative of the Weyl parts, and (n = 4 only) the Lambda^2 frame
/// picture with self-dual / anti-self-dual projections.
///
/// The (0,4) tensors here use the "operator pairing" index order: for any
/// curvature-type quantity T, T(i,j,k,l) pairs the bivector (i,j) against
/// (k,l) so that T = <T(di ^ dj), dk ^ dl>. With the curvature operator
/// R defined through g(R(X,Y)Z, T) this means Rop(i,j,k,l) = R4(i,j,l,k),
/// and with that pairing Rop = h ^ g + W holds verbatim, both in
/// coordinates and as 6x6 frame matrices.
class CurvatureContext {
 public:
  int n;
  double orientation;

  CMat g, ginv;
  Ten g1;            // (k,i,j) = d_k g_ij
  Ten ginv1, ginv2;  // derivatives of the inverse metric
  Ten Gamma;         // (k,i,j) = Gamma^k_ij
  Ten dGamma;        // (m,k,i,j) = d_m Gamma^k_ij
  Ten d2Gamma;       // (p,m,k,i,j)
  Ten Riem;          // (l,i,j,k): component l of R(di,dj)dk
  Ten dRiem;         // (m,l,i,j,k)
  Ten R4;            // (i,j,k,l) = g(R(di,dj)dk, dl)
  Ten Rop, dRop;     // operator pairing, Rop(i,j,k,l) = R4(i,j,l,k)
  CMat Ric;
  Ten dRic;  // (m,i,j)
  cplx Scal = 0.0;
  CVec dScal;
  CMat hten;   // h = Scal/(2n(n-1)) g + Ric0/(n-2)
  Ten dh;      // (m,i,j)
  Ten nabla_h; // (m,i,j) = (nabla_m h)(i,j)
  Ten cotton;  // (i,j,k) = (nabla_i h)(j,k) - (nabla_j h)(i,k)
  Ten hI4, dhI4;      // h ^ g in the operator pairing
  Ten Wop, dWop;      // Weyl, operator pairing
  Ten nablaW;         // (m,i,j,k,l)
  Ten divW;           // (i,j,k) = s g^{ma} (nabla_m W)(i,j,a,k)

  // n = 4 only: duality split.
  cplx sqrt_detg = 0.0;
  Ten vol, dvol;         // vol(i,j,k,l) = orientation sqrt(det g) eps_{ijkl}
  Ten Wplus, Wminus;     // (0,4) operator pairing, frame independent
  Ten nablaWplus, nablaWminus;
  Ten divWplus, divWminus;

  // n = 4 frame picture.
  CMat frame, frame_inv;                       // columns g-orthonormal
  double sigma = 1.0;                          // star sign in the frame
  std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  CMat M6, S6, Pplus6, Pminus6, hI6, W6, W6plus, W6minus;

  explicit CurvatureContext(const MetricJets& mj, double orient = 1.0, unsigned frame_seed = 0x5eedu)
      : n(mj.n), orientation(orient) {
    build_connection(mj);
    build_curvature(mj);
    build_schouten(mj);
    build_weyl(mj);
    if (n == 4) {
      build_duality(mj);
      build_frame(frame_seed);
    }
  }

  // ---- pointwise evaluation helpers -------------------------------------

  cplx dot(const CVec& u, const CVec& v) const {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g(i, j) * u[(std::size_t)i] * v[(std::size_t)j];
    return s;
  }

  cplx eval4(const Ten& T, const CVec& X, const CVec& Y, const CVec& Z, const CVec& W) const {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += T(i, j, k, l) * X[(std::size_t)i] * Y[(std::size_t)j] * Z[(std::size_t)k] * W[(std::size_t)l];
    return s;
  }

  /// g(R(X,Y)Z, T)
  cplx riemann(const CVec& X, const CVec& Y, const CVec& Z, const CVec& T) const {
    return eval4(R4, X, Y, Z, T);
  }
  /// The vector R(X,Y)Z.
  CVec riemann_op(const CVec& X, const CVec& Y, const CVec& Z) const {
    CVec r((std::size_t)n, cplx(0.0));
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            r[(std::size_t)l] += Riem(l, i, j, k) * X[(std::size_t)i] * Y[(std::size_t)j] * Z[(std::size_t)k];
    return r;
  }

  /// g(W(X,Y)Z, T) for the full Weyl operator and its halves.
  cplx weyl(const CVec& X, const CVec& Y, const CVec& Z, const CVec& T) const {
    return eval4(Wop, X, Y, T, Z);
  }
  cplx weyl_plus(const CVec& X, const CVec& Y, const CVec& Z, const CVec& T) const {
    return eval4(Wplus, X, Y, T, Z);
  }
  cplx weyl_minus(const CVec& X, const CVec& Y, const CVec& Z, const CVec& T) const {
    return eval4(Wminus, X, Y, T, Z);
  }

  /// Cotton form C(X,Y)(Z).
  cplx cotton_eval(const CVec& X, const CVec& Y, const CVec& Z) const {
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          s += cotton(i, j, k) * X[(std::size_t)i] * Y[(std::size_t)j] * Z[(std::size_t)k];
    return s;
  }

  /// Frame components of a bivector u ^ v (basis e_a ^ e_b, a < b).
  std::array<cplx, 6> bivector(const CVec& u, const CVec& v) const {
    const CVec uf = frame_inv * u, vf = frame_inv * v;
    std::array<cplx, 6> w;
    for (int A = 0; A < 6; ++A) {
      const int a = pairs[(std::size_t)A][0], b = pairs[(std::size_t)A][1];
      w[(std::size_t)A] = uf[(std::size_t)a] * vf[(std::size_t)b] - uf[(std::size_t)b] * vf[(std::size_t)a];
    }
    return w;
  }

  /// Reassembly residual |Rop - (h ^ g + W)| relative to |Rop|.
  double reassembly_residual() const {
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < Rop.a.size(); ++s) {
      const cplx r = Rop.a[s] - (hI4.a[s] + Wop.a[s]);
      num += std::norm(r);
      den += std::norm(Rop.a[s]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
  }

  double weyl_plus_norm() const { return W6plus.frobenius(); }
  double weyl_minus_norm() const { return W6minus.frobenius(); }

  // ---- construction ------------------------------------------------------

 private:
  void build_connection(const MetricJets& mj) {
    g = mj.matrix();
    ginv = inverse(g);
    g1 = mj.g1;

    ginv1 = Ten(n, 3);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cplx s = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += ginv(i, a) * mj.g1(k, a, b) * ginv(b, j);
          ginv1(k, i, j) = -s;
        }
    ginv2 = Ten(n, 4);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b)
                s += ginv1(l, i, a) * mj.g1(k, a, b) * ginv(b, j) +
                     ginv(i, a) * mj.g2(l, k, a, b) * ginv(b, j) +
                     ginv(i, a) * mj.g1(k, a, b) * ginv1(l, b, j);
            ginv2(l, k, i, j) = -s;
          }

    auto A = [&](int l, int i, int j) { return mj.g1(i, j, l) + mj.g1(j, i, l) - mj.g1(l, i, j); };
    auto dA = [&](int m, int l, int i, int j) {
      return mj.g2(m, i, j, l) + mj.g2(m, j, i, l) - mj.g2(m, l, i, j);
    };
    auto d2A = [&](int p, int m, int l, int i, int j) {
      return mj.g3(p, m, i, j, l) + mj.g3(p, m, j, i, l) - mj.g3(p, m, l, i, j);
    };

    Gamma = Ten(n, 3);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cplx s = 0.0;
          for (int l = 0; l < n; ++l) s += ginv(k, l) * A(l, i, j);
          Gamma(k, i, j) = 0.5 * s;
        }
    dGamma = Ten(n, 4);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int l = 0; l < n; ++l) s += ginv1(m, k, l) * A(l, i, j) + ginv(k, l) * dA(m, l, i, j);
            dGamma(m, k, i, j) = 0.5 * s;
          }
    d2Gamma = Ten(n, 5);
    for (int p = 0; p < n; ++p)
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              cplx s = 0.0;
              for (int l = 0; l < n; ++l)
                s += ginv2(p, m, k, l) * A(l, i, j) + ginv1(m, k, l) * dA(p, l, i, j) +
                     ginv1(p, k, l) * dA(m, l, i, j) + ginv(k, l) * d2A(p, m, l, i, j);
              d2Gamma(p, m, k, i, j) = 0.5 * s;
            }
  }

  void build_curvature(const MetricJets& mj) {
    Riem = Ten(n, 4);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            cplx s = dGamma(i, l, j, k) - dGamma(j, l, i, k);
            for (int a = 0; a < n; ++a)
              s += Gamma(l, i, a) * Gamma(a, j, k) - Gamma(l, j, a) * Gamma(a, i, k);
            Riem(l, i, j, k) = s;
          }
    dRiem = Ten(n, 5);
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              cplx s = d2Gamma(m, i, l, j, k) - d2Gamma(m, j, l, i, k);
              for (int a = 0; a < n; ++a)
                s += dGamma(m, l, i, a) * Gamma(a, j, k) + Gamma(l, i, a) * dGamma(m, a, j, k) -
                     dGamma(m, l, j, a) * Gamma(a, i, k) - Gamma(l, j, a) * dGamma(m, a, i, k);
              dRiem(m, l, i, j, k) = s;
            }

    R4 = Ten(n, 4);
    Rop = Ten(n, 4);
    dRop = Ten(n, 5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = 0.0;
            for (int m = 0; m < n; ++m) s += Riem(m, i, j, k) * g(m, l);
            R4(i, j, k, l) = s;
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) Rop(i, j, k, l) = R4(i, j, l, k);
    for (int p = 0; p < n; ++p)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              cplx s = 0.0;
              for (int m = 0; m < n; ++m)
                s += dRiem(p, m, i, j, l) * g(m, k) + Riem(m, i, j, l) * mj.g1(p, m, k);
              dRop(p, i, j, k, l) = s;
            }

    Ric = CMat(n, n);
    dRic = Ten(n, 3);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cplx s = 0.0;
        for (int i = 0; i < n; ++i) s += Riem(i, i, j, k);
        Ric(j, k) = s;
        for (int m = 0; m < n; ++m) {
          cplx t = 0.0;
          for (int i = 0; i < n; ++i) t += dRiem(m, i, i, j, k);
          dRic(m, j, k) = t;
        }
      }
    Scal = 0.0;
    dScal.assign((std::size_t)n, cplx(0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Scal += ginv(i, j) * Ric(i, j);
        for (int m = 0; m < n; ++m)
          dScal[(std::size_t)m] += ginv1(m, i, j) * Ric(i, j) + ginv(i, j) * dRic(m, i, j);
      }
  }

  void build_schouten(const MetricJets& mj) {
    const double c2 = 1.0 / (n - 2 == 0 ? 1 : n - 2);
    const double c1 = 1.0 / (2.0 * n * (n - 1)) - c2 / n;
    hten = CMat(n, n);
    dh = Ten(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        hten(i, j) = c1 * Scal * g(i, j) + c2 * Ric(i, j);
        for (int m = 0; m < n; ++m)
          dh(m, i, j) =
              c1 * (dScal[(std::size_t)m] * g(i, j) + Scal * mj.g1(m, i, j)) + c2 * dRic(m, i, j);
      }
    nabla_h = Ten(n, 3);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          cplx s = dh(m, i, j);
          for (int a = 0; a < n; ++a) s -= Gamma(a, m, i) * hten(a, j) + Gamma(a, m, j) * hten(i, a);
          nabla_h(m, i, j) = s;
        }
    cotton = Ten(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) cotton(i, j, k) = nabla_h(i, j, k) - nabla_h(j, i, k);
  }

  void build_weyl(const MetricJets& mj) {
    hI4 = Ten(n, 4);
    dhI4 = Ten(n, 5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            hI4(i, j, k, l) = hten(i, k) * g(j, l) - hten(i, l) * g(j, k) - hten(j, k) * g(i, l) +
                              hten(j, l) * g(i, k);
            for (int m = 0; m < n; ++m)
              dhI4(m, i, j, k, l) = dh(m, i, k) * g(j, l) + hten(i, k) * mj.g1(m, j, l) -
                                    dh(m, i, l) * g(j, k) - hten(i, l) * mj.g1(m, j, k) -
                                    dh(m, j, k) * g(i, l) - hten(j, k) * mj.g1(m, i, l) +
                                    dh(m, j, l) * g(i, k) + hten(j, l) * mj.g1(m, i, k);
          }
    Wop = Ten(n, 4);
    dWop = Ten(n, 5);
    for (std::size_t s = 0; s < Wop.a.size(); ++s) Wop.a[s] = Rop.a[s] - hI4.a[s];
    for (std::size_t s = 0; s < dWop.a.size(); ++s) dWop.a[s] = dRop.a[s] - dhI4.a[s];

    nablaW = covariantize4(Wop, dWop);
    divW = divergence(nablaW);
  }

  void build_duality(const MetricJets& mj) {
    const cplx dg = det(g);
    sqrt_detg = std::sqrt(dg);  // principal branch
    vol = Ten(n, 4);
    dvol = Ten(n, 5);
    // d_m sqrt(det g) = 1/2 sqrt(det g) tr(g^{-1} d_m g)
    CVec trg((std::size_t)n, cplx(0.0));
    for (int m = 0; m < n; ++m)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) trg[(std::size_t)m] += ginv(a, b) * mj.g1(m, b, a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const int e = detail::eps4(i, j, k, l);
            if (e == 0) continue;
            vol(i, j, k, l) = orientation * sqrt_detg * (double)e;
            for (int m = 0; m < n; ++m)
              dvol(m, i, j, k, l) = 0.5 * trg[(std::size_t)m] * vol(i, j, k, l);
          }

    // Star acting on the first bivector slot, with raised volume indices:
    // (*T)_{ijkl} = 1/2 vol_{ij}^{mn} T_{mnkl}.
    Ten volUp(n, 4), dvolUp(n, 5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
          for (int q = 0; q < n; ++q) {
            cplx s = 0.0;
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) s += vol(i, j, a, b) * ginv(a, m) * ginv(b, q);
            volUp(i, j, m, q) = s;
            for (int p = 0; p < n; ++p) {
              cplx t = 0.0;
              for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                  t += dvol(p, i, j, a, b) * ginv(a, m) * ginv(b, q) +
                       vol(i, j, a, b) * ginv1(p, a, m) * ginv(b, q) +
                       vol(i, j, a, b) * ginv(a, m) * ginv1(p, b, q);
              dvolUp(p, i, j, m, q) = t;
            }
          }

    Ten starW(n, 4), dstarW(n, 5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = 0.0;
            for (int m = 0; m < n; ++m)
              for (int q = 0; q < n; ++q) s += volUp(i, j, m, q) * Wop(m, q, k, l);
            starW(i, j, k, l) = 0.5 * s;
            for (int p = 0; p < n; ++p) {
              cplx t = 0.0;
              for (int m = 0; m < n; ++m)
                for (int q = 0; q < n; ++q)
                  t += dvolUp(p, i, j, m, q) * Wop(m, q, k, l) + volUp(i, j, m, q) * dWop(p, m, q, k, l);
              dstarW(p, i, j, k, l) = 0.5 * t;
            }
          }

    Wplus = Ten(n, 4);
    Wminus = Ten(n, 4);
    Ten dWplus(n, 5), dWminus(n, 5);
    for (std::size_t s = 0; s < Wop.a.size(); ++s) {
      Wplus.a[s] = 0.5 * (Wop.a[s] + starW.a[s]);
      Wminus.a[s] = 0.5 * (Wop.a[s] - starW.a[s]);
    }
    for (std::size_t s = 0; s < dWop.a.size(); ++s) {
      dWplus.a[s] = 0.5 * (dWop.a[s] + dstarW.a[s]);
      dWminus.a[s] = 0.5 * (dWop.a[s] - dstarW.a[s]);
    }
    nablaWplus = covariantize4(Wplus, dWplus);
    nablaWminus = covariantize4(Wminus, dWminus);
    divWplus = divergence(nablaWplus);
    divWminus = divergence(nablaWminus);
  }

  void build_frame(unsigned seed) {
    frame = orthonormal_frame(g, seed);
    frame_inv = inverse(frame);
    const cplx sigma0 = sqrt_detg * det(frame);
    double s0 = sigma0.real() >= 0.0 ? 1.0 : -1.0;
    if (std::abs(sigma0 - cplx(s0)) > 1e-6)
      throw numeric_abort("frame star sign did not resolve to +/-1");
    sigma = orientation * s0;

    auto pull4 = [&](const Ten& T) {
      CMat m(6, 6);
      for (int A = 0; A < 6; ++A)
        for (int B = 0; B < 6; ++B) {
          const int a = pairs[(std::size_t)A][0], b = pairs[(std::size_t)A][1];
          const int c = pairs[(std::size_t)B][0], d = pairs[(std::size_t)B][1];
          cplx s = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                  s += T(i, j, k, l) * frame(i, a) * frame(j, b) * frame(k, c) * frame(l, d);
          m(A, B) = s;
        }
      return m;
    };

    M6 = pull4(Rop);
    hI6 = pull4(hI4);
    W6 = M6 - hI6;

    S6 = CMat(6, 6);
    S6(0, 5) = sigma; S6(5, 0) = sigma;
    S6(1, 4) = -sigma; S6(4, 1) = -sigma;
    S6(2, 3) = sigma; S6(3, 2) = sigma;
    Pplus6 = (CMat::identity(6) + S6) * cplx(0.5);
    Pminus6 = (CMat::identity(6) - S6) * cplx(0.5);
    W6plus = Pplus6 * W6 * Pplus6;
    W6minus = Pminus6 * W6 * Pminus6;
  }

  /// Covariant derivative of a (0,4) tensor from its values and partials.
  Ten covariantize4(const Ten& T, const Ten& dT) const {
    Ten r(n, 5);
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              cplx s = dT(m, i, j, k, l);
              for (int a = 0; a < n; ++a)
                s -= Gamma(a, m, i) * T(a, j, k, l) + Gamma(a, m, j) * T(i, a, k, l) +
                     Gamma(a, m, k) * T(i, j, a, l) + Gamma(a, m, l) * T(i, j, k, a);
              r(m, i, j, k, l) = s;
            }
    return r;
  }

  /// divW(i,j,k) = sign * g^{ma} (nabla_m T)(i,j,a,k)
  Ten divergence(const Ten& nablaT) const {
    Ten r(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          cplx s = 0.0;
          for (int m = 0; m < n; ++m)
            for (int a = 0; a < n; ++a) s += ginv(m, a) * nablaT(m, i, j, a, k);
          r(i, j, k) = kDivWeylSign * s;
        }
    return r;
  }
};

}  // namespace holoconf
