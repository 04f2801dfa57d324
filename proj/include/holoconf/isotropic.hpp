#pragma once

#include <array>
#include <cmath>
#include <string>

#include "holoconf/curvature.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

/// Scale-free measure of how far v is from the isotropy cone g(v,v) = 0.
inline double isotropy_residual(const CurvatureContext& c, const CVec& v) {
  const double nrm = vec_norm(v);
  if (nrm == 0.0) throw precondition_error("zero vector has no isotropy residual");
  return std::abs(c.dot(v, v)) / (nrm * nrm);
}

enum class PlaneType { Alpha, Beta, NonIsotropic, DegenerateSpan };

struct PlaneClassification {
  PlaneType type = PlaneType::NonIsotropic;
  double isotropy = 0.0;         // max of |g(u,u)|, |g(u,v)|, |g(v,v)|, normalized
  double self_dual_defect = 0.0; // |*w - w| / |w| for the plane's bivector
  double anti_self_dual_defect = 0.0;
  const char* label() const {
    switch (type) {
      case PlaneType::Alpha: return "alpha";
      case PlaneType::Beta: return "beta";
      case PlaneType::NonIsotropic: return "non-isotropic";
      default: return "degenerate-span";
    }
  }
};

/// Decide whether span{u, v} is an isotropic 2-plane and, in dimension 4,
/// which half of the bivector space its area element lives in. Thresholds:
/// clean below 1e-8, clean rejection above 1e-6; the band in between is
/// reported as an error rather than silently classified.
inline PlaneClassification classify_plane(const CurvatureContext& c, const CVec& u, const CVec& v) {
  if (c.n != 4) throw precondition_error("plane classification needs dimension 4");
  PlaneClassification r;

  // span rank via the Euclidean Gram determinant, scale-free
  double n2u = 0.0, n2v = 0.0;
  cplx herm = 0.0;
  for (int i = 0; i < 4; ++i) {
    n2u += std::norm(u[(std::size_t)i]);
    n2v += std::norm(v[(std::size_t)i]);
    herm += std::conj(u[(std::size_t)i]) * v[(std::size_t)i];
  }
  const double nu = std::sqrt(n2u), nv = std::sqrt(n2v);
  const double gram = n2u * n2v - std::norm(herm);
  if (n2u == 0.0 || n2v == 0.0 || gram < 1e-12 * n2u * n2v) {
    r.type = PlaneType::DegenerateSpan;
    return r;
  }

  const double scale = std::max({std::abs(c.dot(u, u)), std::abs(c.dot(u, v)), std::abs(c.dot(v, v))});
  r.isotropy = scale / (nu * nv + nu * nu + nv * nv);

  std::array<cplx, 6> w = c.bivector(u, v);
  double wn = 0.0;
  for (const cplx& x : w) wn += std::norm(x);
  wn = std::sqrt(wn);
  // star in the frame basis: pairs are (12,13,14,23,24,34)
  std::array<cplx, 6> sw;
  sw[0] = c.sigma * w[5]; sw[5] = c.sigma * w[0];
  sw[1] = -c.sigma * w[4]; sw[4] = -c.sigma * w[1];
  sw[2] = c.sigma * w[3]; sw[3] = c.sigma * w[2];
  double dplus = 0.0, dminus = 0.0;
  for (int A = 0; A < 6; ++A) {
    dplus += std::norm(sw[(std::size_t)A] - w[(std::size_t)A]);
    dminus += std::norm(sw[(std::size_t)A] + w[(std::size_t)A]);
  }
  r.self_dual_defect = std::sqrt(dplus) / wn;
  r.anti_self_dual_defect = std::sqrt(dminus) / wn;

  auto borderline = [](double x) { return x >= 1e-8 && x <= 1e-6; };
  if (borderline(r.isotropy) || (r.isotropy < 1e-8 && borderline(std::min(r.self_dual_defect, r.anti_self_dual_defect))))
    throw precondition_error("plane classification is borderline; perturb the input");

  if (r.isotropy >= 1e-8) {
    r.type = PlaneType::NonIsotropic;
    return r;
  }
  if (r.self_dual_defect < 1e-8)
    r.type = PlaneType::Alpha;
  else if (r.anti_self_dual_defect < 1e-8)
    r.type = PlaneType::Beta;
  else
    // cannot happen for a genuine totally isotropic plane in dimension 4
    throw numeric_abort("isotropic plane with indefinite duality type");
  return r;
}

/// Null vectors in an orthonormal frame correspond to singular 2x2 matrices
///   M(v) = [[v1 + i v2, v3 + i v4], [-v3 + i v4, v1 - i v2]],  det = sum v_a^2.
/// Rank-one factorizations M = xi eta^T sweep the two families of isotropic
/// planes through v: fixing xi and letting eta vary spans one plane, fixing
/// eta the other. This builds both candidate planes and returns the one of
/// the requested type.
inline std::array<CVec, 2> isotropic_plane_through(const CurvatureContext& c, const CVec& v,
                                                   PlaneType want) {
  if (c.n != 4) throw precondition_error("isotropic planes need dimension 4");
  if (want != PlaneType::Alpha && want != PlaneType::Beta)
    throw precondition_error("requested plane type must be alpha or beta");
  if (isotropy_residual(c, v) > 1e-8) throw precondition_error("vector is not null");

  const CVec vf = c.frame_inv * v;
  const cplx I(0.0, 1.0);
  const cplx m00 = vf[0] + I * vf[1], m01 = vf[2] + I * vf[3];
  const cplx m10 = -vf[2] + I * vf[3], m11 = vf[0] - I * vf[1];

  // rank-1 factorization M = xi eta^T, pivoting on the largest entry
  cplx xi0, xi1, eta0, eta1;
  if (std::abs(m00) + std::abs(m01) >= std::abs(m10) + std::abs(m11)) {
    if (std::abs(m00) >= std::abs(m01)) {
      xi0 = 1.0; eta0 = m00; eta1 = m01; xi1 = std::abs(m00) > 0 ? m10 / m00 : m11 / m01;
    } else {
      xi0 = 1.0; eta0 = m00; eta1 = m01; xi1 = m11 / m01;
    }
  } else {
    xi1 = 1.0; eta0 = m10; eta1 = m11; xi0 = std::abs(m10) > std::abs(m11) ? m00 / m10 : m01 / m11;
  }

  // frame vector from a factor pair (xi, eta)
  auto vec_of = [&](cplx x0, cplx x1, cplx e0, cplx e1) {
    CVec w(4);
    const cplx a = x0 * e0, b = x0 * e1, cc = x1 * e0, d = x1 * e1;
    w[0] = 0.5 * (a + d);
    w[1] = (a - d) / (2.0 * I);
    w[2] = 0.5 * (b - cc);
    w[3] = (b + cc) / (2.0 * I);
    return c.frame * w;
  };

  // family 1: xi fixed, eta spans C^2;  family 2: eta fixed, xi spans C^2
  std::array<CVec, 2> famA = {vec_of(xi0, xi1, 1.0, 0.0), vec_of(xi0, xi1, 0.0, 1.0)};
  std::array<CVec, 2> famB = {vec_of(1.0, 0.0, eta0, eta1), vec_of(0.0, 1.0, eta0, eta1)};

  for (auto& fam : {famA, famB}) {
    PlaneClassification cls = classify_plane(c, fam[0], fam[1]);
    if ((want == PlaneType::Alpha && cls.type == PlaneType::Alpha) ||
        (want == PlaneType::Beta && cls.type == PlaneType::Beta))
      return fam;
  }
  throw numeric_abort("no isotropic plane of the requested type through the given vector");
}

/// The two duality checks behind the cone-curvature statement: for every X
/// in an isotropic self-dual plane containing v, the sectional-type number
/// g(R(v,X)v, X) is computed (a) from the full curvature tensor and (b) from
/// the self-dual Weyl part alone. Returns both values.
struct ConeCurvaturePair {
  cplx full;       // g(R(v,X)v, X)
  cplx weyl_plus;  // g(W+(v,X)v, X)
};

inline ConeCurvaturePair alpha_cone_curvature(const CurvatureContext& c, const CVec& v, const CVec& X) {
  ConeCurvaturePair r;
  r.full = c.riemann(v, X, v, X);
  r.weyl_plus = c.weyl_plus(v, X, v, X);
  return r;
}

}  // namespace holoconf
