#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "holoconf/catalog.hpp"
#include "holoconf/conformal3.hpp"

using namespace holoconf;

namespace {

std::string cnum(cplx z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(%.17g+%.17g*i)", z.real(), z.imag());
  return buf;
}

Hypersurface coordinate_hyperplane() {
  return Hypersurface({parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("0", 3)});
}

Hypersurface tilted_hyperplane() {
  return Hypersurface(
      {parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("0.3*z1 - 0.2*z2 + 0.4*z3", 3)});
}

/// Quadratic Taylor truncation of a metric field at a basepoint, with the
/// coordinates contracted by eps: g0 + eps*(dg)z + eps^2/2*(d2g)zz. The full
/// family g(p0 + eps z) has identically vanishing anti-self-dual Weyl half
/// when the source does, so the truncation kills it to high order in eps.
MetricManifest truncated_family(const MetricField& f, const CVec& p0, double eps) {
  MetricJets mj = f.jets(p0, 2);
  MetricManifest pm;
  pm.name = "quadratic_truncation";
  pm.n = 4;
  pm.coordinates = catalog::coord_names(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      std::string s = cnum(mj.g0(i, j));
      for (int k = 0; k < 4; ++k) {
        const cplx c = eps * mj.g1(k, i, j);
        if (std::abs(c) > 0) s += " + " + cnum(c) + "*z" + std::to_string(k + 1);
      }
      for (int k = 0; k < 4; ++k)
        for (int l = k; l < 4; ++l) {
          const cplx c = eps * eps * mj.g2(k, l, i, j) * (k == l ? 0.5 : 1.0);
          if (std::abs(c) > 0)
            s += " + " + cnum(c) + "*z" + std::to_string(k + 1) + "*z" + std::to_string(l + 1);
        }
      pm.g_upper.push_back(s);
    }
  pm.basepoint = CVec{cplx(0.3, 0.1), cplx(0.2, -0.05), cplx(-0.1, 0.2), cplx(0.25, 0.1)};
  return pm;
}

}  // namespace

TEST_CASE("dimension-3 Cotton tensor: vanishing, antisymmetry, trace, FD oracle") {
  // flat and conformally flat 3-metrics have zero Cotton tensor
  {
    MetricManifest m = catalog::flat3();
    CurvatureContext c(m.field().jets(m.basepoint, 3));
    CHECK(c.cotton.frobenius() < 1e-12);
  }
  {
    MetricManifest m = catalog::round3();
    CurvatureContext c(m.field().jets(m.basepoint, 3));
    CHECK(c.cotton.frobenius() < 1e-7);
  }

  MetricManifest m = catalog::generic3();
  MetricField f = m.field();
  const CVec p = m.basepoint;
  CurvatureContext c(f.jets(p, 3));
  CHECK(c.cotton.frobenius() > 1e-4);

  // antisymmetry in the first two slots is exact by construction
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(std::abs(c.cotton(i, j, k) + c.cotton(j, i, k)) == 0.0);

  // trace over an orthonormal basis vanishes (contracted Bianchi identity)
  const CMat F = orthonormal_frame(c.g);
  for (int xcol = 0; xcol < 3; ++xcol) {
    cplx tr = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            tr += c.cotton(i, j, k) * F(i, xcol) * F(j, a) * F(k, a);
    CHECK(std::abs(tr) < 1e-9);
  }

  // finite-difference recomputation of nabla h, assembled into Cotton
  const double step = 1e-4;
  Ten dh_fd(3, 3);
  for (int mm = 0; mm < 3; ++mm) {
    CVec pp = p, pmn = p;
    pp[(std::size_t)mm] += step;
    pmn[(std::size_t)mm] -= step;
    CurvatureContext cp(f.jets(pp, 3)), cmn(f.jets(pmn, 3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        dh_fd(mm, i, j) = (cp.hten(i, j) - cmn.hten(i, j)) / (2.0 * step);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        auto nabla = [&](int a, int b, int cc) {
          cplx s = dh_fd(a, b, cc);
          for (int d = 0; d < 3; ++d)
            s -= c.Gamma(d, a, b) * c.hten(d, cc) + c.Gamma(d, a, cc) * c.hten(b, d);
          return s;
        };
        CHECK(std::abs(c.cotton(i, j, k) - (nabla(i, j, k) - nabla(j, i, k))) < 1e-5);
      }
}

TEST_CASE("the 3-dimensional curvature operator conjugated by the star is -h + (tr h) I") {
  for (const char* name : {"flat3", "round3", "generic3"}) {
    MetricManifest m = catalog::builtin(name);
    MetricField f = m.field();
    for (int s = 0; s < 16; ++s) {
      CVec p = m.basepoint;
      for (int i = 0; i < 3; ++i)
        p[(std::size_t)i] += cplx(0.011 * ((s * 3 + i) % 7 - 3), 0.013 * ((s * 5 + 2 * i) % 5 - 2));
      CurvatureContext c(f.jets(p, 3));
      CAPTURE(name);
      CHECK(star_r_residual(c) < 1e-8);
    }
  }
}

TEST_CASE("frame-component formulas for the Weyl halves") {
  // flat: everything vanishes
  {
    MetricManifest m = catalog::flat4();
    CurvatureContext c(m.field().jets(m.basepoint, 3));
    HyperContext hc(m.field(), tilted_hyperplane(),
                    {cplx(0.1, 0.05), cplx(-0.08, 0.12), cplx(0.15, -0.06)});
    WSplitSample s = w_component_formulas(c, hc.X, hc.Y, hc.Z, hc.nu);
    CHECK(std::abs(s.lhs_plus) < 1e-10);
    CHECK(std::abs(s.rhs_plus) < 1e-10);
    CHECK(std::abs(s.lhs_minus) < 1e-10);
    CHECK(std::abs(s.rhs_minus) < 1e-10);
  }
  // generic metric: two-path equality with neither side zero
  {
    MetricManifest m = catalog::generic4();
    MetricField f = m.field();
    for (unsigned seed : {1u, 2u, 3u}) {
      HyperContext hc(f, tilted_hyperplane(),
                      {cplx(0.1, 0.05), cplx(-0.08, 0.12), cplx(0.15, -0.06)}, 1.0, seed);
      WSplitSample s = w_component_formulas(hc.amb, hc.X, hc.Y, hc.Z, hc.nu);
      CHECK(std::abs(s.lhs_plus - s.rhs_plus) < 1e-8);
      CHECK(std::abs(s.lhs_minus - s.rhs_minus) < 1e-8);
      CHECK(std::abs(s.lhs_plus) + std::abs(s.lhs_minus) > 1e-4);
    }
  }
  // anti-self-dual example: the minus half vanishes on both paths
  {
    MetricManifest m = catalog::cp2_complexification();
    MetricField f = m.field();
    HyperContext hc(f, tilted_hyperplane(),
                    {cplx(0.1, 0.05), cplx(-0.08, 0.12), cplx(0.15, -0.06)}, m.orientation);
    WSplitSample s = w_component_formulas(hc.amb, hc.X, hc.Y, hc.Z, hc.nu);
    CHECK(std::abs(s.lhs_plus - s.rhs_plus) < 1e-8);
    CHECK(std::abs(s.lhs_minus) < 1e-9);
    CHECK(std::abs(s.rhs_minus) < 1e-9);
    CHECK(std::abs(s.lhs_plus) > 1e-4);
  }
  // a non-orthonormal frame is rejected
  {
    MetricManifest m = catalog::flat4();
    CurvatureContext c(m.field().jets(m.basepoint, 3));
    CVec e1 = {1.0, 0.0, 0.0, 0.0}, e2 = {0.0, 1.0, 0.0, 0.0};
    CVec e3 = {0.0, 0.0, 1.0, 0.0}, bad = {0.0, 0.0, 0.5, 1.0};
    CHECK_THROWS_AS(w_component_formulas(c, e1, e2, e3, bad), precondition_error);
  }
}

TEST_CASE("second fundamental form classification of hypersurfaces in flat space") {
  MetricField f = catalog::flat4().field();
  const CVec q = {cplx(0.12, 0.04), cplx(-0.07, 0.09), cplx(0.05, -0.11)};

  // hyperplane: totally geodesic
  {
    HyperContext hc(f, coordinate_hyperplane(), q);
    CHECK(hc.is_totally_geodesic());
    CHECK(hc.is_umbilic());
  }
  // complex unit sphere: umbilic with unit shape factor
  {
    Hypersurface sph({parse("z1", 3), parse("z2", 3), parse("z3", 3),
                      parse("sqrt(1 - z1^2 - z2^2 - z3^2)", 3)});
    HyperContext hc(f, sph, q);
    CHECK(hc.is_umbilic(1e-8));
    CHECK_FALSE(hc.is_totally_geodesic());
    CHECK(std::abs(std::abs(hc.umbilic_lambda) - 1.0) < 1e-8);
  }
  // generic quadratic graph: not umbilic
  {
    Hypersurface graph(
        {parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("z1^2 + 2*z2^2", 3)});
    HyperContext hc(f, graph, q);
    CHECK_FALSE(hc.is_umbilic(1e-3));
  }
  // hypersurface tangent to the isotropy cone: no unit normal
  {
    Hypersurface iso({parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("i*z3", 3)});
    CHECK_THROWS(HyperContext(f, iso, q));
  }
}

TEST_CASE("normal-derivative identity on the verifiable configurations") {
  const CVec q = {cplx(0.12, 0.04), cplx(-0.07, 0.09), cplx(0.05, -0.11)};

  // flat ambient, hyperplane: 0 = 0
  {
    MetricField f = catalog::flat4().field();
    HyperContext hc(f, coordinate_hyperplane(), q);
    Theorem8Result r = theorem8_identity(hc);
    CHECK(std::abs(r.lhs) < 1e-10);
    CHECK(std::abs(r.rhs) < 1e-10);
  }
  // conformally flat ambient with factor independent of the normal
  // coordinate: hyperplane stays totally geodesic, both sides vanish
  {
    MetricField f = catalog::conf_flat4().field();
    HyperContext hc(f, coordinate_hyperplane(), q);
    CHECK(hc.totally_geodesic_residual < 1e-10);
    Theorem8Result r = theorem8_identity(hc);
    CHECK(std::abs(r.lhs) < 1e-6);
    CHECK(std::abs(r.rhs) < 1e-6);
    CHECK(std::abs(r.lhs - r.rhs) < 1e-6);

    // intermediate identity: <R(X,Y)Z,X> + <R(Z,nu)Y,nu> = 0 on a totally
    // geodesic hypersurface of a conformally flat ambient
    const cplx rq = hc.amb.riemann(hc.X, hc.Y, hc.Z, hc.X) +
                    hc.amb.riemann(hc.Z, hc.nu, hc.Y, hc.nu);
    CHECK(std::abs(rq) < 1e-7);

    // corollary: ambient self-dual Cotton half restricted to the hypersurface
    // equals the intrinsic Cotton tensor (both vanish here)
    CHECK(corollary_cotton_residual(hc) < 1e-7);
  }
  // intermediate identity where only anti-self-duality is available:
  // <W+(X,Y)Z,X> = (1/2)(<R(X,Y)Y,nu> + <R(Z,X)Z,nu>)
  {
    MetricManifest m = catalog::cp2_complexification();
    MetricField f = m.field();
    HyperContext hc(f, tilted_hyperplane(), q, m.orientation);
    const cplx lhs = hc.amb.weyl_plus(hc.X, hc.Y, hc.Z, hc.X);
    const cplx rhs = 0.5 * (hc.amb.riemann(hc.X, hc.Y, hc.Y, hc.nu) +
                            hc.amb.riemann(hc.Z, hc.X, hc.Z, hc.nu));
    CHECK(std::abs(lhs - rhs) < 1e-7 * std::max(1.0, std::abs(lhs)));
    CHECK(std::abs(lhs) > 1e-4);
  }
  // non-self-dual ambient is rejected, not silently passed
  {
    MetricField f = catalog::generic4().field();
    HyperContext hc(f, coordinate_hyperplane(), q);
    CHECK_THROWS_AS(theorem8_identity(hc), precondition_error);
    CHECK_THROWS_AS(corollary_cotton_residual(hc), precondition_error);
  }
}

TEST_CASE("perturbative convergence of the Cotton identification") {
  // Quadratic truncations of an anti-self-dual metric: the anti-self-dual
  // Weyl half and the corollary residual both decay faster than eps^2.
  MetricManifest m = catalog::cp2_complexification();
  MetricField f = m.field();
  double resid[2] = {0.0, 0.0};
  double wminus[2] = {0.0, 0.0};
  const double epses[2] = {1e-2, 1e-3};
  for (int idx = 0; idx < 2; ++idx) {
    const double eps = epses[idx];
    MetricManifest pm = truncated_family(f, m.basepoint, eps);
    MetricField pf = pm.field();
    CurvatureContext c(pf.jets(pm.basepoint, 3), 1.0);
    wminus[idx] = c.weyl_minus_norm();
    HyperContext hc(pf, tilted_hyperplane(),
                    {cplx(0.1, 0.05), cplx(-0.08, 0.12), cplx(0.15, -0.06)}, 1.0);
    // preconditions hold only to the order the perturbation allows
    resid[idx] = corollary_cotton_residual(hc, /*selfdual_tol=*/1e-2 * eps,
                                           /*umbilic_tol=*/eps);
  }
  CHECK(wminus[0] < 1e-7);
  CHECK(wminus[1] < 1e-10);
  CHECK(resid[0] < 2e-6);
  CHECK(resid[1] < 2e-9);
  // decay at least quadratic in eps across the decade
  CHECK(resid[0] / std::max(resid[1], 1e-300) > 100.0);
}
