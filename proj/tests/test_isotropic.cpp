#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "holoconf/catalog.hpp"
#include "holoconf/geodesic.hpp"
#include "holoconf/isotropic.hpp"

using namespace holoconf;

namespace {

CurvatureContext ctx(const MetricManifest& m, const CVec& p) {
  return CurvatureContext(m.field().jets(p, 3), m.orientation);
}

/// Deterministic null vector from a pair of frame spinor factors.
CVec null_vector(const CurvatureContext& c, cplx x0, cplx x1, cplx e0, cplx e1) {
  const cplx I(0.0, 1.0);
  const cplx a = x0 * e0, b = x0 * e1, d = x1 * e0, e = x1 * e1;
  CVec vf = {0.5 * (a + e), (a - e) / (2.0 * I), 0.5 * (b - d), (b + d) / (2.0 * I)};
  return c.frame * vf;
}

}  // namespace

TEST_CASE("projective-plane chart: fixture planes classify as expected") {
  MetricManifest m = catalog::cp2_complexification();
  CurvatureContext c = ctx(m, CVec(4, cplx(0.0)));
  CHECK(classify_plane(c, cp2::slice_plane_point()[0], cp2::slice_plane_point()[1]).type == PlaneType::Alpha);
  CHECK(classify_plane(c, cp2::slice_plane_line()[0], cp2::slice_plane_line()[1]).type == PlaneType::Alpha);
  CHECK(classify_plane(c, cp2::mixed_plane()[0], cp2::mixed_plane()[1]).type == PlaneType::Beta);
  CHECK(classify_plane(c, cp2::generic_plane()[0], cp2::generic_plane()[1]).type == PlaneType::Alpha);
}

TEST_CASE("non-isotropic and degenerate spans are reported") {
  MetricManifest m = catalog::generic4();
  CurvatureContext c = ctx(m, m.basepoint);
  CVec e1 = {1, 0, 0, 0}, e2 = {0, 1, 0, 0};
  CHECK(classify_plane(c, e1, e2).type == PlaneType::NonIsotropic);
  CVec u = {1, 2, 0, 0}, v = {2, 4, 0, 0};
  CHECK(classify_plane(c, u, v).type == PlaneType::DegenerateSpan);
}

TEST_CASE("borderline isotropy raises instead of misclassifying") {
  MetricManifest m = catalog::flat4();
  CurvatureContext c = ctx(m, m.basepoint);
  // all pairings ~1e-6/6 relative: inside the rejection band [1e-8, 1e-6]
  const double eps = 1e-3;
  CVec u = {cplx(1.0), cplx(0.0, 1.0), cplx(eps), 0.0};
  CVec v = {cplx(1.0), cplx(0.0, 1.0), cplx(-eps), 0.0};
  CHECK_THROWS_AS(classify_plane(c, u, v), precondition_error);
}

TEST_CASE("isotropy residual") {
  MetricManifest m = catalog::flat4();
  CurvatureContext c = ctx(m, m.basepoint);
  CVec null = {cplx(1.0), cplx(0.0, 1.0), 0.0, 0.0};
  CHECK(isotropy_residual(c, null) < 1e-15);
  CVec unit = {1.0, 0.0, 0.0, 0.0};
  CHECK(isotropy_residual(c, unit) == doctest::Approx(1.0));
  CHECK_THROWS_AS(isotropy_residual(c, CVec(4, cplx(0.0))), precondition_error);
}

TEST_CASE("isotropic planes through a null vector, both families") {
  for (const char* name : {"generic4", "cp2_complexification", "flat4"}) {
    MetricManifest m = catalog::builtin(name);
    CurvatureContext c = ctx(m, m.basepoint);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      CVec v = null_vector(c, cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                           cplx(u(rng), u(rng)));
      INFO(name, " trial ", trial);
      REQUIRE(isotropy_residual(c, v) < 1e-12);
      for (PlaneType want : {PlaneType::Alpha, PlaneType::Beta}) {
        auto plane = isotropic_plane_through(c, v, want);
        CHECK(classify_plane(c, plane[0], plane[1]).type == want);
        // v lies in the plane
        CHECK(residual_mod_span(v, {plane[0], plane[1]}) < 1e-10);
      }
    }
  }
}

TEST_CASE("cone curvature: full tensor vs self-dual Weyl part on alpha planes") {
  // For X in an isotropic self-dual plane containing v, g(R(v,X)v,X)
  // reduces to the self-dual Weyl contribution alone; the anti-self-dual
  // statement mirrors it. Checked on a curved metric with both halves.
  MetricManifest m = catalog::generic4();
  CurvatureContext c = ctx(m, m.basepoint);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    CVec v = null_vector(c, cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                         cplx(u(rng), u(rng)));
    auto alpha = isotropic_plane_through(c, v, PlaneType::Alpha);
    CVec X((std::size_t)4, cplx(0.0));
    const cplx c1(u(rng), u(rng)), c2(u(rng), u(rng));
    for (int i = 0; i < 4; ++i) X[(std::size_t)i] = c1 * alpha[0][(std::size_t)i] + c2 * alpha[1][(std::size_t)i];
    ConeCurvaturePair pair = alpha_cone_curvature(c, v, X);
    CHECK(std::abs(pair.full - pair.weyl_plus) < 1e-10);

    auto beta = isotropic_plane_through(c, v, PlaneType::Beta);
    CVec Xb((std::size_t)4, cplx(0.0));
    for (int i = 0; i < 4; ++i) Xb[(std::size_t)i] = c1 * beta[0][(std::size_t)i] + c2 * beta[1][(std::size_t)i];
    CHECK(std::abs(c.riemann(v, Xb, v, Xb) - c.weyl_minus(v, Xb, v, Xb)) < 1e-10);
  }
}

TEST_CASE("self-dual example: cone curvature vanishes on anti-self-dual planes") {
  MetricManifest m = catalog::cp2_complexification();
  CurvatureContext c = ctx(m, m.basepoint);
  REQUIRE(c.weyl_minus_norm() < 1e-10);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    CVec v = null_vector(c, cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                         cplx(u(rng), u(rng)));
    auto beta = isotropic_plane_through(c, v, PlaneType::Beta);
    CVec Xb((std::size_t)4, cplx(0.0));
    const cplx c1(u(rng), u(rng)), c2(u(rng), u(rng));
    for (int i = 0; i < 4; ++i) Xb[(std::size_t)i] = c1 * beta[0][(std::size_t)i] + c2 * beta[1][(std::size_t)i];
    CHECK(std::abs(c.riemann(v, Xb, v, Xb)) < 1e-10);
  }
}
