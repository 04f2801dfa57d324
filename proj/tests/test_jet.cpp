#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "holoconf/jet.hpp"
#include "holoconf/metric.hpp"

using namespace holoconf;

namespace {
bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("variables and constants") {
  Jet x = Jet::variable(0, cplx(2.0, 1.0), 2, 3);
  CHECK(close(x.value, cplx(2.0, 1.0)));
  CHECK(close(x.d1(0), 1.0));
  CHECK(close(x.d1(1), 0.0));
  CHECK(close(x.d2(0, 0), 0.0));
  Jet c = Jet::constant(cplx(0.0, 5.0), 2, 3);
  CHECK(close(c.value, cplx(0.0, 5.0)));
  CHECK(close(c.d1(0), 0.0));
}

TEST_CASE("Leibniz product on a known polynomial") {
  // f = z1^2 * z2 at (3, -2): check all derivatives against hand values.
  const cplx z1 = 3.0, z2 = -2.0;
  Jet x = Jet::variable(0, z1, 2, 3);
  Jet y = Jet::variable(1, z2, 2, 3);
  Jet f = x * x * y;
  CHECK(close(f.value, z1 * z1 * z2));
  CHECK(close(f.d1(0), 2.0 * z1 * z2));
  CHECK(close(f.d1(1), z1 * z1));
  CHECK(close(f.d2(0, 0), 2.0 * z2));
  CHECK(close(f.d2(0, 1), 2.0 * z1));
  CHECK(close(f.d2(1, 0), 2.0 * z1));
  CHECK(close(f.d2(1, 1), 0.0));
  CHECK(close(f.d3(0, 0, 1), 2.0));
  CHECK(close(f.d3(0, 0, 0), 0.0));
}

TEST_CASE("exp of a product") {
  // f = exp(z1*z2) at (1,2): value e^2, df = (2e^2, e^2), d2(0,1) = 3e^2.
  Jet x = Jet::variable(0, 1.0, 2, 3);
  Jet y = Jet::variable(1, 2.0, 2, 3);
  Jet f = jet_exp(x * y);
  const cplx e2 = std::exp(cplx(2.0));
  CHECK(close(f.value, e2, 1e-10));
  CHECK(close(f.d1(0), 2.0 * e2, 1e-10));
  CHECK(close(f.d1(1), e2, 1e-10));
  CHECK(close(f.d2(0, 1), 3.0 * e2, 1e-10));
  CHECK(close(f.d3(0, 0, 1), (2.0 + 2.0 + 4.0) * e2, 1e-9));  // d/dz1 of (1+z1z2)z2 e^{z1z2}
}

TEST_CASE("derivative tensors are symmetric") {
  Jet x = Jet::variable(0, cplx(0.3, 0.2), 3, 3);
  Jet y = Jet::variable(1, cplx(-0.4, 0.1), 3, 3);
  Jet z = Jet::variable(2, cplx(0.5, -0.6), 3, 3);
  Jet f = jet_sin(x * y) * jet_exp(z) + jet_sqrt(cplx(2.0) + x * x + y * z);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(close(f.d2(i, j), f.d2(j, i), 1e-12));
      for (int k = 0; k < 3; ++k) {
        CHECK(close(f.d3(i, j, k), f.d3(j, i, k), 1e-12));
        CHECK(close(f.d3(i, j, k), f.d3(i, k, j), 1e-12));
      }
    }
}

TEST_CASE("reciprocal and division") {
  Jet x = Jet::variable(0, cplx(2.0, -1.0), 1, 3);
  Jet r = (cplx(1.0) + x * x).reciprocal();
  Jet check = r * (cplx(1.0) + x * x);
  CHECK(close(check.value, 1.0, 1e-12));
  CHECK(close(check.d1(0), 0.0, 1e-12));
  CHECK(close(check.d2(0, 0), 0.0, 1e-12));
  CHECK(close(check.d3(0, 0, 0), 0.0, 1e-11));
  CHECK_THROWS_AS(Jet::constant(0.0, 1, 2).reciprocal(), eval_error);
}

TEST_CASE("sqrt, log, powi consistency") {
  Jet x = Jet::variable(0, cplx(1.5, 0.7), 1, 4);
  Jet u = cplx(1.0) + x * x;
  Jet s = jet_sqrt(u);
  Jet s2 = s * s;
  CHECK(close(s2.value, u.value, 1e-12));
  CHECK(close(s2.d2(0, 0), u.d2(0, 0), 1e-11));
  CHECK(close(s2.d4(0, 0, 0, 0), u.d4(0, 0, 0, 0), 1e-10));

  Jet l = jet_log(u);
  Jet el = jet_exp(l);
  CHECK(close(el.value, u.value, 1e-12));
  CHECK(close(el.d3(0, 0, 0), u.d3(0, 0, 0), 1e-10));

  Jet p = jet_powi(u, -2);
  Jet q = (u * u).reciprocal();
  CHECK(close(p.value, q.value, 1e-12));
  CHECK(close(p.d2(0, 0), q.d2(0, 0), 1e-10));

  CHECK_THROWS_AS(jet_sqrt(Jet::constant(0.0, 1, 2)), eval_error);
  CHECK_THROWS_AS(jet_log(Jet::constant(0.0, 1, 2)), eval_error);
}

TEST_CASE("jet_partial shifts derivative levels") {
  Jet x = Jet::variable(0, cplx(0.4, 0.1), 2, 4);
  Jet y = Jet::variable(1, cplx(-0.3, 0.2), 2, 4);
  Jet f = jet_exp(x * y) + x * x * x;
  Jet fx = jet_partial(f, 0);
  CHECK(fx.order() == 3);
  CHECK(close(fx.value, f.d1(0), 1e-13));
  CHECK(close(fx.d1(1), f.d2(0, 1), 1e-13));
  CHECK(close(fx.d2(1, 1), f.d3(0, 1, 1), 1e-13));
  CHECK(close(fx.d3(0, 1, 1), f.d4(0, 0, 1, 1), 1e-13));
}

TEST_CASE("multivariate composition matches direct expansion") {
  // f(z) = z1^2 * z2, z1 = s1 + s2^2, z2 = s1 * s2 — compose through jets
  // and compare against jets of the substituted polynomial.
  const cplx s1(0.7, -0.2), s2(0.4, 0.3);
  Jet a = Jet::variable(0, s1, 2, 4);
  Jet b = Jet::variable(1, s2, 2, 4);
  Jet z1 = a + b * b;
  Jet z2 = a * b;
  Jet direct = z1 * z1 * z2;

  // Ambient jet of f at (z1(s), z2(s)).
  Jet u = Jet::variable(0, z1.value, 2, 4);
  Jet v = Jet::variable(1, z2.value, 2, 4);
  Jet f = u * u * v;
  Jet pulled = compose_multivariate(f, {z1, z2});

  CHECK(close(pulled.value, direct.value, 1e-12));
  for (int i = 0; i < 2; ++i) {
    CHECK(close(pulled.d1(i), direct.d1(i), 1e-12));
    for (int j = 0; j < 2; ++j) {
      CHECK(close(pulled.d2(i, j), direct.d2(i, j), 1e-11));
      for (int k = 0; k < 2; ++k) {
        CHECK(close(pulled.d3(i, j, k), direct.d3(i, j, k), 1e-11));
        for (int l = 0; l < 2; ++l) CHECK(close(pulled.d4(i, j, k, l), direct.d4(i, j, k, l), 1e-10));
      }
    }
  }
}
