#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "holoconf/catalog.hpp"
#include "holoconf/conformal3.hpp"
#include "holoconf/curvature.hpp"
#include "holoconf/geodesic.hpp"
#include "holoconf/isotropic.hpp"
#include "holoconf/surface.hpp"

namespace holoconf {

inline constexpr const char* kToolVersion = "0.1.0";

struct CheckResult {
  std::string id;
  int points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;

  ordered_json to_json() const {
    ordered_json j;
    j["id"] = id;
    j["points"] = points;
    j["max_residual"] = max_residual;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["note"] = note;
    return j;
  }
};

struct VerificationSummary {
  std::string metric;
  std::string suite;
  unsigned seed = 0;
  int points = 0;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const CheckResult& c : checks)
      if (!c.pass) return false;
    return true;
  }

  ordered_json to_json() const {
    std::vector<CheckResult> sorted = checks;
    std::sort(sorted.begin(), sorted.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    ordered_json j;
    j["schema_version"] = 1;
    j["tool_version"] = kToolVersion;
    j["metric"] = metric;
    j["suite"] = suite;
    j["seed"] = seed;
    j["points"] = points;
    j["pass"] = all_pass();
    ordered_json arr = ordered_json::array();
    for (const CheckResult& c : sorted) arr.push_back(c.to_json());
    j["checks"] = arr;
    return j;
  }
};

namespace detail_verify {

inline cplx rand_cplx(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  const double re = U(rng);
  const double im = U(rng);
  return cplx(re, im);
}

inline std::vector<CVec> sample_points(const MetricManifest& m, int npoints,
                                       std::mt19937_64& rng) {
  std::vector<CVec> out;
  out.reserve((std::size_t)npoints);
  for (int s = 0; s < npoints; ++s) {
    CVec p = m.basepoint;
    for (auto& z : p) z += rand_cplx(rng, 0.08);
    out.push_back(std::move(p));
  }
  return out;
}

/// Known anti-self-dual-plane surface fixture for a builtin metric, together
/// with the ambient coordinate slots that carry the two chart parameters.
struct BetaFixture {
  std::vector<HoloExpr> sigma;
  int chart0, chart1;
};

inline std::optional<BetaFixture> beta_fixture(const MetricManifest& m) {
  if (m.name == "cp2_complexification") return BetaFixture{cp2::beta_surface_exprs(), 1, 2};
  if (m.name == "flat4" || m.name == "conf_flat4")
    return BetaFixture{
        {parse("z1", 2), parse("i*z1", 2), parse("z2", 2), parse("i*z2", 2)}, 0, 2};
  return std::nullopt;
}

inline Hypersurface tilted_hyperplane() {
  return Hypersurface(
      {parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("0.3*z1 - 0.2*z2 + 0.4*z3", 3)});
}

inline Hypersurface coordinate_hyperplane() {
  return Hypersurface({parse("z1", 3), parse("z2", 3), parse("z3", 3), parse("0", 3)});
}

}  // namespace detail_verify

/// Run the named identity suite against a metric manifest. Suites:
///   core     curvature symmetries, curvature reassembly, divergence identity
///   selfdual duality ratio and the split divergence identities (n = 4)
///   beta     Thomas tensor, Cotton factor, cross-ratio law on a fixture
///   cone     two-path cone-curvature identity on random isotropic planes
///   dim3     star-conjugation identity and Cotton FD oracle (n = 3)
///   umbilic  hypersurface frame identities and normal-derivative checks
///   all      everything applicable
/// tol_override > 0 replaces every check tolerance.
inline VerificationSummary verify_suite(const MetricManifest& man, const std::string& suite,
                                        int npoints, unsigned seed, double tol_override = 0.0,
                                        double fd_step = 1e-4) {
  static const std::vector<std::string> known = {"core",  "selfdual", "beta",   "cone",
                                                 "dim3",  "umbilic",  "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    throw precondition_error("unknown suite: " + suite);
  const bool all = suite == "all";
  auto want = [&](const char* s) { return all || suite == s; };

  VerificationSummary sum;
  sum.metric = man.name;
  sum.suite = suite;
  sum.seed = seed;
  sum.points = npoints;

  MetricField f = man.field();
  std::mt19937_64 rng(seed);
  const std::vector<CVec> pts = detail_verify::sample_points(man, npoints, rng);

  auto tol = [&](double def) { return tol_override > 0.0 ? tol_override : def; };
  auto add = [&](CheckResult c) {
    c.pass = c.points == 0 ? c.pass : c.max_residual <= c.tolerance;
    sum.checks.push_back(std::move(c));
  };
  auto skip = [&](const char* id, const char* why) {
    CheckResult c;
    c.id = id;
    c.note = why;
    sum.checks.push_back(std::move(c));
  };

  // cached contexts at the sample points
  std::vector<CurvatureContext> ctx;
  ctx.reserve(pts.size());
  for (const CVec& p : pts) ctx.emplace_back(f.jets(p, 3), man.orientation);

  if (want("core")) {
    CheckResult sym{.id = "core.symmetries", .points = npoints, .tolerance = tol(1e-8)};
    CheckResult rea{.id = "core.reassembly", .points = npoints, .tolerance = tol(1e-8)};
    // the Weyl tensor vanishes identically below dimension 4, so the
    // divergence identity only says something for n = 4
    CheckResult divc{.id = "core.divw_cotton", .points = man.n == 4 ? npoints : 0,
                     .tolerance = tol(1e-7)};
    if (man.n != 4) divc.note = "needs dimension 4";
    for (const CurvatureContext& c : ctx) {
      double rscale = 1.0, worst = 0.0, cscale = 1.0, cworst = 0.0;
      const int n = c.n;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              rscale = std::max(rscale, std::abs(c.R4(i, j, k, l)));
              worst = std::max({worst, std::abs(c.R4(i, j, k, l) + c.R4(j, i, k, l)),
                                std::abs(c.R4(i, j, k, l) - c.R4(k, l, i, j)),
                                std::abs(c.R4(i, j, k, l) + c.R4(j, k, i, l) + c.R4(k, i, j, l))});
            }
            if (man.n == 4) {
              cscale = std::max(cscale, std::abs(c.cotton(i, j, k)));
              cworst = std::max(cworst, std::abs(c.divW(i, j, k) - c.cotton(i, j, k)));
            }
          }
      sym.max_residual = std::max(sym.max_residual, worst / rscale);
      rea.max_residual = std::max(rea.max_residual, c.reassembly_residual());
      divc.max_residual = std::max(divc.max_residual, cworst / cscale);
    }
    add(sym);
    add(rea);
    add(divc);
  }

  if (want("selfdual")) {
    if (man.n != 4) {
      skip("selfdual.ratio", "needs dimension 4");
    } else {
      CheckResult ratio{.id = "selfdual.ratio", .points = npoints, .tolerance = tol(1e-7)};
      CheckResult dwp{.id = "selfdual.divw_plus", .points = npoints, .tolerance = tol(1e-7)};
      CheckResult dwm{.id = "selfdual.divw_minus", .points = npoints, .tolerance = tol(1e-7)};
      for (const CurvatureContext& c : ctx) {
        const double scale = std::max({c.weyl_plus_norm(), c.M6.frobenius(), 1.0});
        ratio.max_residual = std::max(ratio.max_residual, c.weyl_minus_norm() / scale);
        const Ten cp = cotton_split(c, +1), cm = cotton_split(c, -1);
        double csc = 1.0, wp = 0.0, wm = 0.0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
              csc = std::max(csc, std::abs(c.cotton(i, j, k)));
              wp = std::max(wp, std::abs(c.divWplus(i, j, k) - cp(i, j, k)));
              wm = std::max(wm, std::abs(c.divWminus(i, j, k) - cm(i, j, k)));
            }
        dwp.max_residual = std::max(dwp.max_residual, wp / csc);
        dwm.max_residual = std::max(dwm.max_residual, wm / csc);
      }
      add(ratio);
      add(dwp);
      add(dwm);
    }
  }

  if (want("beta")) {
    auto fx = detail_verify::beta_fixture(man);
    if (!fx) {
      skip("beta.thomas", "no anti-self-dual surface fixture for this metric");
    } else {
      EmbeddedSurface S(fx->sigma);
      CheckResult tho{.id = "beta.thomas", .points = npoints, .tolerance = tol(1e-6)};
      CheckResult cf{.id = "beta.cotton_factor", .points = npoints, .tolerance = tol(1e-7)};
      for (int s = 0; s < npoints; ++s) {
        CVec sp = {detail_verify::rand_cplx(rng, 0.25), detail_verify::rand_cplx(rng, 0.25)};
        SurfaceContext sc(f, S, sp, man.orientation);
        tho.max_residual = std::max(tho.max_residual, sc.thomas_norm());
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c2 = 0; c2 < 2; ++c2)
              cf.max_residual =
                  std::max(cf.max_residual,
                           std::abs(sc.thomas(a, b, c2) - 3.0 * sc.ambient_cotton(a, b, c2)));
      }
      add(tho);
      add(cf);

      CheckResult cr{.id = "beta.cross_ratio", .points = 5, .tolerance = tol(1e-6)};
      for (int run = 0; run < 5; ++run) {
        CVec s0 = {detail_verify::rand_cplx(rng, 0.25), detail_verify::rand_cplx(rng, 0.25)};
        CVec dir = {detail_verify::rand_cplx(rng, 0.6), detail_verify::rand_cplx(rng, 0.6)};
        // ambient start point and velocity through the surface chart
        std::vector<Jet> sj;
        for (const HoloExpr& e : fx->sigma) sj.push_back(eval_jet(e, s0, 1));
        CVec x0(4), v0(4, cplx(0.0));
        for (int i = 0; i < 4; ++i) {
          x0[(std::size_t)i] = sj[(std::size_t)i].value;
          for (int a = 0; a < 2; ++a)
            v0[(std::size_t)i] += sj[(std::size_t)i].d1(a) * dir[(std::size_t)a];
        }
        FlowOptions opt;
        opt.steps = 120;
        FlowResult r = integrate_geodesic(f, x0, v0, 1.0, opt);
        const std::size_t picks[3] = {0, 48, 108};
        ProjPoint A[3], L[3];
        for (int k = 0; k < 3; ++k) {
          A[k] = ProjPoint{r.x[picks[k]][(std::size_t)fx->chart0], 1.0};
          L[k] = ProjPoint{r.x[picks[k]][(std::size_t)fx->chart1], 1.0};
        }
        const ProjPoint inf{1.0, 0.0};
        const cplx lhs = cross_ratio(A[0], A[1], A[2], inf);
        const cplx rhs = cross_ratio(L[0], L[1], L[2], inf);
        cr.max_residual =
            std::max(cr.max_residual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
      add(cr);
    }
  }

  if (want("cone")) {
    if (man.n != 4) {
      skip("cone.two_path", "needs dimension 4");
    } else {
      CheckResult two{.id = "cone.two_path", .points = npoints, .tolerance = tol(1e-8)};
      for (const CurvatureContext& c : ctx) {
        // random null vector through its spinor factorization
        const cplx I(0.0, 1.0);
        const cplx xi0 = 1.0, xi1 = detail_verify::rand_cplx(rng, 1.0);
        const cplx eta0 = detail_verify::rand_cplx(rng, 1.0) + 0.5,
                   eta1 = detail_verify::rand_cplx(rng, 1.0);
        CVec w(4);
        const cplx a = xi0 * eta0, b = xi0 * eta1, c2 = xi1 * eta0, d = xi1 * eta1;
        w[0] = 0.5 * (a + d);
        w[1] = (a - d) / (2.0 * I);
        w[2] = 0.5 * (b - c2);
        w[3] = (b + c2) / (2.0 * I);
        const CVec v = c.frame * w;
        auto plane = isotropic_plane_through(c, v, PlaneType::Alpha);
        const CVec& X = residual_mod_span(plane[0], {v}) > residual_mod_span(plane[1], {v})
                            ? plane[0]
                            : plane[1];
        ConeCurvaturePair pair = alpha_cone_curvature(c, v, X);
        two.max_residual =
            std::max(two.max_residual,
                     std::abs(pair.full - pair.weyl_plus) / std::max(1.0, std::abs(pair.full)));
      }
      add(two);
    }
  }

  if (want("dim3")) {
    if (man.n != 3) {
      skip("dim3.star_r", "needs dimension 3");
    } else {
      CheckResult star{.id = "dim3.star_r", .points = npoints, .tolerance = tol(1e-8)};
      for (const CurvatureContext& c : ctx)
        star.max_residual = std::max(star.max_residual, star_r_residual(c));
      add(star);

      CheckResult fd{.id = "dim3.cotton_fd", .points = 1, .tolerance = tol(1e-5)};
      const CVec& p = man.basepoint;
      CurvatureContext c(f.jets(p, 3));
      Ten dh_fd(3, 3);
      for (int mdir = 0; mdir < 3; ++mdir) {
        CVec pp = p, pm = p;
        pp[(std::size_t)mdir] += fd_step;
        pm[(std::size_t)mdir] -= fd_step;
        CurvatureContext cp(f.jets(pp, 3)), cm(f.jets(pm, 3));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            dh_fd(mdir, i, j) = (cp.hten(i, j) - cm.hten(i, j)) / (2.0 * fd_step);
      }
      auto nabla = [&](int a2, int b2, int c2) {
        cplx s = dh_fd(a2, b2, c2);
        for (int d = 0; d < 3; ++d)
          s -= c.Gamma(d, a2, b2) * c.hten(d, c2) + c.Gamma(d, a2, c2) * c.hten(b2, d);
        return s;
      };
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            fd.max_residual = std::max(
                fd.max_residual, std::abs(c.cotton(i, j, k) - (nabla(i, j, k) - nabla(j, i, k))));
      add(fd);
    }
  }

  if (want("umbilic")) {
    if (man.n != 4) {
      skip("umbilic.w1", "needs dimension 4");
    } else {
      CheckResult w1{.id = "umbilic.w1", .points = npoints, .tolerance = tol(1e-7)};
      Hypersurface tilt = detail_verify::tilted_hyperplane();
      for (int s = 0; s < npoints; ++s) {
        CVec q = {detail_verify::rand_cplx(rng, 0.12), detail_verify::rand_cplx(rng, 0.12),
                  detail_verify::rand_cplx(rng, 0.12)};
        try {
          HyperContext hc(f, tilt, q, man.orientation);
          const cplx lhs = hc.amb.weyl_plus(hc.X, hc.Y, hc.Z, hc.X);
          const cplx rhs = 0.5 * (hc.amb.riemann(hc.X, hc.Y, hc.Y, hc.nu) +
                                  hc.amb.riemann(hc.Z, hc.X, hc.Z, hc.nu));
          w1.max_residual =
              std::max(w1.max_residual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        } catch (const std::exception& e) {
          w1.note = e.what();
          w1.max_residual = std::max(w1.max_residual, 1.0);
        }
      }
      add(w1);

      CheckResult t8{.id = "umbilic.theorem8_trivial", .points = 1, .tolerance = tol(1e-10)};
      try {
        CVec q = {cplx(0.12, 0.04), cplx(-0.07, 0.09), cplx(0.05, -0.11)};
        HyperContext hc(f, detail_verify::coordinate_hyperplane(), q, man.orientation);
        Theorem8Result r = theorem8_identity(hc);
        t8.max_residual = std::abs(r.lhs - r.rhs);
        add(t8);
      } catch (const std::exception& e) {
        t8.points = 0;
        t8.note = std::string("not applicable here: ") + e.what();
        sum.checks.push_back(std::move(t8));
      }

      CheckResult wit{.id = "umbilic.witness"};
      wit.note = "unverified — no desk-scale witness metric";
      sum.checks.push_back(std::move(wit));
    }
  }

  return sum;
}

inline ordered_json cplx_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

/// Curvature snapshot of a metric at one point, serialized with every
/// complex number as a [re, im] pair.
inline ordered_json curvature_report(const MetricManifest& man, const CVec& point) {
  MetricField f = man.field();
  CurvatureContext c(f.jets(point, 3), man.orientation);
  ordered_json j;
  j["schema_version"] = 1;
  j["tool_version"] = kToolVersion;
  j["metric"] = man.name;
  j["n"] = man.n;
  j["orientation"] = man.orientation;
  ordered_json pt = ordered_json::array();
  for (cplx z : point) pt.push_back(cplx_json(z));
  j["point"] = pt;
  j["scal"] = cplx_json(c.Scal);
  auto mat = [&](const CMat& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < c.n; ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < c.n; ++k) row.push_back(cplx_json(m(i, k)));
      rows.push_back(row);
    }
    return rows;
  };
  j["g"] = mat(c.g);
  j["ric"] = mat(c.Ric);
  j["schouten"] = mat(c.hten);
  double cnorm = 0.0;
  for (int i = 0; i < c.n; ++i)
    for (int k = 0; k < c.n; ++k)
      for (int l = 0; l < c.n; ++l) cnorm += std::norm(c.cotton(i, k, l));
  j["cotton_norm"] = std::sqrt(cnorm);
  if (c.n == 4) {
    j["weyl_plus_norm"] = c.weyl_plus_norm();
    j["weyl_minus_norm"] = c.weyl_minus_norm();
    j["reassembly_residual"] = c.reassembly_residual();
  }
  return j;
}

}  // namespace holoconf
