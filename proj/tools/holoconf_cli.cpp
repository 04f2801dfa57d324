#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holoconf/verify.hpp"

namespace {

using namespace holoconf;

/// Parse a comma-separated list of complex scalars; each entry uses the
/// expression grammar ("0.3+0.1*i", "-2e-3", ...).
std::vector<cplx> parse_cvec(const std::string& s) {
  std::vector<cplx> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty()) throw precondition_error("empty component in vector literal");
    out.push_back(eval_value(parse(tok, 1), {cplx(0.0)}));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int read_threads_env() {
  const char* v = std::getenv("HOLOCONF_THREADS");
  if (!v) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (!end || *end != '\0' || n < 1)
    throw precondition_error("HOLOCONF_THREADS must be a positive integer");
  return (int)n;
}

int cmd_report(const std::string& metric, const std::string& point_str, double orientation) {
  MetricManifest man = catalog::resolve(metric);
  if (orientation != 0.0) man.orientation = orientation;
  CVec p = point_str.empty() ? man.basepoint : parse_cvec(point_str);
  if ((int)p.size() != man.n) throw precondition_error("--point has wrong dimension");
  std::printf("%s\n", curvature_report(man, p).dump(2).c_str());
  return 0;
}

int cmd_verify(const std::string& metric, const std::string& suite, int npoints, unsigned seed,
               double tol, double fd_step, double orientation, bool json) {
  MetricManifest man = catalog::resolve(metric);
  if (orientation != 0.0) man.orientation = orientation;
  VerificationSummary s = verify_suite(man, suite, npoints, seed, tol, fd_step);
  if (json) {
    std::printf("%s\n", s.to_json().dump(2).c_str());
  } else {
    std::printf("metric=%s suite=%s seed=%u points=%d\n", s.metric.c_str(), s.suite.c_str(),
                s.seed, s.points);
    std::vector<CheckResult> checks = s.checks;
    std::sort(checks.begin(), checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    for (const CheckResult& c : checks)
      std::printf("%-26s points=%-3d max_residual=%.6e tolerance=%.1e %s%s%s\n", c.id.c_str(),
                  c.points, c.max_residual, c.tolerance, c.pass ? "pass" : "FAIL",
                  c.note.empty() ? "" : "  # ", c.note.c_str());
    std::printf("overall: %s\n", s.all_pass() ? "pass" : "FAIL");
  }
  return s.all_pass() ? 0 : 1;
}

int cmd_trace(const std::string& metric, const std::string& x0_str, const std::string& v0_str,
              double t1, int steps) {
  MetricManifest man = catalog::resolve(metric);
  MetricField f = man.field();
  CVec x0 = x0_str.empty() ? man.basepoint : parse_cvec(x0_str);
  CVec v0 = parse_cvec(v0_str);
  if ((int)x0.size() != man.n || (int)v0.size() != man.n)
    throw precondition_error("--x0/--v0 have wrong dimension");
  FlowOptions opt;
  opt.steps = steps;
  FlowResult r = integrate_geodesic(f, x0, v0, t1, opt);

  std::printf("t");
  for (int i = 0; i < man.n; ++i) std::printf(",re_x%d,im_x%d", i + 1, i + 1);
  for (int i = 0; i < man.n; ++i) std::printf(",re_v%d,im_v%d", i + 1, i + 1);
  std::printf(",isotropy_residual\n");
  for (std::size_t s = 0; s < r.t.size(); ++s) {
    std::printf("%.17g", r.t[s]);
    for (int i = 0; i < man.n; ++i)
      std::printf(",%.17g,%.17g", r.x[s][(std::size_t)i].real(), r.x[s][(std::size_t)i].imag());
    for (int i = 0; i < man.n; ++i)
      std::printf(",%.17g,%.17g", r.v[s][(std::size_t)i].real(), r.v[s][(std::size_t)i].imag());
    double nv = vec_norm(r.v[s]);
    std::printf(",%.17g\n", std::abs(f.dot(r.x[s], r.v[s], r.v[s])) / std::max(1e-300, nv * nv));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holoconf: curvature identity checks for holomorphic conformal metrics"};
  app.require_subcommand(1);

  std::string metric = "builtin:flat4";
  std::string point, suite = "all", x0, v0;
  double orientation = 0.0, tol = 0.0, fd_step = 1e-4, t1 = 1.0;
  int npoints = 8, steps = 200;
  unsigned seed = 0;
  bool json = false, csv = false;

  CLI::App* rep = app.add_subcommand("report", "curvature snapshot at a point (JSON)");
  rep->add_option("--metric", metric, "builtin:<name> or path to a manifest");
  rep->add_option("--point", point, "comma-separated complex coordinates");
  rep->add_option("--orientation", orientation)->check(CLI::IsMember({1.0, -1.0}));
  rep->add_flag("--json", json, "output is JSON regardless");

  CLI::App* ver = app.add_subcommand("verify", "run an identity suite");
  ver->add_option("--metric", metric);
  ver->add_option("--suite", suite)
      ->check(CLI::IsMember({"core", "selfdual", "beta", "cone", "dim3", "umbilic", "all"}));
  ver->add_option("--points", npoints)->check(CLI::PositiveNumber);
  ver->add_option("--seed", seed);
  ver->add_option("--tol", tol, "override every check tolerance");
  ver->add_option("--fd-step", fd_step)->check(CLI::PositiveNumber);
  ver->add_option("--orientation", orientation)->check(CLI::IsMember({1.0, -1.0}));
  ver->add_flag("--json", json, "machine-readable summary");

  CLI::App* tra = app.add_subcommand("trace", "integrate a null geodesic (CSV)");
  tra->add_option("--metric", metric);
  tra->add_option("--x0", x0, "start point (defaults to the basepoint)");
  tra->add_option("--v0", v0, "initial velocity, must be isotropic")->required();
  tra->add_option("--t", t1, "parameter length");
  tra->add_option("--steps", steps)->check(CLI::PositiveNumber);
  tra->add_flag("--csv", csv, "output is CSV regardless");

  CLI11_PARSE(app, argc, argv);

  try {
    (void)read_threads_env();  // validated; the engine itself is single-threaded
    if (rep->parsed()) return cmd_report(metric, point, orientation);
    if (ver->parsed()) return cmd_verify(metric, suite, npoints, seed, tol, fd_step, orientation, json);
    if (tra->parsed()) return cmd_trace(metric, x0, v0, t1, steps);
  } catch (const singular_metric_error& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const numeric_abort& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
