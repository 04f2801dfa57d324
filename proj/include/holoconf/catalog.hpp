#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "holoconf/expr.hpp"
#include "holoconf/metric.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

using ordered_json = nlohmann::ordered_json;

/// On-disk description of a metric: component expressions plus the data the
/// verification pipeline needs (orientation choice, a known-good basepoint).
struct MetricManifest {
  int schema_version = 1;
  std::string name;
  int n = 0;
  std::vector<std::string> coordinates;
  std::vector<std::string> g_upper;  // row-major upper triangle, n(n+1)/2
  std::string conformal_factor;      // empty = none
  double orientation = 1.0;
  CVec basepoint;
  ordered_json metadata = ordered_json::object();

  MetricField field() const {
    std::vector<HoloExpr> comps;
    comps.reserve(g_upper.size());
    for (const std::string& s : g_upper) comps.push_back(parse(s, n));
    MetricField f(n, std::move(comps));
    if (!conformal_factor.empty()) f.set_conformal_factor(parse(conformal_factor, n));
    return f;
  }

  ordered_json to_json() const {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["n"] = n;
    j["coordinates"] = coordinates;
    j["g"] = g_upper;
    j["conformal_factor"] = conformal_factor;
    j["orientation"] = orientation;
    ordered_json bp = ordered_json::array();
    for (const cplx& z : basepoint) bp.push_back({z.real(), z.imag()});
    j["basepoint"] = bp;
    j["metadata"] = metadata;
    return j;
  }

  static MetricManifest from_json(const ordered_json& j) {
    MetricManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.name = j.at("name").get<std::string>();
    m.n = j.at("n").get<int>();
    m.coordinates = j.at("coordinates").get<std::vector<std::string>>();
    m.g_upper = j.at("g").get<std::vector<std::string>>();
    m.conformal_factor = j.value("conformal_factor", std::string());
    m.orientation = j.value("orientation", 1.0);
    for (const auto& p : j.at("basepoint"))
      m.basepoint.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    m.metadata = j.value("metadata", ordered_json::object());
    if (m.n < 2 || m.n > 4) throw precondition_error("manifest dimension out of range");
    if (static_cast<int>(m.g_upper.size()) != m.n * (m.n + 1) / 2)
      throw precondition_error("manifest component count mismatch");
    if (static_cast<int>(m.basepoint.size()) != m.n) throw precondition_error("manifest basepoint dimension mismatch");
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw precondition_error("cannot write manifest: " + path);
    out << to_json().dump(2) << "\n";
  }

  static MetricManifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot read manifest: " + path);
    ordered_json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw parse_error(std::string("manifest JSON: ") + e.what(), 0);
    }
    return from_json(j);
  }
};

namespace catalog {

inline std::vector<std::string> coord_names(int n) {
  std::vector<std::string> c;
  for (int i = 1; i <= n; ++i) c.push_back("z" + std::to_string(i));
  return c;
}

inline MetricManifest flat3() {
  MetricManifest m;
  m.name = "flat3";
  m.n = 3;
  m.coordinates = coord_names(3);
  m.g_upper = {"1", "0", "0", "1", "0", "1"};
  m.basepoint = {cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, -0.3)};
  m.metadata["description"] = "flat holomorphic metric on C^3";
  return m;
}

inline MetricManifest flat4() {
  MetricManifest m;
  m.name = "flat4";
  m.n = 4;
  m.coordinates = coord_names(4);
  m.g_upper = {"1", "0", "0", "0", "1", "0", "0", "1", "0", "1"};
  m.basepoint = {cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, -0.3), cplx(-0.4, -0.2)};
  m.metadata["description"] = "flat holomorphic metric on C^4";
  return m;
}

inline MetricManifest conf_flat4() {
  MetricManifest m = flat4();
  m.name = "conf_flat4";
  m.conformal_factor = "z1*z2";
  m.metadata["description"] = "conformally flat: exp(2*z1*z2) times the flat metric";
  return m;
}

inline MetricManifest round3() {
  MetricManifest m;
  m.name = "round3";
  m.n = 3;
  m.coordinates = coord_names(3);
  const std::string f = "(1 + 0.25*(z1^2 + z2^2 + z3^2))^-2";
  m.g_upper = {f, "0", "0", f, "0", f};
  m.basepoint = {cplx(0.2, 0.05), cplx(-0.1, 0.15), cplx(0.25, -0.1)};
  m.metadata["description"] = "constant-curvature 3-metric (stereographic chart of the unit sphere)";
  return m;
}

/// Flat metric plus frozen low-degree polynomial perturbations; curvature is
/// generic (no special symmetry, both duality halves of the Weyl tensor
/// nonzero in dimension 4).
inline MetricManifest generic3() {
  MetricManifest m;
  m.n = 3;
  m.name = "generic3";
  m.coordinates = coord_names(3);
  m.g_upper = {
      "1 + 0.11*z2^2 + 0.07*z2*z3",
      "0.06*z3^2 + 0.04*z1*z3",
      "0.05*z1*z2 + 0.03*z3^2",
      "1 + 0.09*z1*z3 + 0.05*z1^2",
      "0.07*z1^2 + 0.02*z2*z3",
      "1 + 0.1*z1*z2 + 0.06*z2^2",
  };
  m.basepoint = {cplx(0.12, 0.05), cplx(-0.08, 0.11), cplx(0.21, -0.07)};
  m.metadata["description"] = "flat + frozen quadratic perturbation, generic curvature";
  return m;
}

inline MetricManifest generic4() {
  MetricManifest m;
  m.n = 4;
  m.name = "generic4";
  m.coordinates = coord_names(4);
  m.g_upper = {
      "1 + 0.11*z2^2 + 0.07*z3*z4",
      "0.06*z3^2 + 0.04*z1*z4",
      "0.05*z2*z4 + 0.03*z1^2",
      "0.08*z2*z3 + 0.02*z4^2",
      "1 + 0.09*z1*z3 + 0.05*z4^2",
      "0.07*z1*z4 + 0.03*z2^2",
      "0.04*z1*z2 + 0.06*z3^2",
      "1 + 0.1*z1*z2 + 0.06*z4^2",
      "0.05*z1^2 + 0.07*z2*z4",
      "1 + 0.08*z1^2 + 0.04*z2*z3",
  };
  m.basepoint = {cplx(0.12, 0.05), cplx(-0.08, 0.11), cplx(0.21, -0.07), cplx(-0.14, -0.09)};
  m.metadata["description"] = "flat + frozen quadratic perturbation, generic curvature";
  return m;
}

/// Holomorphic extension of the Fubini-Study geometry of the complex
/// projective plane, written in an affine chart where points are encoded by
/// a projective point A = [1 : z1 : z2] and a line a = {w0 + z3 w1 + z4 w2 = 0}
/// not through A. With D = 1 + z1 z3 + z2 z4 the only nonzero components
/// couple the two factors:
///   g(d/dz_i, d/dz_{j+2}) = -delta_ij / D + z_{j+2} z_i / D^2.
inline MetricManifest cp2_complexification() {
  MetricManifest m;
  m.n = 4;
  m.name = "cp2_complexification";
  m.coordinates = coord_names(4);
  const std::string D = "(1 + z1*z3 + z2*z4)";
  m.g_upper = {
      "0", "0",
      "-1/" + D + " + z3*z1/" + D + "^2",
      "z3*z2/" + D + "^2",
      "0",
      "z4*z1/" + D + "^2",
      "-1/" + D + " + z4*z2/" + D + "^2",
      "0", "0", "0",
  };
  m.orientation = 1.0;
  m.basepoint = {cplx(0.1, 0.02), cplx(-0.07, 0.05), cplx(0.13, -0.04), cplx(0.06, 0.09)};
  m.metadata["description"] =
      "holomorphic metric on the space of (point, non-incident line) pairs in the projective plane";
  return m;
}

inline std::vector<std::string> builtin_names() {
  return {"flat3", "flat4", "conf_flat4", "round3", "generic3", "generic4", "cp2_complexification"};
}

inline MetricManifest builtin(const std::string& name) {
  if (name == "flat3") return flat3();
  if (name == "flat4") return flat4();
  if (name == "conf_flat4") return conf_flat4();
  if (name == "round3") return round3();
  if (name == "generic3") return generic3();
  if (name == "generic4") return generic4();
  if (name == "cp2_complexification") return cp2_complexification();
  throw precondition_error("unknown builtin metric: " + name);
}

/// Resolve "builtin:<name>" or a filesystem path.
inline MetricManifest resolve(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return builtin(spec.substr(prefix.size()));
  return MetricManifest::load(spec);
}

}  // namespace catalog

/// Fixture data around the projective-plane example used by several checks.
namespace cp2 {

/// At the zero point of the chart the metric is [[0,-I],[-I,0]]; the two
/// chart-factor slices are isotropic planes.
inline std::array<CVec, 2> slice_plane_point() {
  return {CVec{1, 0, 0, 0}, CVec{0, 1, 0, 0}};
}
inline std::array<CVec, 2> slice_plane_line() {
  return {CVec{0, 0, 1, 0}, CVec{0, 0, 0, 1}};
}
/// A mixed isotropic plane of the opposite duality type at the origin.
inline std::array<CVec, 2> mixed_plane() {
  return {CVec{1, 0, 0, 0}, CVec{0, 0, 0, 1}};
}
/// A generic isotropic plane at the origin, not aligned with the chart axes.
inline std::array<CVec, 2> generic_plane() {
  return {CVec{1, 0, 0, 1}, CVec{0, 1, -1, 0}};
}

/// Parameterized totally geodesic surface {z1 = 0, z4 = 0}: the chart slice
/// where the moving line stays in a fixed pencil. Surface parameters are
/// written z1, z2 (the expression grammar has no separate parameter names).
inline std::vector<HoloExpr> beta_surface_exprs() {
  return {parse("0", 2), parse("z1", 2), parse("z2", 2), parse("0", 2)};
}

}  // namespace cp2

}  // namespace holoconf
