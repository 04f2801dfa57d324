#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "holoconf/curvature.hpp"
#include "holoconf/metric.hpp"
#include "holoconf/types.hpp"

namespace holoconf {

/// Christoffel symbols alone (order-1 metric jets suffice).
inline Ten christoffel(const MetricField& f, const CVec& p) {
  MetricJets mj = f.jets(p, 1);
  const int n = mj.n;
  CMat gi = inverse(mj.matrix());
  Ten G(n, 3);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < n; ++l)
          s += gi(k, l) * (mj.g1(i, j, l) + mj.g1(j, i, l) - mj.g1(l, i, j));
        G(k, i, j) = 0.5 * s;
      }
  return G;
}

/// Christoffel symbols, their first partials, and the (1,3) curvature
/// (order-2 metric jets). Cheaper than a full CurvatureContext; used by the
/// flow integrators which evaluate at every RK4 stage.
struct ConnectionData {
  int n = 0;
  Ten Gamma;   // (k,i,j)
  Ten dGamma;  // (m,k,i,j)
  Ten Riem;    // (l,i,j,k): component l of R(di,dj)dk
  CMat g;
};

inline ConnectionData connection_data(const MetricField& f, const CVec& p) {
  MetricJets mj = f.jets(p, 2);
  const int n = mj.n;
  ConnectionData c;
  c.n = n;
  c.g = mj.matrix();
  CMat gi = inverse(c.g);
  Ten gi1(n, 3);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += gi(i, a) * mj.g1(k, a, b) * gi(b, j);
        gi1(k, i, j) = -s;
      }
  c.Gamma = Ten(n, 3);
  c.dGamma = Ten(n, 4);
  auto A = [&](int l, int i, int j) { return mj.g1(i, j, l) + mj.g1(j, i, l) - mj.g1(l, i, j); };
  auto dA = [&](int m, int l, int i, int j) {
    return mj.g2(m, i, j, l) + mj.g2(m, j, i, l) - mj.g2(m, l, i, j);
  };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0.0, ds = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * A(l, i, j);
        c.Gamma(k, i, j) = 0.5 * s;
        for (int m = 0; m < n; ++m) {
          cplx t = 0.0;
          for (int l = 0; l < n; ++l) t += gi1(m, k, l) * A(l, i, j) + gi(k, l) * dA(m, l, i, j);
          c.dGamma(m, k, i, j) = 0.5 * t;
        }
      }
  c.Riem = Ten(n, 4);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          cplx s = c.dGamma(i, l, j, k) - c.dGamma(j, l, i, k);
          for (int a = 0; a < n; ++a)
            s += c.Gamma(l, i, a) * c.Gamma(a, j, k) - c.Gamma(l, j, a) * c.Gamma(a, i, k);
          c.Riem(l, i, j, k) = s;
        }
  return c;
}

struct FlowOptions {
  int steps = 400;
  bool require_null = true;        // initial velocity must be isotropic
  double null_tol = 1e-10;         // precondition on |g(v,v)| / |v|^2
  double drift_tol = 1e-5;         // abort when the integrated v leaves the cone
  bool with_jacobi = false;
  CVec J0, K0;                     // Jacobi initial data (J, covariant J')
  std::vector<CVec> transport;     // vectors to parallel-transport along the way
};

struct FlowResult {
  std::vector<double> t;
  std::vector<CVec> x, v;
  std::vector<CVec> J, K;                 // filled when with_jacobi
  std::vector<std::vector<CVec>> par;     // par[s][i]: transported copy of transport[i]
};

/// Fixed-step RK4 for the geodesic equation, optionally carrying a Jacobi
/// field (J' = K - Gamma v J, covariant K' = R(v,J)v) and parallel frames.
inline FlowResult integrate_geodesic(const MetricField& f, const CVec& x0, const CVec& v0, double t1,
                                     const FlowOptions& opt = {}) {
  const int n = f.dim();
  if ((int)x0.size() != n || (int)v0.size() != n) throw precondition_error("state dimension mismatch");
  if (opt.steps < 1) throw precondition_error("need at least one step");
  {
    const cplx q = f.dot(x0, v0, v0);
    const double nv = vec_norm(v0);
    if (opt.require_null && std::abs(q) > opt.null_tol * nv * nv)
      throw precondition_error("initial velocity is not isotropic");
  }
  const bool jac = opt.with_jacobi;
  if (jac && ((int)opt.J0.size() != n || (int)opt.K0.size() != n))
    throw precondition_error("Jacobi initial data dimension mismatch");
  const int ntr = (int)opt.transport.size();

  // flattened state: x, v, [J, K], transported...
  const int blocks = 2 + (jac ? 2 : 0) + ntr;
  std::vector<cplx> y((std::size_t)(blocks * n));
  for (int i = 0; i < n; ++i) {
    y[(std::size_t)i] = x0[(std::size_t)i];
    y[(std::size_t)(n + i)] = v0[(std::size_t)i];
  }
  int tb = 2;
  if (jac) {
    for (int i = 0; i < n; ++i) {
      y[(std::size_t)(2 * n + i)] = opt.J0[(std::size_t)i];
      y[(std::size_t)(3 * n + i)] = opt.K0[(std::size_t)i];
    }
    tb = 4;
  }
  for (int u = 0; u < ntr; ++u)
    for (int i = 0; i < n; ++i) y[(std::size_t)((tb + u) * n + i)] = opt.transport[(std::size_t)u][(std::size_t)i];

  auto rhs = [&](const std::vector<cplx>& s) {
    std::vector<cplx> d(s.size());
    CVec x(s.begin(), s.begin() + n), v(s.begin() + n, s.begin() + 2 * n);
    ConnectionData cd;
    Ten G;
    if (jac) {
      cd = connection_data(f, x);
      G = cd.Gamma;
    } else {
      G = christoffel(f, x);
    }
    auto covdrift = [&](const cplx* u, cplx* out) {
      for (int k = 0; k < n; ++k) {
        cplx a = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) a += G(k, i, j) * v[(std::size_t)i] * u[j];
        out[k] = -a;
      }
    };
    for (int i = 0; i < n; ++i) d[(std::size_t)i] = v[(std::size_t)i];  // x' = v
    covdrift(s.data() + n, d.data() + n);                               // v' = -Gamma v v
    if (jac) {
      const cplx* J = s.data() + 2 * n;
      const cplx* K = s.data() + 3 * n;
      covdrift(J, d.data() + 2 * n);
      for (int k = 0; k < n; ++k) d[(std::size_t)(2 * n + k)] += K[k];  // J' = K - Gamma v J
      covdrift(K, d.data() + 3 * n);
      for (int l = 0; l < n; ++l) {
        cplx r = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              r += cd.Riem(l, i, j, k) * v[(std::size_t)i] * J[j] * v[(std::size_t)k];
        d[(std::size_t)(3 * n + l)] += r;  // covariant K' = R(v,J)v
      }
    }
    for (int u = 0; u < ntr; ++u) covdrift(s.data() + (tb + u) * n, d.data() + (tb + u) * n);
    return d;
  };

  FlowResult res;
  auto record = [&](double tt, const std::vector<cplx>& s) {
    res.t.push_back(tt);
    res.x.emplace_back(s.begin(), s.begin() + n);
    res.v.emplace_back(s.begin() + n, s.begin() + 2 * n);
    if (jac) {
      res.J.emplace_back(s.begin() + 2 * n, s.begin() + 3 * n);
      res.K.emplace_back(s.begin() + 3 * n, s.begin() + 4 * n);
    }
    std::vector<CVec> tr;
    for (int u = 0; u < ntr; ++u) tr.emplace_back(s.begin() + (tb + u) * n, s.begin() + (tb + u + 1) * n);
    res.par.push_back(std::move(tr));
  };

  const double h = t1 / opt.steps;
  record(0.0, y);
  for (int step = 0; step < opt.steps; ++step) {
    std::vector<cplx> k1 = rhs(y), s2(y), s3(y), s4(y);
    for (std::size_t i = 0; i < y.size(); ++i) s2[i] = y[i] + 0.5 * h * k1[i];
    std::vector<cplx> k2 = rhs(s2);
    for (std::size_t i = 0; i < y.size(); ++i) s3[i] = y[i] + 0.5 * h * k2[i];
    std::vector<cplx> k3 = rhs(s3);
    for (std::size_t i = 0; i < y.size(); ++i) s4[i] = y[i] + h * k3[i];
    std::vector<cplx> k4 = rhs(s4);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    record((step + 1) * h, y);
    if (opt.require_null) {
      CVec x(y.begin(), y.begin() + n), v(y.begin() + n, y.begin() + 2 * n);
      const double nv = vec_norm(v);
      if (std::abs(f.dot(x, v, v)) > opt.drift_tol * nv * nv)
        throw numeric_abort("isotropy drift exceeded tolerance during integration");
    }
  }
  return res;
}

/// Natural cubic spline through (t_i, y_i), complex values on a real grid.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> t, std::vector<cplx> y) : t_(std::move(t)), y_(std::move(y)) {
    const int m = (int)t_.size();
    if (m < 3 || y_.size() != t_.size()) throw precondition_error("spline needs >= 3 samples");
    // solve for second derivatives M_i, natural boundary conditions
    std::vector<double> hseg((std::size_t)m - 1);
    for (int i = 0; i + 1 < m; ++i) hseg[(std::size_t)i] = t_[(std::size_t)i + 1] - t_[(std::size_t)i];
    std::vector<double> a((std::size_t)m, 0.0), b((std::size_t)m, 1.0), cc((std::size_t)m, 0.0);
    std::vector<cplx> r((std::size_t)m, cplx(0.0));
    for (int i = 1; i + 1 < m; ++i) {
      a[(std::size_t)i] = hseg[(std::size_t)i - 1];
      b[(std::size_t)i] = 2.0 * (hseg[(std::size_t)i - 1] + hseg[(std::size_t)i]);
      cc[(std::size_t)i] = hseg[(std::size_t)i];
      r[(std::size_t)i] = 6.0 * ((y_[(std::size_t)i + 1] - y_[(std::size_t)i]) / hseg[(std::size_t)i] -
                                 (y_[(std::size_t)i] - y_[(std::size_t)i - 1]) / hseg[(std::size_t)i - 1]);
    }
    // Thomas algorithm
    M_.assign((std::size_t)m, cplx(0.0));
    std::vector<double> cp((std::size_t)m, 0.0);
    std::vector<cplx> rp((std::size_t)m, cplx(0.0));
    cp[0] = cc[0] / b[0];
    rp[0] = r[0] / b[0];
    for (int i = 1; i < m; ++i) {
      const double den = b[(std::size_t)i] - a[(std::size_t)i] * cp[(std::size_t)i - 1];
      cp[(std::size_t)i] = cc[(std::size_t)i] / den;
      rp[(std::size_t)i] = (r[(std::size_t)i] - a[(std::size_t)i] * rp[(std::size_t)i - 1]) / den;
    }
    M_[(std::size_t)m - 1] = rp[(std::size_t)m - 1];
    for (int i = m - 2; i >= 0; --i)
      M_[(std::size_t)i] = rp[(std::size_t)i] - cp[(std::size_t)i] * M_[(std::size_t)i + 1];
  }

  cplx eval(double x) const { return piece(x, 0); }
  cplx deriv(double x) const { return piece(x, 1); }
  cplx deriv2(double x) const { return piece(x, 2); }

 private:
  cplx piece(double x, int d) const {
    int i = seg(x);
    const double h = t_[(std::size_t)i + 1] - t_[(std::size_t)i];
    const double A = (t_[(std::size_t)i + 1] - x) / h, B = (x - t_[(std::size_t)i]) / h;
    const cplx ya = y_[(std::size_t)i], yb = y_[(std::size_t)i + 1];
    const cplx Ma = M_[(std::size_t)i], Mb = M_[(std::size_t)i + 1];
    if (d == 0)
      return A * ya + B * yb + ((A * A * A - A) * Ma + (B * B * B - B) * Mb) * (h * h / 6.0);
    if (d == 1)
      return (yb - ya) / h - (3.0 * A * A - 1.0) * (h / 6.0) * Ma + (3.0 * B * B - 1.0) * (h / 6.0) * Mb;
    return A * Ma + B * Mb;
  }
  int seg(double x) const {
    int lo = 0, hi = (int)t_.size() - 2;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (t_[(std::size_t)mid] <= x) lo = mid; else hi = mid - 1;
    }
    return lo;
  }
  std::vector<double> t_;
  std::vector<cplx> y_;
  std::vector<cplx> M_;
};

/// Componentwise spline of a vector field sampled along a curve.
class VectorSpline {
 public:
  VectorSpline() = default;
  VectorSpline(const std::vector<double>& t, const std::vector<CVec>& ys) {
    const int n = (int)ys.at(0).size();
    for (int i = 0; i < n; ++i) {
      std::vector<cplx> comp;
      comp.reserve(ys.size());
      for (const CVec& y : ys) comp.push_back(y[(std::size_t)i]);
      comps_.emplace_back(t, std::move(comp));
    }
  }
  CVec eval(double x) const { return collect(x, 0); }
  CVec deriv(double x) const { return collect(x, 1); }
  CVec deriv2(double x) const { return collect(x, 2); }

 private:
  CVec collect(double x, int d) const {
    CVec r;
    for (const CubicSpline& s : comps_)
      r.push_back(d == 0 ? s.eval(x) : d == 1 ? s.deriv(x) : s.deriv2(x));
    return r;
  }
  std::vector<CubicSpline> comps_;
};

/// Second-order Jacobi-type operator along a curve:
///   P(Y) = nabla_X nabla_X Y - nabla_{nabla_X X} Y - R(X,Y) X,
/// evaluated from along-curve data only: position x, velocity v, coordinate
/// acceleration a = dv/dt, and the field Y with its first two coordinate
/// t-derivatives. Because Y is only known along the curve, nabla_X X must be
/// proportional to X (true for affine geodesics, and preserved for isotropic
/// X under conformal change); anything else is rejected.
inline CVec jacobi_operator_P(const MetricField& f, const CVec& x, const CVec& v, const CVec& a,
                              const CVec& Y, const CVec& Yp, const CVec& Ypp) {
  const int n = f.dim();
  ConnectionData cd = connection_data(f, x);

  auto apply_gamma = [&](const CVec& u, const CVec& w) {
    CVec r((std::size_t)n, cplx(0.0));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[(std::size_t)k] += cd.Gamma(k, i, j) * u[(std::size_t)i] * w[(std::size_t)j];
    return r;
  };

  // Z = nabla_X Y
  CVec Z = apply_gamma(v, Y);
  for (int k = 0; k < n; ++k) Z[(std::size_t)k] += Yp[(std::size_t)k];

  // dZ/dt = Y'' + (d_m Gamma) v^m v Y + Gamma a Y + Gamma v Y'
  CVec Zp((std::size_t)n, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    cplx s = Ypp[(std::size_t)k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m)
          s += cd.dGamma(m, k, i, j) * v[(std::size_t)m] * v[(std::size_t)i] * Y[(std::size_t)j];
        s += cd.Gamma(k, i, j) * (a[(std::size_t)i] * Y[(std::size_t)j] + v[(std::size_t)i] * Yp[(std::size_t)j]);
      }
    Zp[(std::size_t)k] = s;
  }
  CVec nxZ = apply_gamma(v, Z);
  for (int k = 0; k < n; ++k) nxZ[(std::size_t)k] += Zp[(std::size_t)k];

  // nabla_X X must be c X for some scalar c
  CVec w = apply_gamma(v, v);
  for (int k = 0; k < n; ++k) w[(std::size_t)k] += a[(std::size_t)k];
  CMat vm(n, 1);
  for (int k = 0; k < n; ++k) vm(k, 0) = v[(std::size_t)k];
  CVec cfit = lstsq(vm, w);
  // tolerance is relative to the natural size |v|^2 of connection terms, so
  // interpolated curve data (spline-level noise) still passes
  const double wscale = std::max(vec_norm(w), vec_norm(v) * vec_norm(v));
  if (lstsq_residual(vm, cfit, w) > 1e-5 * wscale)
    throw precondition_error("nabla_X X is not proportional to X along this curve");
  const cplx cc = cfit[0];

  // R(X,Y)X
  CVec rxy((std::size_t)n, cplx(0.0));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          rxy[(std::size_t)l] += cd.Riem(l, i, j, k) * v[(std::size_t)i] * Y[(std::size_t)j] * v[(std::size_t)k];

  CVec P((std::size_t)n, cplx(0.0));
  for (int k = 0; k < n; ++k)
    P[(std::size_t)k] = nxZ[(std::size_t)k] - cc * Z[(std::size_t)k] - rxy[(std::size_t)k];
  return P;
}

/// Residual of u modulo span{basis}: Euclidean distance after the best
/// least-squares fit, normalized by |u|. Used for statements that hold in
/// the quotient of the velocity's orthogonal complement.
inline double residual_mod_span(const CVec& u, const std::vector<CVec>& basis) {
  const int n = (int)u.size();
  CMat A(n, (int)basis.size());
  for (int j = 0; j < (int)basis.size(); ++j)
    for (int i = 0; i < n; ++i) A(i, j) = basis[(std::size_t)j][(std::size_t)i];
  CVec x = lstsq(A, u);
  return lstsq_residual(A, x, u);
}

}  // namespace holoconf
