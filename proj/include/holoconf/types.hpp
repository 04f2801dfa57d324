#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace holoconf {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kIdentityTol = 1e-8;   // AD-vs-AD identities
inline constexpr double kFdTol = 1e-5;         // FD-oracle comparisons
inline constexpr double kDefaultFdStep = 1e-4;

/// Syntax error in the expression language or a manifest; carries the byte
/// offset of the offending token.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation hit a pole or branch point (division by zero, log/sqrt at 0).
class eval_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Metric degenerate at the evaluation point.
class singular_metric_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stated precondition does not hold (non-isotropic initial velocity,
/// non-totally-geodesic surface, residual above threshold, ...).
class precondition_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical integration aborted (isotropy drift, frame pivot failure).
class numeric_abort : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense complex tensor with all axes of length n; rank 0..5.
struct Ten {
  int n = 0;
  int rank = 0;
  std::vector<cplx> a;

  Ten() = default;
  Ten(int n_, int rank_) : n(n_), rank(rank_) {
    std::size_t sz = 1;
    for (int r = 0; r < rank_; ++r) sz *= static_cast<std::size_t>(n_);
    a.assign(sz, cplx(0.0));
  }

  cplx& operator()() { return a[0]; }
  cplx operator()() const { return a[0]; }
  cplx& operator()(int i) { return a[static_cast<std::size_t>(i)]; }
  cplx operator()(int i) const { return a[static_cast<std::size_t>(i)]; }
  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
  cplx& operator()(int i, int j, int k) {
    return a[static_cast<std::size_t>((i * n + j) * n + k)];
  }
  cplx operator()(int i, int j, int k) const {
    return a[static_cast<std::size_t>((i * n + j) * n + k)];
  }
  cplx& operator()(int i, int j, int k, int l) {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  cplx operator()(int i, int j, int k, int l) const {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  cplx& operator()(int i, int j, int k, int l, int m) {
    return a[static_cast<std::size_t>((((i * n + j) * n + k) * n + l) * n + m)];
  }
  cplx operator()(int i, int j, int k, int l, int m) const {
    return a[static_cast<std::size_t>((((i * n + j) * n + k) * n + l) * n + m)];
  }

  double frobenius() const {
    double s = 0.0;
    for (const cplx& c : a) s += std::norm(c);
    return std::sqrt(s);
  }
};

inline double vec_norm(const CVec& v) {
  double s = 0.0;
  for (const cplx& c : v) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace holoconf
