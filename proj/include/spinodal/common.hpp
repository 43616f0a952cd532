#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinodal {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr const char* kArtifactVersion = "spinodal 1.0.0";

// ============================================================================
// Error taxonomy
// ============================================================================

/// Category of failure raised by library operations. Operations that report
/// rather than fail (audits) never throw; everything else throws Error with a
/// kind that tests and the CLI can discriminate on.
enum class ErrorKind {
  invalid_dimension,
  shape_mismatch,
  domain,
  singularity,
  stencil,
  geometry,
  construction,
  calibration,
  degenerate_field,
  no_limit,
  hypothesis,
  resolution,
  fit,
  wrong_order,
  unsupported_dimension,
  ill_conditioned,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

// ============================================================================
// Dimensional constants
// ============================================================================

/// Volume of the unit ball in R^n (omega_n), so n*omega_n is the unit-sphere
/// area. omega_2 = pi, omega_3 = 4pi/3, omega_4 = pi^2/2.
inline double unit_ball_volume(int n) {
  require(n >= 1, ErrorKind::invalid_dimension, "unit_ball_volume: n >= 1");
  const double pi = 3.14159265358979323846;
  return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Area of the unit sphere S^{n-1} in R^n: n * omega_n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

// ============================================================================
// Deterministic reductions
// ============================================================================

/// Sum of a buffer in a fixed pairwise-tree order. Used for every quadrature
/// reduction so results are independent of thread count and platform
/// accumulation quirks.
inline double pairwise_sum(const double* data, std::size_t len) {
  if (len <= 16) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, len - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace spinodal
