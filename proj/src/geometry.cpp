#include "spinodal/geometry.hpp"

#include <cmath>
#include <limits>

namespace spinodal {

namespace {

const double kPi = 3.14159265358979323846;

/// phi(rho) = sn_kappa(rho)/rho, the tangential stretch factor of a space
/// form: sin(z)/z, 1, or sinh(z)/z with z = sqrt(|kappa|) rho.
double stretch(double kappa, double rho) {
  if (kappa == 0.0) return 1.0;
  const double z = std::sqrt(std::abs(kappa)) * rho;
  if (z < 1e-4) {
    const double z2 = z * z, sign = kappa > 0.0 ? -1.0 : 1.0;
    return 1.0 + sign * z2 / 6.0 + z2 * z2 / 120.0;
  }
  return kappa > 0.0 ? std::sin(z) / z : std::sinh(z) / z;
}

/// d/d(rho) ln phi = sqrt(|k|) cot(z) - 1/rho (sphere) etc.; series near 0
/// avoids the 1/rho cancellation.
double dlog_stretch(double kappa, double rho) {
  if (kappa == 0.0) return 0.0;
  const double sk = std::sqrt(std::abs(kappa));
  const double z = sk * rho;
  if (z < 1e-2) {
    const double z2 = z * z;
    // cot(z) - 1/z = -z/3 - z^3/45 - 2 z^5/945; coth flips the odd signs.
    const double series = kappa > 0.0
                              ? -z / 3.0 - z * z2 / 45.0 - 2.0 * z * z2 * z2 / 945.0
                              : z / 3.0 - z * z2 / 45.0 + 2.0 * z * z2 * z2 / 945.0;
    return sk * series;
  }
  const double ratio = kappa > 0.0 ? std::cos(z) / std::sin(z)
                                   : std::cosh(z) / std::sinh(z);
  return sk * ratio - 1.0 / rho;
}

}  // namespace

const char* metric_kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::flat: return "flat";
    case MetricKind::sphere: return "sphere";
    case MetricKind::hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

ModelMetric ModelMetric::flat(int n) {
  require(n >= 2, ErrorKind::invalid_dimension, "ModelMetric: n >= 2");
  return {MetricKind::flat, 0.0, n};
}

ModelMetric ModelMetric::sphere(int n, double kappa) {
  require(n >= 2, ErrorKind::invalid_dimension, "ModelMetric: n >= 2");
  require(kappa > 0.0, ErrorKind::domain, "sphere model needs kappa > 0");
  return {MetricKind::sphere, kappa, n};
}

ModelMetric ModelMetric::hyperbolic(int n, double kappa) {
  require(n >= 2, ErrorKind::invalid_dimension, "ModelMetric: n >= 2");
  require(kappa < 0.0, ErrorKind::domain, "hyperbolic model needs kappa < 0");
  return {MetricKind::hyperbolic, kappa, n};
}

double ModelMetric::radius_guard() const {
  if (kind == MetricKind::sphere) return kPi / std::sqrt(curvature);
  return std::numeric_limits<double>::infinity();
}

std::pair<double, double> radial_warp(const ModelMetric& metric, double rho) {
  require(rho > 0.0, ErrorKind::domain, "radial_warp: rho must be positive");
  require(rho < metric.radius_guard(), ErrorKind::domain,
          "radial_warp: rho beyond the injectivity guard");
  const double phi = stretch(metric.curvature, rho);
  const double detw = std::pow(phi, 2 * (metric.n - 1));
  const double w_term = (metric.n - 1) * dlog_stretch(metric.curvature, rho);
  return {detw, w_term};
}

double metric_expansion_check(const ModelMetric& metric, const RVector& x) {
  require(x.size() == metric.n, ErrorKind::shape_mismatch,
          "metric_expansion_check: dimension mismatch");
  const double r = x.norm();
  if (metric.is_flat()) return 0.0;
  const double curv_radius = 1.0 / std::sqrt(std::abs(metric.curvature));
  require(r > 0.0 && r < 0.3 * curv_radius, ErrorKind::domain,
          "metric_expansion_check: |x| outside (0, 0.3 curvature radius)");

  const int n = metric.n;
  const double kappa = metric.curvature;
  const double phi = stretch(kappa, r);
  const RVector xhat = x / r;

  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double delta = (i == j) ? 1.0 : 0.0;
      const double tan_proj = delta - xhat[i] * xhat[j];
      // Exact tensors: radial direction unit, tangential scaled by phi
      // (metric) and 1/phi (its inverse square root).
      const double g_exact = phi * phi * tan_proj + xhat[i] * xhat[j];
      const double b_exact = (1.0 / phi) * tan_proj + xhat[i] * xhat[j];
      // Second-order expansions: g ~ delta - (k/3)(|x|^2 delta - x x),
      // b ~ delta + (k/6)(|x|^2 delta - x x).
      const double quad = r * r * delta - x[i] * x[j];
      const double g_approx = delta - (kappa / 3.0) * quad;
      const double b_approx = delta + (kappa / 6.0) * quad;
      worst = std::max(worst, std::abs(g_exact - g_approx));
      worst = std::max(worst, std::abs(b_exact - b_approx));
    }
  }
  return worst;
}

double scalar_curvature(const ModelMetric& metric) {
  return metric.n * (metric.n - 1) * metric.curvature;
}

double coord_radius(const ModelMetric& metric) {
  if (metric.is_flat()) return std::numeric_limits<double>::infinity();
  return 0.5 / std::sqrt(std::abs(metric.curvature));
}

double coord_growth_constant(const ModelMetric& metric) {
  if (metric.is_flat()) return 0.0;
  const double r_coord = coord_radius(metric);
  const int samples = 64;
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double rho = r_coord * i / samples;
    const double w_term = radial_warp(metric, rho).second;
    num += std::abs(w_term) * rho;
    den += rho * rho;
  }
  return num / den;
}

}  // namespace spinodal
