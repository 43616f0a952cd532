#pragma once

#include "spinodal/common.hpp"

namespace spinodal {

enum class MetricKind { flat, sphere, hyperbolic };

const char* metric_kind_name(MetricKind k);

/// Constant-curvature model metric in normal polar coordinates,
///   g = d(rho)^2 + rho^2 w_ij(rho) d(theta)^i d(theta)^j,
/// where w is reported relative to the round metric on S^{n-1} (so the flat
/// model has det w = 1 identically). Space forms are the only models: they
/// admit closed-form w, which keeps every geometric coefficient independently
/// checkable.
struct ModelMetric {
  MetricKind kind = MetricKind::flat;
  double curvature = 0.0;  // kappa; 0 for flat, sign matches the kind
  int n = 0;

  static ModelMetric flat(int n);
  static ModelMetric sphere(int n, double kappa = 1.0);
  static ModelMetric hyperbolic(int n, double kappa = -1.0);

  bool is_flat() const { return kind == MetricKind::flat; }

  /// Upper bound on admissible radii (injectivity guard): pi/sqrt(kappa) on
  /// the sphere, +infinity otherwise.
  double radius_guard() const;
};

/// (det w(rho), W(rho)) with W = (1/2) d/d(rho) ln det w; theta-independent
/// for space forms. Throws a domain error outside (0, radius guard).
std::pair<double, double> radial_warp(const ModelMetric& metric, double rho);

/// Max entrywise residual between the exact normal-coordinate metric g_ij(x)
/// (and its inverse square root b_i^j) and their second-order curvature
/// expansions. O(|x|^3) by construction; identically 0 for the flat model.
double metric_expansion_check(const ModelMetric& metric, const RVector& x);

/// Scalar curvature: n(n-1)*kappa.
double scalar_curvature(const ModelMetric& metric);

/// r_coord: half the curvature radius (large sentinel for flat).
double coord_radius(const ModelMetric& metric);

/// C_coord: least-squares fit of |W(rho)| against rho over (0, r_coord],
/// the constant in the small-radius bound |W| <= C_coord * rho.
double coord_growth_constant(const ModelMetric& metric);

}  // namespace spinodal
