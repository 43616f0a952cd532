#include "spinodal/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace spinodal {

namespace {

/// phi(r)^{n-1}: ratio of the metric sphere area to the flat one at
/// coordinate radius r. Identically 1 for the flat model.
double metric_area_weight(const ModelMetric& metric, int n, double r) {
  if (metric.is_flat()) return 1.0;
  require(metric.n == n, ErrorKind::shape_mismatch,
          "frequency: metric dimension does not match the field");
  return std::sqrt(radial_warp(metric, r).first);
}

struct HeightFlux {
  double height = 0.0;
  double flux = 0.0;
};

HeightFlux height_flux(const SpinorField& field, const RVector& center,
                       double r, const ModelMetric& metric) {
  const SphereSamples trace = sphere_trace(field, center, r);
  const std::size_t m = trace.points.size();
  std::vector<double> ht(m), fx(m);
  for (std::size_t i = 0; i < m; ++i) {
    ht[i] = trace.weights[i] * trace.psi[i].squaredNorm();
    fx[i] = trace.weights[i] * fiber_inner(trace.dnu[i], trace.psi[i]).real();
  }
  const double w = metric_area_weight(metric, field.grid().n, r);
  return {w * pairwise_sum(ht), w * pairwise_sum(fx)};
}

void check_height(double height, const SpinorField& field, double r) {
  const double sup = field.max_abs();
  require(height > 1e-20 * sup * sup, ErrorKind::degenerate_field,
          "frequency: boundary height vanishes at r = " + std::to_string(r));
}

double frequency_at(const SpinorField& field, const RVector& center, double r,
                    const ModelMetric& metric) {
  const HeightFlux hf = height_flux(field, center, r, metric);
  check_height(hf.height, field, r);
  return r * hf.flux / hf.height;
}

}  // namespace

double boundary_height(const SpinorField& field, const RVector& center,
                       double r, const ModelMetric& metric) {
  return height_flux(field, center, r, metric).height;
}

double boundary_flux(const SpinorField& field, const RVector& center, double r,
                     const ModelMetric& metric) {
  return height_flux(field, center, r, metric).flux;
}

FrequencyProfile frequency_profile(const SpinorField& field,
                                   const RVector& center,
                                   const std::vector<double>& radii,
                                   const ModelMetric& metric,
                                   const FrequencyOptions& options) {
  require(!radii.empty(), ErrorKind::domain,
          "frequency_profile: empty radius list");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    require(radii[i] < radii[i + 1], ErrorKind::domain,
            "frequency_profile: radii must be strictly increasing");
  }
  require(options.beta > 0.0, ErrorKind::domain,
          "frequency_profile: beta must be positive");

  FrequencyProfile out;
  out.center = center;
  out.metric_kind = metric.kind;
  out.curvature = metric.curvature;
  out.options = options;
  out.radii = radii;
  for (double r : radii) {
    const HeightFlux hf = height_flux(field, center, r, metric);
    check_height(hf.height, field, r);
    const double order = r * hf.flux / hf.height;
    out.height.push_back(hf.height);
    out.flux.push_back(hf.flux);
    out.order.push_back(order);
    const double weight = std::exp(options.c_am / (options.beta + 1.0) *
                                   std::pow(r, options.beta + 1.0));
    out.adjusted.push_back(weight * (order + options.c_n));
  }
  return out;
}

VanishingOrder vanishing_order(const SpinorField& field, const RVector& center,
                               double r0, int levels,
                               const ModelMetric& metric) {
  require(r0 > 0.0, ErrorKind::domain,
          "vanishing_order: radius must be positive");
  require(levels >= 3 && levels <= 12, ErrorKind::domain,
          "vanishing_order: levels must lie in [3, 12]");

  VanishingOrder out;
  out.levels = levels;
  for (int j = 0; j < levels; ++j) {
    const double r = r0 / std::pow(2.0, j);
    out.raw.push_back(frequency_at(field, center, r, metric));
  }

  // Iterated Aitken acceleration toward the r -> 0 limit. A vanishing second
  // difference means the sequence is already converged at that entry.
  std::vector<double> seq = out.raw;
  while (seq.size() >= 3) {
    std::vector<double> next;
    for (std::size_t j = 0; j + 2 < seq.size(); ++j) {
      const double d_last = seq[j + 2] - seq[j + 1];
      const double d2 = seq[j + 2] - 2.0 * seq[j + 1] + seq[j];
      if (std::abs(d2) <= 1e-12 * (1.0 + std::abs(seq[j + 2]))) {
        next.push_back(seq[j + 2]);
      } else {
        next.push_back(seq[j + 2] - d_last * d_last / d2);
      }
    }
    seq = std::move(next);
  }
  out.limit = seq.empty() ? out.raw.back() : seq.back();

  const double snapped = std::round(out.limit);
  require(std::abs(out.limit - snapped) <= 0.1, ErrorKind::no_limit,
          "vanishing_order: accelerated frequency limit is not near an "
          "integer");
  require(snapped >= 0.0, ErrorKind::wrong_order,
          "vanishing_order: negative vanishing order");
  out.order = static_cast<int>(snapped);
  return out;
}

MonotonicityAudit monotonicity_audit(const FrequencyProfile& profile,
                                     double beta, double c_n) {
  require(profile.radii.size() >= 2, ErrorKind::domain,
          "monotonicity_audit: need at least two radii");
  require(beta > 0.0, ErrorKind::domain,
          "monotonicity_audit: beta must be positive");

  MonotonicityAudit out;
  out.beta = beta;
  out.c_n = c_n;

  const auto weighted = [&](double c, std::size_t j) {
    return std::exp(c / (beta + 1.0) *
                    std::pow(profile.radii[j], beta + 1.0)) *
           (profile.order[j] + c_n);
  };
  const auto monotone = [&](double c) {
    for (std::size_t j = 0; j + 1 < profile.radii.size(); ++j) {
      const double lo = weighted(c, j);
      const double hi = weighted(c, j + 1);
      const double slack =
          1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
      if (hi < lo - slack) return false;
    }
    return true;
  };

  constexpr double kCap = 1e3;
  if (monotone(0.0)) {
    out.c_am_fit = 0.0;
    return out;
  }
  if (!monotone(kCap)) {
    out.c_am_fit = kCap;
    for (std::size_t j = 0; j + 1 < profile.radii.size(); ++j) {
      const double lo = weighted(kCap, j);
      const double hi = weighted(kCap, j + 1);
      const double slack =
          1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
      if (hi < lo - slack) {
        out.violations.push_back({profile.radii[j], profile.radii[j + 1],
                                  lo - hi});
        out.max_violation = std::max(out.max_violation, lo - hi);
      }
    }
    return out;
  }
  double lo = 0.0, hi = kCap;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (monotone(mid) ? hi : lo) = mid;
  }
  out.c_am_fit = hi;
  return out;
}

DoublingCheck doubling_check(const SpinorField& field, const RVector& center,
                             double s, double t, const ModelMetric& metric,
                             int samples) {
  require(s > 0.0 && s < t, ErrorKind::domain,
          "doubling_check: need 0 < s < t");
  require(samples >= 2, ErrorKind::domain,
          "doubling_check: need at least two samples");

  DoublingCheck out;
  out.s = s;
  out.t = t;
  double sup = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double r = s + (t - s) * i / (samples - 1);
    sup = std::max(sup, frequency_at(field, center, r, metric));
  }
  out.sup_order = sup;

  const int n = field.grid().n;
  const double c = metric.is_flat() ? 0.0 : coord_growth_constant(metric);
  const double hs = boundary_height(field, center, s, metric);
  const double ht = boundary_height(field, center, t, metric);
  check_height(hs, field, s);
  out.lhs = std::exp(-0.5 * c * t * t) * ht;
  out.rhs = std::exp(-0.5 * c * s * s) *
            std::pow(t / s, n - 1 + 2.0 * sup) * hs;
  out.passed = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

UniformOrderScan uniform_order_scan(const SpinorField& field,
                                    const std::vector<RVector>& centers,
                                    double r0, int levels) {
  require(!centers.empty(), ErrorKind::domain,
          "uniform_order_scan: empty center list");
  UniformOrderScan out;
  for (const RVector& c : centers) {
    out.orders.push_back(vanishing_order(field, c, r0, levels));
    out.max_order = std::max(out.max_order, out.orders.back().order);
  }
  return out;
}

void save_frequency_profile(const FrequencyProfile& profile,
                            const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io,
          "save_frequency_profile: cannot open " + path);
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "# spinodal-frequency v1\n";
  out << "# artifact: " << kArtifactVersion << "\n";
  out << "# metric: " << metric_kind_name(profile.metric_kind) << " "
      << num(profile.curvature) << "\n";
  out << "# center:";
  for (int i = 0; i < profile.center.size(); ++i)
    out << " " << num(profile.center[i]);
  out << "\n";
  out << "# beta: " << num(profile.options.beta)
      << " c_n: " << num(profile.options.c_n)
      << " c_am: " << num(profile.options.c_am) << "\n";
  out << "r,H,D,N,adjustedN\n";
  for (std::size_t j = 0; j < profile.radii.size(); ++j) {
    out << num(profile.radii[j]) << "," << num(profile.height[j]) << ","
        << num(profile.flux[j]) << "," << num(profile.order[j]) << ","
        << num(profile.adjusted[j]) << "\n";
  }
  require(out.good(), ErrorKind::io, "save_frequency_profile: write failed");
}

}  // namespace spinodal
