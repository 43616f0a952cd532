#pragma once

#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/geometry.hpp"

namespace spinodal {

/// Boundary height function: H(r) = phi(r)^{n-1} * integral_{|x-c|=r} |psi|^2,
/// where phi is the metric's radial warp (1 for the flat model).
double boundary_height(const SpinorField& field, const RVector& center,
                       double r, const ModelMetric& metric);

/// Boundary flux: D(r) = phi(r)^{n-1} * integral Re<d_nu psi, psi>. Purely
/// radial differentiation; for a homogeneous degree-k field D = (k/r) H
/// pointwise, which is what pins the frequency at k below.
double boundary_flux(const SpinorField& field, const RVector& center, double r,
                     const ModelMetric& metric);

struct FrequencyOptions {
  double beta = 0.5;  // exponent in the almost-monotone weight
  double c_n = 1.0;   // additive shift applied to N before weighting
  double c_am = 0.0;  // weight constant used for the adjusted column
};

struct FrequencyProfile {
  RVector center;
  MetricKind metric_kind = MetricKind::flat;
  double curvature = 0.0;
  FrequencyOptions options;
  std::vector<double> radii;
  std::vector<double> height;
  std::vector<double> flux;
  std::vector<double> order;     // N(r) = r * D(r) / H(r)
  std::vector<double> adjusted;  // exp(c_am/(beta+1) r^{beta+1}) (N + c_n)
};

/// Frequency N(r) = r D(r) / H(r) over the given radii. Radii must be
/// strictly increasing and inside the trace band. Throws degenerate_field if
/// any H(r) falls below 1e-20 * sup|psi|^2.
FrequencyProfile frequency_profile(const SpinorField& field,
                                   const RVector& center,
                                   const std::vector<double>& radii,
                                   const ModelMetric& metric,
                                   const FrequencyOptions& options = {});

struct VanishingOrder {
  int order = 0;        // integer limit of N(r) as r -> 0
  double limit = 0.0;   // accelerated numerical limit before snapping
  int levels = 0;       // dyadic levels actually used
  std::vector<double> raw;  // N at r0 / 2^j
};

/// Limit of N along dyadic radii r0/2^j, accelerated by (iterated) Aitken
/// extrapolation and snapped to the nearest integer. Throws no_limit when the
/// accelerated value sits further than 0.1 from every integer, and
/// wrong_order when it snaps to a negative one.
VanishingOrder vanishing_order(const SpinorField& field, const RVector& center,
                               double r0, int levels = 6,
                               const ModelMetric& metric = ModelMetric());

struct AuditViolation {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double deficit = 0.0;  // how far below monotone the pair still sits
};

struct MonotonicityAudit {
  double beta = 0.0;
  double c_n = 0.0;
  double c_am_fit = 0.0;       // smallest admissible constant (capped at 1e3)
  double max_violation = 0.0;  // residual deficit at the cap, 0 when clean
  std::vector<AuditViolation> violations;
};

/// Smallest c >= 0 (bisection over [0, 1e3], resolution 1e-3, slack 1e-9)
/// such that exp(c/(beta+1) r^{beta+1}) (N(r) + c_n) is nondecreasing across
/// the profile's consecutive radii. Pairs still failing at the cap are
/// reported as violations; the audit itself never throws.
MonotonicityAudit monotonicity_audit(const FrequencyProfile& profile,
                                     double beta = 0.5, double c_n = 1.0);

struct DoublingCheck {
  double s = 0.0;
  double t = 0.0;
  double sup_order = 0.0;
  double lhs = 0.0;  // exp(-C t^2 / 2) H(t)
  double rhs = 0.0;  // exp(-C s^2 / 2) (t/s)^{n-1+2 sup N} H(s)
  bool passed = false;
};

/// Two-radius growth bound: exp(-C t^2/2) H(t) <= exp(-C s^2/2)
/// (t/s)^{n-1+2 sup N} H(s) with C the metric's coordinate growth constant
/// and sup N taken over sampled radii in [s, t].
DoublingCheck doubling_check(const SpinorField& field, const RVector& center,
                             double s, double t, const ModelMetric& metric,
                             int samples = 9);

struct UniformOrderScan {
  std::vector<VanishingOrder> orders;
  int max_order = 0;
};

UniformOrderScan uniform_order_scan(const SpinorField& field,
                                    const std::vector<RVector>& centers,
                                    double r0, int levels = 6);

/// CSV with one row per radius: r,H,D,N,adjustedN. Deterministic bytes.
void save_frequency_profile(const FrequencyProfile& profile,
                            const std::string& path);

}  // namespace spinodal
