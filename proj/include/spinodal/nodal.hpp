#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/frequency.hpp"
#include "spinodal/spinor_poly.hpp"

namespace spinodal {

/// Stratum of a zero: z1 for simple (order-1) zeros, zge2 for zeros of order
/// at least two, unclassified when no reliable order limit was obtained.
enum class Stratum { z1, zge2, unclassified };
const char* stratum_name(Stratum s);

struct NodalSample {
  RVector x;
  double abs_psi = 0.0;
  double abs_grad = 0.0;
};

struct NodalLabel {
  double order = 0.0;       // snapped vanishing order (0 while unclassified)
  Stratum stratum = Stratum::unclassified;
  int gradient_rank = 0;    // real rank of the stacked component gradients
  int invariance_dim = -1;  // l = dim of translations fixing the leading term
  double fit_residual = 0.0;
};

struct StratifiedNodalSet {
  std::vector<NodalSample> samples;
  std::vector<NodalLabel> labels;  // empty until classified
  double h = 0.0;                  // extraction grid spacing
  double c0 = 0.0;                 // detection threshold constant
  int refine_levels = 0;           // bisection depth below the cell sweep
};

/// Sweeps every interior grid cell and keeps cells whose center satisfies
/// |psi| < c0 * s * (|grad psi| + s) at cell size s = h, then bisects each
/// surviving cell `refine_levels` times, re-testing with s halved per level.
/// Centers of the deepest surviving subcells become the samples, ordered
/// lexicographically by cell index. The default c0 is calibrated so that a
/// transverse simple zero is localized within h/4 and no zero crossing a
/// cell can escape the sweep (center-to-zero distance is at most s*sqrt(n)/2
/// while the threshold admits c0 * s * |grad|).
StratifiedNodalSet extract_nodal(const SpinorField& field, double c0 = 1.25,
                                 int refine_levels = 3);

/// Dimension of the real subspace of directions y with P(x + t y) = P(x)
/// identically, i.e. the null space of y -> sum_j y_j dP/dx_j. Computed from
/// the coefficient matrix of the partial derivatives (real and imaginary
/// parts stacked over components and monomials), not from samples.
int invariance_dimension(const HomogeneousSpinorPoly& leading);

/// Labels one candidate zero: vanishing order via the frequency limit at
/// dyadic radii in [r0/8, r0], stratum z1 when the order snaps to 1 (with
/// the rank of the stacked gradient reported), and for order >= 2 the
/// leading term is fitted on shells and its translation-invariance
/// dimension recorded. The smallest probe radius must stay well above the
/// extraction jitter of the candidate (about a quarter cell), or the probes
/// resolve the offset from the true zero instead of the zero itself. Any
/// failure to obtain an order limit (or a trace/fit domain problem near the
/// boundary) yields an unclassified label rather than an error, since
/// candidates come from a heuristic detector.
NodalLabel classify_point(const SpinorField& field, const RVector& p,
                          double r0);

/// Fills set->labels, one entry per sample, in parallel over points.
void classify_all(const SpinorField& field, StratifiedNodalSet* set, double r0);

/// Rescaled, sphere-normalized field w(x) = psi(p + r x) / s on the ball of
/// radius 2, where s is the square root of the average of |psi|^2 over the
/// sphere of radius r about p (so the average of |w|^2 over the unit sphere
/// is 1). Requires the ball of radius 2r about p to stay inside the domain.
SpinorField blowup(const SpinorField& field, const RVector& p, double r);

struct BoxCount {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double dimension = 0.0;  // least-squares slope of log count vs log(1/scale)
};

/// Box-counting dimension estimate of a sample cloud: occupied axis-aligned
/// boxes of each scale, then the least-squares slope on the log-log plot.
/// Needs at least 100 samples and 4 distinct scales.
BoxCount box_dimension(const std::vector<NodalSample>& samples,
                       const std::vector<double>& scales);

struct CuspConeAudit {
  RVector apex;
  Eigen::MatrixXd plane_basis;  // n x plane_dim, orthonormal columns
  double c_fit = 0.0;           // max d(x, plane) / |x - apex|^(1 + eps_fit)
  double eps_fit = 0.5;
  std::vector<std::size_t> violations;  // samples exceeding the cap bound
  std::vector<double> bin_radius;       // dyadic radius bins (upper edges)
  std::vector<double> bin_max_angle;    // max d/|x - apex| per bin, -1 empty
};

/// Fits the best plane_dim-dimensional plane through `apex` by principal
/// axes of the sample second-moment matrix, then reports the smallest C with
/// d(x, plane) <= C |x - apex|^(3/2) for every sample. Samples that would
/// need C beyond 10^3 are listed as violations. The per-radius maximum of
/// the opening angle d/|x - apex| is binned dyadically as a trend report.
/// Needs at least 30 samples.
CuspConeAudit cusp_cone_audit(const std::vector<NodalSample>& samples,
                              const RVector& apex, int plane_dim);

struct CoveringStep {
  double m = 0.0;               // scale exponent: covering scale is 2^-m
  double log2_count = 0.0;      // log2 of the covering-count bound
  double log2_premeasure = 0.0; // log2 of scale^(n-2+gamma) * count
  double premeasure = 0.0;      // may under/overflow; see log2_premeasure
};

struct CoveringIteration {
  int n = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  std::vector<CoveringStep> steps;  // steps[0] is the initial state
};

/// Iterates the covering recursion m_{k+1} = m_k (1 + epsilon),
/// count_{k+1} = count_k * ((sqrt(n)+1) * 2^(m_k epsilon - 1))^(n-2), and
/// tracks the (n-2+gamma)-dimensional premeasure scale^(n-2+gamma) * count.
/// For gamma > 0 the premeasure tends to zero; for gamma = 0 it grows at the
/// fixed rate (n-2) * log2((sqrt(n)+1)/2) bits per step and never vanishes.
CoveringIteration covering_iteration(int n, double epsilon, double gamma,
                                     int steps, double n0 = 1.0,
                                     double m0 = 1.0);

/// Covering-count bound ((sqrt(n)+1)/(2 delta))^(n-2) for the portion of an
/// (n-2)-plane inside the unit cube, by cubes of side 2 delta.
double covering_bound(int n, double delta);

/// Direct covering construction matching covering_bound: a cube of side
/// 2 delta contains, in any (n-2)-plane through its center, a square of side
/// 2 delta / sqrt(n-2) (inscribed-ball argument), and the plane patch has
/// extent at most sqrt(n) per in-plane axis, so
/// ceil(sqrt(n) sqrt(n-2) / (2 delta))^(n-2) cubes suffice.
std::uint64_t direct_covering_count(int n, double delta);

/// CSV: one row per sample with coordinates, |psi|, |grad psi|, order,
/// stratum and invariance dimension. Unlabeled sets get order 0,
/// "unclassified" and -1 in the label columns.
void save_nodal_set(const StratifiedNodalSet& set, const std::string& path);

}  // namespace spinodal
