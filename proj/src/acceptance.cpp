#include "spinodal/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <utility>

#include "spinodal/clifford.hpp"
#include "spinodal/common.hpp"
#include "spinodal/config.hpp"
#include "spinodal/corpus.hpp"
#include "spinodal/fields.hpp"
#include "spinodal/frequency.hpp"
#include "spinodal/geometry.hpp"
#include "spinodal/green.hpp"
#include "spinodal/harmonic.hpp"
#include "spinodal/identities.hpp"
#include "spinodal/nodal.hpp"
#include "spinodal/rng.hpp"
#include "spinodal/svg.hpp"

namespace spinodal {
namespace {

// Pinned tolerances and thresholds, one name per gate.
constexpr double kTolCliffordRelations = 1.0e-12;
constexpr double kTolDiracSquarePoly = 1.0e-10;
constexpr double kWaveSlopeLo = 3.7;
constexpr double kWaveSlopeHi = 4.3;
constexpr double kTolStencil4d = 1.0e-3;
constexpr double kTolFrequencyDegree = 1.0e-6;
constexpr double kAuditConstantCap = 1.0e3;
constexpr double kTolBoundaryCancellation = 1.0e-8;
constexpr double kHardySlackFloor = -1.0e-10;
constexpr double kPohozaevSlopeMin = 1.8;
constexpr double kPohozaevGainMin = 2.0;
constexpr double kTolNewtonReconstruct = 1.0e-3;
constexpr double kNewtonRefineFactor = 2.0;
constexpr double kTolCoefficientRecovery = 1.0e-2;
constexpr double kTailSlopeMargin = 0.3;
constexpr double kDimensionSlack = 0.15;
constexpr double kTolPremeasure = 1.0e-6;

// Seed stream tags, one per criterion that draws randomness.
constexpr std::uint64_t kTagSquare = 0x61637132ULL;
constexpr std::uint64_t kTagCancel = 0x61637135ULL;
constexpr std::uint64_t kTagHardy = 0x61637136ULL;
constexpr std::uint64_t kTagNewton = 0x61637138ULL;
constexpr std::uint64_t kTagDecompose = 0x61637139ULL;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return std::string(buf);
}

std::shared_ptr<const CliffordRep> make_rep(int n) {
  return std::make_shared<const CliffordRep>(build_clifford_rep(n));
}

GridSpec ball_grid(int n, int m) {
  GridSpec g;
  g.n = n;
  g.R = 1.0;
  g.points_per_axis = m;
  g.sphere_nodes = 512;
  return g;
}

/// Collects per-part verdicts; the criterion passes iff every check passed.
struct Gate {
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& note) {
    ok = ok && cond;
    notes.push_back(cond ? note : "FAILED: " + note);
  }
  std::string detail() const {
    std::string joined;
    for (const std::string& s : notes) {
      if (!joined.empty()) joined += "; ";
      joined += s;
    }
    return joined;
  }
};

/// Max node residual of D(D psi) + (stencil laplacian of psi), i.e. how far
/// the discrete operator is from squaring to minus the laplacian.
double dirac_square_residual(const SpinorField& field) {
  const SpinorField dd = apply_dirac(apply_dirac(field));
  field.ensure_laplacian_grid();
  double worst = 0.0;
  const std::size_t count = field.grid().node_count();
  for (std::size_t flat = 0; flat < count; ++flat) {
    if (!dd.has_node(flat)) continue;
    CVector lap;
    if (!field.laplacian_node(flat, &lap)) continue;
    worst = std::max(worst, (dd.node_value(flat) + lap).norm());
  }
  return worst;
}

/// Max node residual of D(D psi) - |xi|^2 psi on a plane wave, whose exact
/// laplacian is -|xi|^2 psi.
double wave_square_residual(std::shared_ptr<const CliffordRep> rep,
                            const GridSpec& grid, const RVector& xi) {
  const SpinorField field = synth_plane_wave(rep, grid, xi, 1);
  const SpinorField dd = apply_dirac(apply_dirac(field));
  const double k2 = xi.squaredNorm();
  double worst = 0.0;
  const std::size_t count = grid.node_count();
  for (std::size_t flat = 0; flat < count; ++flat) {
    if (!dd.has_node(flat)) continue;
    worst = std::max(worst,
                     (dd.node_value(flat) - k2 * field.node_value(flat)).norm());
  }
  return worst;
}

/// Largest coefficient deviation between two spinor polynomials, relative to
/// the largest reference coefficient.
double poly_coeff_rel_err(const HomogeneousSpinorPoly& got,
                          const HomogeneousSpinorPoly& want) {
  require(got.fiber_dim() == want.fiber_dim(), ErrorKind::shape_mismatch,
          "coefficient comparison: fiber mismatch");
  const double scale = want.max_abs_coeff();
  require(scale > 0.0, ErrorKind::degenerate_field,
          "coefficient comparison: zero reference");
  double worst = 0.0;
  for (int c = 0; c < want.fiber_dim(); ++c) {
    const auto& gt = got.component(c).terms();
    const auto& wt = want.component(c).terms();
    for (const auto& [a, w] : wt) {
      const auto it = gt.find(a);
      const cplx gv = (it != gt.end()) ? it->second : cplx(0.0, 0.0);
      worst = std::max(worst, std::abs(gv - w));
    }
    // Spurious coefficients present only in the recovered polynomial.
    for (const auto& [a, gv] : gt) {
      if (wt.count(a) == 0) worst = std::max(worst, std::abs(gv));
    }
  }
  return worst / scale;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(count - 1));
  }
  return out;
}

// ===========================================================================
// Criteria
// ===========================================================================

void criterion_clifford(const AcceptanceOptions&, Gate* g) {
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    worst = std::max(worst, clifford_relation_residual(build_clifford_rep(n)));
  }
  g->check(worst <= kTolCliffordRelations,
           "relation residual " + num(worst) + " over n=2..6 (tol " +
               num(kTolCliffordRelations) + ")");
}

void criterion_dirac_square(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  Rng rng(o.seed ^ kTagSquare);
  const RVector origin = RVector::Zero(o.n);

  // Degree-3 polynomial: the stencils are exact, so only rounding remains.
  const SpinorField poly = synth_harmonic_poly(
      rep, ball_grid(o.n, 17), random_harmonic_mix(*rep, 3, &rng), origin);
  const double poly_res = dirac_square_residual(poly);
  g->check(poly_res <= kTolDiracSquarePoly,
           "polynomial residual " + num(poly_res) + " (tol " +
               num(kTolDiracSquarePoly) + ")");

  // Plane wave under h -> h/2: fourth-order decay of the stencil error.
  const RVector xi = random_unit_vector(o.n, &rng) * 1.3;
  const double e_coarse = wave_square_residual(rep, ball_grid(o.n, 17), xi);
  const double e_fine = wave_square_residual(rep, ball_grid(o.n, 33), xi);
  const double slope = std::log2(e_coarse / e_fine);
  g->check(slope >= kWaveSlopeLo && slope <= kWaveSlopeHi,
           "wave error slope " + num(slope) + " (want 4 +- 0.3)");

  // Dimension-4 grid at 33^4: the residual must sit at the h^4 scale.
  auto rep4 = (o.n == 4) ? rep : make_rep(4);
  Rng rng4(o.seed ^ (kTagSquare + 4));
  const RVector xi4 = random_unit_vector(4, &rng4) * 1.1;
  const double e4 = wave_square_residual(rep4, ball_grid(4, 33), xi4);
  g->check(e4 <= kTolStencil4d,
           "33^4 wave residual " + num(e4) + " (tol " + num(kTolStencil4d) + ")");
}

void criterion_frequency_degree(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const GridSpec grid = ball_grid(o.n, 33);
  const RVector origin = RVector::Zero(o.n);
  const ModelMetric flat = ModelMetric::flat(o.n);
  const std::vector<double> radii = {0.15, 0.3, 0.45, 0.6, 0.75};
  double worst = 0.0;
  bool orders_exact = true;
  for (int k = 1; k <= 4; ++k) {
    const auto basis = dirac_harmonic_basis(*rep, k);
    const SpinorField field = synth_harmonic_poly(rep, grid, basis[0], origin);
    const FrequencyProfile profile =
        frequency_profile(field, origin, radii, flat);
    for (const double nv : profile.order) {
      worst = std::max(worst, std::abs(nv - static_cast<double>(k)));
    }
    const VanishingOrder vo = vanishing_order(field, origin, 0.4);
    orders_exact = orders_exact && (vo.order == k);
  }
  g->check(worst <= kTolFrequencyDegree,
           "max |N - k| " + num(worst) + " for k=1..4 (tol " +
               num(kTolFrequencyDegree) + ")");
  g->check(orders_exact, "vanishing orders snap to k exactly for k=1..4");
}

void criterion_monotonicity(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const auto corpus = manufactured_corpus(rep, ball_grid(o.n, 33), o.seed);
  const RVector origin = RVector::Zero(o.n);
  const ModelMetric flat = ModelMetric::flat(o.n);
  const std::vector<double> radii = linspace(0.12, 0.72, 12);
  double worst_fit = 0.0;
  std::size_t total_violations = 0;
  bool harmonic_exact = true;
  for (const CorpusEntry& entry : corpus) {
    const FrequencyProfile profile =
        frequency_profile(entry.field, origin, radii, flat);
    const MonotonicityAudit audit = monotonicity_audit(profile, 0.5, 1.0);
    total_violations += audit.violations.size();
    worst_fit = std::max(worst_fit, audit.c_am_fit);
    if (entry.exactly_harmonic && audit.c_am_fit != 0.0) harmonic_exact = false;
  }
  g->check(std::isfinite(worst_fit) && worst_fit <= kAuditConstantCap,
           "max fitted constant " + num(worst_fit) + " over " +
               std::to_string(corpus.size()) + " fields (cap " +
               num(kAuditConstantCap) + ")");
  g->check(total_violations == 0, "violations at beta=1/2, shift 1: " +
                                      std::to_string(total_violations));
  g->check(harmonic_exact, "exactly harmonic fields fit constant 0");
}

void criterion_boundary_cancellation(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const GridSpec grid = ball_grid(o.n, 33);
  const RVector origin = RVector::Zero(o.n);
  const ModelMetric flat = ModelMetric::flat(o.n);
  Rng rng(o.seed ^ kTagCancel);
  double worst = 0.0;
  for (const int sign : {1, -1}) {
    const RVector xi = random_unit_vector(o.n, &rng) * rng.uniform(0.9, 1.5);
    const SpinorField field = synth_plane_wave(rep, grid, xi, sign);
    for (const double r : {0.3, 0.6}) {
      const double pairing = std::abs(boundary_dirac_pairing(field, origin, r));
      const double height = boundary_height(field, origin, r, flat);
      worst = std::max(worst, pairing / height);
    }
  }
  g->check(worst <= kTolBoundaryCancellation,
           "max |boundary pairing| / H " + num(worst) + " (tol " +
               num(kTolBoundaryCancellation) + ")");
}

void criterion_hardy(const AcceptanceOptions& o, Gate* g) {
  for (const int n : {3, 4}) {
    auto rep = make_rep(n);
    const GridSpec grid = ball_grid(n, 17);
    const RVector origin = RVector::Zero(n);
    const double r = hardy_radius(grid, ModelMetric::flat(n));
    double min_slack = std::numeric_limits<double>::infinity();
    for (const CorpusEntry& entry : manufactured_corpus(rep, grid, o.seed)) {
      min_slack = std::min(min_slack,
                           hardy_slack(entry.field, origin, r).slack);
    }
    for (int i = 0; i < 50; ++i) {
      const SpinorField f = random_smooth_field(
          rep, grid, o.seed ^ (kTagHardy + 1000ULL * static_cast<std::uint64_t>(n) +
                               static_cast<std::uint64_t>(i)));
      min_slack = std::min(min_slack, hardy_slack(f, origin, r).slack);
    }
    g->check(min_slack >= kHardySlackFloor,
             "n=" + std::to_string(n) + " min slack " + num(min_slack) +
                 " over corpus + 50 random fields at r=" + num(r));
  }
}

void criterion_pohozaev(const AcceptanceOptions&, Gate* g) {
  // Convergence needs the 129^n level, so this criterion is pinned to n=3.
  // Every field below is pinned as well: the slope estimate compares three
  // grids of the same field, so the inputs must not vary with the seed.
  const int n = 3;
  auto rep = make_rep(n);
  const RVector origin = RVector::Zero(n);
  const double r = 0.5;

  RVector xi1(n), xi2(n);
  xi1 << 1.2, -0.8, 0.5;
  xi2 << -0.9, 1.4, 0.7;
  const auto basis = dirac_harmonic_basis(*rep, 2);
  CVector e0 = CVector::Zero(rep->fiber_dim);
  e0[0] = 1.0;
  const double bc = calibrate_bubble(*rep, e0);

  struct Kind {
    const char* name;
    std::function<SpinorField(const GridSpec&)> build;
  };
  const int levels[3] = {33, 65, 129};
  auto residuals = [&](const Kind& kind, double* res) {
    for (int i = 0; i < 3; ++i) {
      SpinorField field = kind.build(ball_grid(n, levels[i]));
      field.set_eval_mode(EvalMode::interp_linear);
      const PohozaevReport p = pohozaev_residual(field, origin, r);
      res[i] = std::abs(p.residual) / p.scale;
    }
  };

  // Oscillatory fields carry a strong, uniformly-signed interpolation error,
  // so the balance residual decays at clean second order.
  const std::vector<Kind> waves = {
      {"wave+", [&](const GridSpec& gr) { return synth_plane_wave(rep, gr, xi1, 1); }},
      {"wave-", [&](const GridSpec& gr) { return synth_plane_wave(rep, gr, xi2, -1); }}};
  for (const Kind& kind : waves) {
    double res[3] = {0.0, 0.0, 0.0};
    residuals(kind, res);
    const double slope =
        (res[2] > 0.0) ? 0.5 * std::log2(res[0] / res[2])
                       : std::numeric_limits<double>::infinity();
    g->check(slope >= kPohozaevSlopeMin,
             std::string(kind.name) + " slope " + num(slope) + " (min " +
                 num(kPohozaevSlopeMin) + ")");
  }

  // For polynomial and localized profiles the boundary and volume
  // interpolation errors partially cancel, which makes the level-to-level
  // decay noisy; require a clear overall improvement across the 4x
  // refinement instead of a fitted order.
  const std::vector<Kind> slows = {
      {"harmonic",
       [&](const GridSpec& gr) {
         return synth_harmonic_poly(rep, gr, basis[0], origin);
       }},
      {"planted",
       [&](const GridSpec& gr) {
         return synth_planted(rep, gr, basis[0], 0.05, e0, origin);
       }},
      {"bubble",
       [&](const GridSpec& gr) { return synth_dirac_bubble(rep, gr, e0, bc); }}};
  for (const Kind& kind : slows) {
    double res[3] = {0.0, 0.0, 0.0};
    residuals(kind, res);
    const double gain = (res[2] > 0.0)
                            ? res[0] / res[2]
                            : std::numeric_limits<double>::infinity();
    g->check(gain >= kPohozaevGainMin,
             std::string(kind.name) + " refinement gain " + num(gain) +
                 " (min " + num(kPohozaevGainMin) + ")");
  }

  // Constant field: stencils, interpolation and quadrature all vanish
  // identically, so the balance is exact.
  ClosedFormData constant;
  CVector cval = CVector::Zero(rep->fiber_dim);
  cval[0] = cplx(0.6, -0.8);
  const int fiber = rep->fiber_dim;
  constant.value = [cval](const RVector&) { return cval; };
  constant.grad = [fiber](const RVector& x) {
    return Matrix::Zero(fiber, x.size()).eval();
  };
  constant.lap = [fiber](const RVector&) { return CVector::Zero(fiber).eval(); };
  SpinorField cf = synth_custom(rep, ball_grid(n, 33), std::move(constant));
  cf.set_eval_mode(EvalMode::interp_linear);
  const PohozaevReport cr = pohozaev_residual(cf, origin, r);
  g->check(cr.residual == 0.0 && cr.boundary == 0.0 && cr.volume == 0.0,
           "constant field balance exactly zero");
}

void criterion_newton(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  Rng rng(o.seed ^ kTagNewton);
  const RVector origin = RVector::Zero(o.n);
  const HomogeneousSpinorPoly mix = random_harmonic_mix(*rep, 2, &rng);

  std::vector<RVector> probes;
  while (probes.size() < 8) {
    RVector p(o.n);
    for (int i = 0; i < o.n; ++i) p(i) = rng.uniform(-0.3, 0.3);
    if (p.norm() <= 0.3) probes.push_back(p);
  }

  const SpinorField exact =
      synth_harmonic_poly(rep, ball_grid(o.n, 33), mix, origin);
  const RepresentationCheck chk = newton_represent(exact, origin, 0.6, probes);
  g->check(chk.max_rel_err <= kTolNewtonReconstruct,
           "analytic max rel err " + num(chk.max_rel_err) + " (tol " +
               num(kTolNewtonReconstruct) + ")");

  // Refinement halving is measured with interpolated evaluation so the grid
  // itself is the dominant error source; pinned to n=3 for the 65^n level.
  auto rep3 = (o.n == 3) ? rep : make_rep(3);
  Rng rng3(o.seed ^ (kTagNewton + 3));
  const HomogeneousSpinorPoly mix3 =
      (o.n == 3) ? mix : random_harmonic_mix(*rep3, 2, &rng3);
  std::vector<RVector> probes3;
  while (probes3.size() < 8) {
    RVector p(3);
    for (int i = 0; i < 3; ++i) p(i) = rng3.uniform(-0.3, 0.3);
    if (p.norm() <= 0.3) probes3.push_back(p);
  }
  const RVector origin3 = RVector::Zero(3);
  double errs[2] = {0.0, 0.0};
  const int levels[2] = {33, 65};
  for (int i = 0; i < 2; ++i) {
    SpinorField f =
        synth_harmonic_poly(rep3, ball_grid(3, levels[i]), mix3, origin3);
    f.set_eval_mode(EvalMode::interp_linear);
    errs[i] = newton_represent(f, origin3, 0.6, probes3).max_rel_err;
  }
  const double factor = errs[0] / errs[1];
  g->check(factor >= kNewtonRefineFactor,
           "interp error factor 33->65: " + num(factor) + " (min " +
               num(kNewtonRefineFactor) + ")");
}

void criterion_decomposition(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const GridSpec grid = ball_grid(o.n, 33);
  const RVector origin = RVector::Zero(o.n);
  for (int k = 1; k <= 3; ++k) {
    Rng rng(o.seed ^ (kTagDecompose + static_cast<std::uint64_t>(k)));
    const HomogeneousSpinorPoly leading = random_harmonic_mix(*rep, k, &rng);
    const CVector dir = random_unit_spinor(rep->fiber_dim, &rng);
    const SpinorField field =
        synth_planted(rep, grid, leading, 0.05, dir, origin);
    const Decomposition dec =
        decompose(field, origin, static_cast<double>(k) + 0.6, 0.5);
    require(static_cast<int>(dec.terms.size()) > k, ErrorKind::shape_mismatch,
            "decomposition is missing the leading degree");
    const double rel = poly_coeff_rel_err(dec.terms[static_cast<std::size_t>(k)],
                                          leading);
    g->check(rel <= kTolCoefficientRecovery,
             "k=" + std::to_string(k) + " coefficient rel err " + num(rel) +
                 " (tol " + num(kTolCoefficientRecovery) + ")");
    const double want_slope = static_cast<double>(k) + kTailSlopeMargin;
    g->check(dec.q_exponent_fit >= want_slope && dec.q_exponent_fit < 50.0,
             "k=" + std::to_string(k) + " tail exponent " +
                 num(dec.q_exponent_fit) + " (min " + num(want_slope) + ")");
  }
}

void criterion_box_dimension(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const auto corpus = manufactured_corpus(rep, ball_grid(o.n, 33), o.seed);
  const double bound = static_cast<double>(o.n) - 2.0 + kDimensionSlack;
  const std::vector<double> scales = {0.4, 0.2, 0.1, 0.05};
  for (const CorpusEntry& entry : corpus) {
    if (entry.order < 1) continue;
    const StratifiedNodalSet set = extract_nodal(entry.field);
    if (set.samples.size() < 100) {
      g->check(true, entry.name + " dust (" +
                         std::to_string(set.samples.size()) + " samples)");
      continue;
    }
    const double dim = box_dimension(set.samples, scales).dimension;
    g->check(dim <= bound,
             entry.name + " dim " + num(dim) + " (bound " + num(bound) + ")");
  }

  // Negative control: a lattice filling a (n-1)-plane must land near n-1 and
  // must fail the n-2 bound. Lattice pitch divides every scale, so counts are
  // exact powers and the fitted slope is exactly n-1.
  const double spacing = (o.n == 2) ? 0.0125 : 0.025;
  const int per_axis = static_cast<int>(std::lround(1.6 / spacing));
  std::vector<NodalSample> plane;
  std::vector<int> idx(static_cast<std::size_t>(o.n - 1), 0);
  while (true) {
    NodalSample s;
    s.x = RVector::Zero(o.n);
    for (int a = 0; a < o.n - 1; ++a) {
      s.x(a) = spacing * static_cast<double>(idx[static_cast<std::size_t>(a)]);
    }
    plane.push_back(std::move(s));
    int axis = o.n - 2;
    while (axis >= 0) {
      if (++idx[static_cast<std::size_t>(axis)] < per_axis) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  const double plane_dim = box_dimension(plane, scales).dimension;
  g->check(plane_dim >= static_cast<double>(o.n) - 1.0 - kDimensionSlack,
           "control plane dim " + num(plane_dim) + " (want >= " +
               num(static_cast<double>(o.n) - 1.0 - kDimensionSlack) + ")");
  g->check(plane_dim > bound,
           "control plane correctly fails the bound " + num(bound));
}

void criterion_stratification(const AcceptanceOptions& o, Gate* g) {
  auto rep = make_rep(o.n);
  const auto corpus = manufactured_corpus(rep, ball_grid(o.n, 33), o.seed);
  const RVector origin = RVector::Zero(o.n);
  for (const CorpusEntry& entry : corpus) {
    if (entry.order < 1) continue;
    const NodalLabel label = classify_point(entry.field, origin, 0.25);
    const Stratum want_stratum = (entry.order == 1) ? Stratum::z1 : Stratum::zge2;
    bool entry_ok = label.order == static_cast<double>(entry.order) &&
                    label.stratum == want_stratum &&
                    label.invariance_dim == entry.invariance &&
                    label.invariance_dim <= o.n - 2 &&
                    entry.invariance <= o.n - 2;
    if (want_stratum == Stratum::z1) {
      entry_ok = entry_ok && label.gradient_rank >= 2;
    }
    g->check(entry_ok, entry.name + " order " + num(label.order) + " " +
                           stratum_name(label.stratum) + " l=" +
                           std::to_string(label.invariance_dim) +
                           " (want k=" + std::to_string(entry.order) +
                           " l=" + std::to_string(entry.invariance) + ")");
  }
}

void criterion_covering(const AcceptanceOptions&, Gate* g) {
  for (const int n : {3, 4}) {
    for (const double gamma : {0.05, 0.1, 0.5}) {
      const CoveringIteration it = covering_iteration(n, 0.5, gamma, 40);
      const double last = it.steps.back().premeasure;
      g->check(last < kTolPremeasure,
               "n=" + std::to_string(n) + " gamma=" + num(gamma) +
                   " premeasure " + num(last) + " after 40 steps");
    }
    const CoveringIteration flat_it = covering_iteration(n, 0.5, 0.0, 40);
    bool positive = true;
    bool finite = true;
    for (const CoveringStep& s : flat_it.steps) {
      positive = positive && s.premeasure > 0.0;
      finite = finite && std::isfinite(s.log2_premeasure);
    }
    const bool nondecaying = flat_it.steps.back().premeasure >=
                             flat_it.steps.front().premeasure * (1.0 - 1.0e-12);
    g->check(positive && finite && nondecaying,
             "n=" + std::to_string(n) +
                 " gamma=0 premeasure bounded away from zero");
    for (const double delta : {0.25, 0.125, 0.0625}) {
      const double direct =
          static_cast<double>(direct_covering_count(n, delta));
      const double bound = covering_bound(n, delta);
      g->check(direct <= bound, "n=" + std::to_string(n) + " delta=" +
                                    num(delta) + " direct " + num(direct) +
                                    " <= bound " + num(bound));
    }
  }
}

void emit_artifacts(const AcceptanceOptions& o, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto rep = make_rep(o.n);
  const RVector origin = RVector::Zero(o.n);
  const ModelMetric flat = ModelMetric::flat(o.n);

  RunConfig cfg;
  cfg.dimension = o.n;
  cfg.points_per_axis = 17;
  cfg.field_kind = "planted";
  cfg.degree = 2;
  cfg.amplitude = 0.05;
  cfg.radii = {0.2, 0.3, 0.4};
  cfg.seed = o.seed;
  cfg.output_dir = dir;
  const std::string hash = cfg.hash();
  const SpinorField field = field_from_config(cfg, rep);

  const FrequencyProfile profile =
      frequency_profile(field, origin, cfg.radii, flat);
  const std::string freq_path = dir + "/frequency.csv";
  save_frequency_profile(profile, freq_path);
  stamp_config(freq_path, hash);

  const Decomposition dec = decompose(field, origin, 2.6, 0.5);
  const std::string dec_path = dir + "/decomposition.json";
  save_decomposition(dec, dec_path);
  stamp_config(dec_path, hash);

  const double hr = hardy_radius(cfg.grid(), flat);
  const std::vector<HardyReport> hardy = {hardy_slack(field, origin, hr)};
  const std::vector<PohozaevReport> poho = {
      pohozaev_residual(field, origin, 0.5)};
  const std::vector<LichnerowiczReport> lich = {
      lichnerowicz_residual(field, origin, 0.5, flat)};
  const std::string id_path = dir + "/identities.jsonl";
  save_identity_reports(hardy, poho, lich, id_path);
  stamp_config(id_path, hash);

  SvgSeries series;
  series.x = profile.radii;
  series.y = profile.order;
  write_svg_plot(dir + "/frequency.svg", "frequency profile N(r)", {series});

  RunConfig ncfg = cfg;
  ncfg.field_kind = "planar";
  ncfg.degree = 1;
  const std::string nhash = ncfg.hash();
  const SpinorField nfield = field_from_config(ncfg, rep);
  StratifiedNodalSet set = extract_nodal(nfield, ncfg.c0, ncfg.refine_levels);
  classify_all(nfield, &set, 0.2);
  const std::string nodal_path = dir + "/nodal.csv";
  save_nodal_set(set, nodal_path);
  stamp_config(nodal_path, nhash);
}

void criterion_determinism(const AcceptanceOptions& o, Gate* g) {
  const std::string dir_a = o.artifact_dir + "/a";
  const std::string dir_b = o.artifact_dir + "/b";
  emit_artifacts(o, dir_a);
  emit_artifacts(o, dir_b);
  const std::vector<std::string> names = {"frequency.csv", "decomposition.json",
                                          "identities.jsonl", "frequency.svg",
                                          "nodal.csv"};
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::io, "determinism: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  bool identical = true;
  for (const std::string& name : names) {
    if (slurp(dir_a + "/" + name) != slurp(dir_b + "/" + name)) {
      identical = false;
      g->check(false, name + " differs between runs");
    }
  }
  if (identical) {
    g->check(true, std::to_string(names.size()) +
                       " artifacts byte-identical across two runs");
  }
}

void run_one(std::vector<CriterionResult>* out, int index, const char* name,
             const std::function<void(const AcceptanceOptions&, Gate*)>& fn,
             const AcceptanceOptions& opts) {
  CriterionResult result;
  result.index = index;
  result.name = name;
  Gate gate;
  try {
    fn(opts, &gate);
    result.passed = gate.ok;
    result.detail = gate.detail();
  } catch (const std::exception& e) {
    result.passed = false;
    result.detail = std::string("aborted: ") + e.what();
  }
  out->push_back(std::move(result));
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  require(opts.n >= 2 && opts.n <= 4, ErrorKind::domain,
          "acceptance: primary dimension must be 2, 3 or 4");
  require(!opts.artifact_dir.empty(), ErrorKind::config,
          "acceptance: artifact directory must be nonempty");
  std::vector<CriterionResult> out;
  run_one(&out, 1, "clifford_relations", criterion_clifford, opts);
  run_one(&out, 2, "dirac_square_laplacian", criterion_dirac_square, opts);
  run_one(&out, 3, "frequency_matches_degree", criterion_frequency_degree, opts);
  run_one(&out, 4, "frequency_almost_monotone", criterion_monotonicity, opts);
  run_one(&out, 5, "eigenfield_boundary_cancellation",
          criterion_boundary_cancellation, opts);
  run_one(&out, 6, "hardy_inequality", criterion_hardy, opts);
  run_one(&out, 7, "pohozaev_balance_convergence", criterion_pohozaev, opts);
  run_one(&out, 8, "newton_reconstruction", criterion_newton, opts);
  run_one(&out, 9, "taylor_tail_decomposition", criterion_decomposition, opts);
  run_one(&out, 10, "nodal_box_dimension", criterion_box_dimension, opts);
  run_one(&out, 11, "nodal_stratification", criterion_stratification, opts);
  run_one(&out, 12, "covering_premeasure", criterion_covering, opts);
  run_one(&out, 13, "deterministic_artifacts", criterion_determinism, opts);
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace spinodal
