#include "spinodal/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "spinodal/harmonic.hpp"
#include "spinodal/parallel.hpp"
#include "spinodal/polynomial.hpp"

namespace spinodal {

namespace {

constexpr double kConeCap = 1.0e3;  // largest admissible cusp constant

/// Touches every lazy evaluation path once so the parallel sweeps that
/// follow only read shared caches (interpolation grids, sphere rules,
/// flattened polynomial terms).
void warm_eval(const SpinorField& field) {
  if (field.eval_mode() != EvalMode::analytic) field.ensure_gradient_grids();
  const RVector origin = RVector::Zero(field.grid().n);
  (void)field.value_at(origin);
  (void)field.gradient_at(origin);
}

struct CellCandidate {
  RVector x;
  double abs_psi = 0.0;
  double abs_grad = 0.0;
};

/// Depth-first bisection of one cell: the detection test is re-run with the
/// scale halved at each level, and only centers surviving at the deepest
/// level are emitted. Child order is lexicographic (axis 0 slowest, minus
/// before plus), which keeps the output ordering deterministic.
void refine_cell(const SpinorField& field, const RVector& center, double size,
                 int level, int max_level, double c0,
                 std::vector<CellCandidate>* out) {
  const double abs_psi = field.value_at(center).norm();
  const double abs_grad = field.gradient_at(center).norm();
  if (!(abs_psi < c0 * size * (abs_grad + size))) return;
  if (level == max_level) {
    out->push_back({center, abs_psi, abs_grad});
    return;
  }
  const int n = field.grid().n;
  const int children = 1 << n;
  for (int mask = 0; mask < children; ++mask) {
    RVector child = center;
    for (int a = 0; a < n; ++a) {
      const bool plus = (mask >> (n - 1 - a)) & 1;
      child[a] += (plus ? 0.25 : -0.25) * size;
    }
    refine_cell(field, child, 0.5 * size, level + 1, max_level, c0, out);
  }
}

/// Real rank of a matrix with a relative pivot threshold; rank 0 for the
/// zero matrix.
int real_rank(const Eigen::MatrixXd& m, double threshold) {
  if (m.size() == 0 || m.norm() == 0.0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(threshold);
  return static_cast<int>(lu.rank());
}

void csv_double(std::string* line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  *line += buf;
}

}  // namespace

const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::z1:
      return "Z1";
    case Stratum::zge2:
      return "Zge2";
    case Stratum::unclassified:
      return "unclassified";
  }
  return "unclassified";
}

StratifiedNodalSet extract_nodal(const SpinorField& field, double c0,
                                 int refine_levels) {
  const GridSpec& grid = field.grid();
  require(c0 > 0.0, ErrorKind::domain,
          "extract_nodal: threshold constant must be positive");
  require(refine_levels >= 0 && refine_levels <= 8, ErrorKind::domain,
          "extract_nodal: refinement depth must lie in [0, 8]");

  StratifiedNodalSet set;
  set.h = grid.h();
  set.c0 = c0;
  set.refine_levels = refine_levels;

  const int n = grid.n;
  const double h = set.h;
  const int cells_per_axis = grid.points_per_axis - 1;
  std::size_t cell_count = 1;
  for (int a = 0; a < n; ++a) cell_count *= cells_per_axis;

  // A cell is admitted when every point of it stays inside the evaluation
  // band of the grid (interpolation cube minus the derivative stencil
  // margin), so refinement never leaves the safe region.
  const double safe =
      grid.R - 3.0 * h - 0.5 * h * std::sqrt(static_cast<double>(n));
  if (safe <= 0.0) return set;

  const auto cell_center = [&](std::size_t flat) {
    RVector c(n);
    std::size_t rest = flat;
    for (int a = n - 1; a >= 0; --a) {
      const int idx = static_cast<int>(rest % cells_per_axis);
      rest /= cells_per_axis;
      c[a] = -grid.R + (idx + 0.5) * h;
    }
    return c;
  };

  warm_eval(field);

  // Phase 1: flag cells passing the coarse test.
  std::vector<std::uint8_t> pass(cell_count, 0);
  parallel_for(cell_count, [&](std::size_t flat) {
    const RVector c = cell_center(flat);
    if (c.norm() > safe) return;
    const double abs_psi = field.value_at(c).norm();
    const double abs_grad = field.gradient_at(c).norm();
    if (abs_psi < c0 * h * (abs_grad + h)) pass[flat] = 1;
  });

  std::vector<std::size_t> active;
  for (std::size_t flat = 0; flat < cell_count; ++flat)
    if (pass[flat]) active.push_back(flat);

  // Phase 2: bisect the surviving cells; per-cell slots keep the final
  // ordering lexicographic in the cell index regardless of thread count.
  std::vector<std::vector<CellCandidate>> slots(active.size());
  parallel_for(active.size(), [&](std::size_t i) {
    const RVector c = cell_center(active[i]);
    // The coarse test is part of the recursion (level 0), so a cell that
    // passed phase 1 re-enters here and descends.
    refine_cell(field, c, h, 0, refine_levels, c0, &slots[i]);
  });

  for (const auto& slot : slots)
    for (const auto& cand : slot)
      set.samples.push_back({cand.x, cand.abs_psi, cand.abs_grad});
  return set;
}

int invariance_dimension(const HomogeneousSpinorPoly& leading) {
  const int n = leading.n();
  require(n >= 1, ErrorKind::invalid_dimension,
          "invariance_dimension: empty polynomial");
  const int degree = leading.degree();
  if (degree == 0 || leading.is_zero()) return n;

  const std::vector<MultiIndex> monos = monomials_of_degree(n, degree - 1);
  std::map<MultiIndex, int> row_of;
  for (std::size_t i = 0; i < monos.size(); ++i)
    row_of[monos[i]] = static_cast<int>(i);

  const int fiber = leading.fiber_dim();
  const int block = static_cast<int>(monos.size());
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Zero(2 * fiber * block, n);
  for (int c = 0; c < fiber; ++c) {
    for (int j = 0; j < n; ++j) {
      const Poly d = leading.component(c).derivative(j);
      for (const auto& term : d.terms()) {
        const auto it = row_of.find(term.first);
        require(it != row_of.end(), ErrorKind::construction,
                "invariance_dimension: inhomogeneous leading term");
        const int base = 2 * (c * block + it->second);
        m(base, j) += term.second.real();
        m(base + 1, j) += term.second.imag();
      }
    }
  }
  return n - real_rank(m, 1.0e-8);
}

NodalLabel classify_point(const SpinorField& field, const RVector& p,
                          double r0) {
  const int n = field.grid().n;
  require(p.size() == n, ErrorKind::shape_mismatch,
          "classify_point: point dimension mismatch");
  require(r0 > 0.0, ErrorKind::domain,
          "classify_point: classification radius must be positive");

  NodalLabel out;
  int order = 0;
  try {
    // Probe radii stay in [r0/8, r0]: candidates carry extraction jitter of
    // order h/4, and at probe radius r an off-zero offset d contaminates the
    // frequency by O(d^2/r^2) -- a ratio-4 geometric error under halving,
    // which the acceleration cancels, provided the radii never descend to
    // the jitter scale itself.
    order = vanishing_order(field, p, r0, 4).order;
  } catch (const Error&) {
    return out;  // no reliable limit: leave unclassified
  }
  out.order = static_cast<double>(order);

  const Matrix g = field.gradient_at(p);
  Eigen::MatrixXd stacked(2 * g.rows(), g.cols());
  stacked << g.real(), g.imag();
  out.gradient_rank = real_rank(stacked, 1.0e-9);

  if (order == 0) return out;  // not actually a zero
  if (order == 1) {
    out.stratum = Stratum::z1;
    // The leading term of a simple zero is linear, so its invariant
    // directions are exactly the null space of the gradient.
    out.invariance_dim = n - out.gradient_rank;
    return out;
  }

  try {
    const LeadingTermFit fit =
        fit_leading_term(field, p, order, 0.25 * r0, r0, 6);
    out.invariance_dim = invariance_dimension(fit.poly);
    out.fit_residual = fit.rel_residual;
    out.stratum = Stratum::zge2;
  } catch (const Error&) {
    // Order is known but the leading term could not be fitted (for example
    // a trace leaving the grid band); report the order, stay unclassified.
  }
  return out;
}

void classify_all(const SpinorField& field, StratifiedNodalSet* set,
                  double r0) {
  require(set != nullptr, ErrorKind::config, "classify_all: null set");
  set->labels.assign(set->samples.size(), NodalLabel{});
  if (set->samples.empty()) return;

  // First point serially: classification touches every lazy cache (sphere
  // rule, interpolation grids, flattened polynomials) exactly once.
  set->labels[0] = classify_point(field, set->samples[0].x, r0);
  parallel_for(set->samples.size() - 1, [&](std::size_t i) {
    set->labels[i + 1] = classify_point(field, set->samples[i + 1].x, r0);
  });
}

SpinorField blowup(const SpinorField& field, const RVector& p, double r) {
  const GridSpec& grid = field.grid();
  const int n = grid.n;
  require(p.size() == n, ErrorKind::shape_mismatch,
          "blowup: point dimension mismatch");
  require(r > 0.0, ErrorKind::domain, "blowup: radius must be positive");
  const double reach = p.norm() + 2.0 * r;
  require(reach <= grid.R * (1.0 + 1.0e-12), ErrorKind::domain,
          "blowup: the doubled ball leaves the domain");
  if (field.eval_mode() != EvalMode::analytic)
    require(reach <= grid.R - 3.0 * grid.h(), ErrorKind::resolution,
            "blowup: the doubled ball leaves the interpolation band");

  const double height =
      boundary_height(field, p, r, ModelMetric::flat(n));
  const double area = unit_sphere_area(n);
  require(height > 1.0e-280, ErrorKind::degenerate_field,
          "blowup: field has no mass on the blow-up sphere");
  const double scale =
      std::sqrt(height / (area * std::pow(r, n - 1)));

  const auto src = std::make_shared<const SpinorField>(field);
  const int fiber = field.rep().fiber_dim;
  ClosedFormData closed;
  closed.value = [src, p, r, scale, fiber](const RVector& x) -> CVector {
    if (x.norm() > 2.0 * (1.0 + 1.0e-12))
      return CVector::Zero(fiber);  // cube corners outside the blow-up ball
    return src->value_at(p + r * x) / scale;
  };
  closed.grad = [src, p, r, scale, fiber](const RVector& x) -> Matrix {
    if (x.norm() > 2.0 * (1.0 + 1.0e-12))
      return Matrix::Zero(fiber, x.size());
    return (r / scale) * src->gradient_at(p + r * x);
  };
  closed.lap = [src, p, r, scale, fiber](const RVector& x) -> CVector {
    if (x.norm() > 2.0 * (1.0 + 1.0e-12)) return CVector::Zero(fiber);
    return (r * r / scale) * src->laplacian_at(p + r * x);
  };

  GridSpec blown = grid;
  blown.R = 2.0;
  return synth_custom(field.rep_ptr(), blown, std::move(closed));
}

BoxCount box_dimension(const std::vector<NodalSample>& samples,
                       const std::vector<double>& scales) {
  require(samples.size() >= 100, ErrorKind::resolution,
          "box_dimension: needs at least 100 samples");
  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  require(sorted.size() >= 4, ErrorKind::resolution,
          "box_dimension: needs at least 4 distinct scales");
  require(sorted.back() > 0.0, ErrorKind::domain,
          "box_dimension: scales must be positive");

  BoxCount out;
  out.scales = sorted;
  for (const double delta : sorted) {
    std::set<std::vector<std::int64_t>> boxes;
    for (const auto& s : samples) {
      std::vector<std::int64_t> key(s.x.size());
      for (int a = 0; a < s.x.size(); ++a)
        key[a] = static_cast<std::int64_t>(std::floor(s.x[a] / delta));
      boxes.insert(std::move(key));
    }
    out.counts.push_back(boxes.size());
  }

  const std::size_t levels = sorted.size();
  std::vector<double> xs(levels), ys(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    xs[i] = std::log(1.0 / sorted[i]);
    ys[i] = std::log(static_cast<double>(out.counts[i]));
  }
  const double xbar = pairwise_sum(xs) / levels;
  const double ybar = pairwise_sum(ys) / levels;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < levels; ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  require(sxx > 0.0, ErrorKind::fit, "box_dimension: degenerate scale range");
  out.dimension = sxy / sxx;
  return out;
}

CuspConeAudit cusp_cone_audit(const std::vector<NodalSample>& samples,
                              const RVector& apex, int plane_dim) {
  const int n = static_cast<int>(apex.size());
  require(n >= 2, ErrorKind::invalid_dimension,
          "cusp_cone_audit: needs ambient dimension >= 2");
  require(plane_dim >= 1 && plane_dim <= n - 1, ErrorKind::domain,
          "cusp_cone_audit: plane dimension must lie in [1, n-1]");
  require(samples.size() >= 30, ErrorKind::resolution,
          "cusp_cone_audit: audit skipped, needs at least 30 samples");
  for (const auto& s : samples)
    require(s.x.size() == n, ErrorKind::shape_mismatch,
            "cusp_cone_audit: sample dimension mismatch");

  CuspConeAudit out;
  out.apex = apex;
  out.eps_fit = 0.5;

  // Principal axes of the second-moment matrix about the apex; the plane is
  // spanned by the top plane_dim axes. Column signs are fixed so repeated
  // runs produce identical bases.
  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : samples) {
    const Eigen::VectorXd q = s.x - apex;
    moment += q * q.transpose();
  }
  moment /= static_cast<double>(samples.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
  Eigen::MatrixXd basis(n, plane_dim);
  for (int k = 0; k < plane_dim; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 1 - k);
    int lead = 0;
    v.cwiseAbs().maxCoeff(&lead);
    if (v[lead] < 0.0) v = -v;
    basis.col(k) = v;
  }
  out.plane_basis = basis;

  constexpr int kBins = 6;
  double rho_max = 0.0;
  for (const auto& s : samples) rho_max = std::max(rho_max, (s.x - apex).norm());
  out.bin_radius.assign(kBins, 0.0);
  out.bin_max_angle.assign(kBins, -1.0);
  for (int b = 0; b < kBins; ++b)
    out.bin_radius[b] = rho_max * std::pow(2.0, -b);

  double c_needed = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::VectorXd q = samples[i].x - apex;
    const double rho = q.norm();
    if (rho <= 1.0e-300) continue;
    const double d = (q - basis * (basis.transpose() * q)).norm();
    c_needed = std::max(c_needed, d / std::pow(rho, 1.5));
    if (d > kConeCap * std::pow(rho, 1.5)) out.violations.push_back(i);
    if (rho_max > 0.0) {
      const int bin = std::min(
          kBins - 1,
          std::max(0, static_cast<int>(std::floor(-std::log2(rho / rho_max)))));
      out.bin_max_angle[bin] = std::max(out.bin_max_angle[bin], d / rho);
    }
  }
  out.c_fit = c_needed;
  return out;
}

CoveringIteration covering_iteration(int n, double epsilon, double gamma,
                                     int steps, double n0, double m0) {
  require(n >= 3, ErrorKind::domain,
          "covering_iteration: the recursion needs n >= 3");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::domain,
          "covering_iteration: epsilon must lie in (0, 1)");
  require(gamma >= 0.0, ErrorKind::domain,
          "covering_iteration: gamma must be nonnegative");
  require(steps >= 1 && steps <= 100000, ErrorKind::domain,
          "covering_iteration: steps must lie in [1, 100000]");
  require(n0 > 0.0 && m0 > 0.0, ErrorKind::domain,
          "covering_iteration: initial count and scale must be positive");

  CoveringIteration out;
  out.n = n;
  out.epsilon = epsilon;
  out.gamma = gamma;

  const double log2_ratio = std::log2(std::sqrt(static_cast<double>(n)) + 1.0);
  double m = m0;
  double log2_count = std::log2(n0);
  for (int k = 0; k <= steps; ++k) {
    CoveringStep step;
    step.m = m;
    step.log2_count = log2_count;
    step.log2_premeasure = log2_count - m * (n - 2 + gamma);
    step.premeasure = std::exp2(step.log2_premeasure);
    out.steps.push_back(step);
    log2_count += (n - 2) * (log2_ratio + m * epsilon - 1.0);
    m *= 1.0 + epsilon;
  }
  return out;
}

double covering_bound(int n, double delta) {
  require(n >= 3, ErrorKind::domain, "covering_bound: needs n >= 3");
  require(delta > 0.0, ErrorKind::domain,
          "covering_bound: scale must be positive");
  return std::pow((std::sqrt(static_cast<double>(n)) + 1.0) / (2.0 * delta),
                  n - 2);
}

std::uint64_t direct_covering_count(int n, double delta) {
  require(n >= 3, ErrorKind::domain, "direct_covering_count: needs n >= 3");
  require(delta >= 1.0e-6, ErrorKind::domain,
          "direct_covering_count: scale too small for an exact count");
  const double per_axis_real = std::ceil(
      std::sqrt(static_cast<double>(n)) * std::sqrt(static_cast<double>(n - 2)) /
      (2.0 * delta));
  const auto per_axis = static_cast<std::uint64_t>(per_axis_real);
  std::uint64_t count = 1;
  for (int k = 0; k < n - 2; ++k) count *= per_axis;
  return count;
}

void save_nodal_set(const StratifiedNodalSet& set, const std::string& path) {
  require(set.labels.empty() || set.labels.size() == set.samples.size(),
          ErrorKind::shape_mismatch,
          "save_nodal_set: label list does not match sample list");
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "save_nodal_set: cannot open " + path);

  const int n = set.samples.empty() ? 0 : static_cast<int>(set.samples[0].x.size());
  std::string header = "# spinodal-nodal v1\n# ";
  header += kArtifactVersion;
  header += "\n# h=";
  csv_double(&header, set.h);
  header += " c0=";
  csv_double(&header, set.c0);
  header += " refine_levels=" + std::to_string(set.refine_levels) + "\n";
  for (int a = 0; a < n; ++a) header += "x" + std::to_string(a + 1) + ",";
  header += "abs_psi,abs_grad,order,stratum,l\n";
  out << header;

  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const NodalSample& s = set.samples[i];
    const NodalLabel label =
        set.labels.empty() ? NodalLabel{} : set.labels[i];
    std::string line;
    for (int a = 0; a < n; ++a) {
      csv_double(&line, s.x[a]);
      line += ",";
    }
    csv_double(&line, s.abs_psi);
    line += ",";
    csv_double(&line, s.abs_grad);
    line += ",";
    csv_double(&line, label.order);
    line += ",";
    line += stratum_name(label.stratum);
    line += "," + std::to_string(label.invariance_dim) + "\n";
    out << line;
  }
  require(out.good(), ErrorKind::io, "save_nodal_set: write failed");
}

}  // namespace spinodal
