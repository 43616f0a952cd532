#include "spinodal/fields.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinodal/parallel.hpp"

namespace spinodal {

namespace {

constexpr double kDegenerateTol = 1e-14;
constexpr std::uint64_t kSphereRuleSeed = 0x53504e4f44414cULL;

std::size_t axis_stride(const GridSpec& grid, int axis) {
  std::size_t s = 1;
  for (int a = grid.n - 1; a > axis; --a) {
    s *= static_cast<std::size_t>(grid.points_per_axis);
  }
  return s;
}

}  // namespace

const char* field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::harmonic_poly: return "harmonic_poly";
    case FieldKind::plane_wave: return "plane_wave";
    case FieldKind::planted: return "planted";
    case FieldKind::dirac_bubble: return "dirac_bubble";
    case FieldKind::custom: return "custom";
  }
  return "custom";
}

// ---------------------------------------------------------------------------
// Closed-form evaluation per kind
// ---------------------------------------------------------------------------

namespace {

CVector closed_value(const FieldAnalytic& a, const CliffordRep& rep,
                     const RVector& x) {
  if (const auto* hp = std::get_if<HarmonicPolyData>(&a)) {
    return hp->poly.eval(x - hp->center);
  }
  if (const auto* pw = std::get_if<PlaneWaveData>(&a)) {
    const cplx phase = std::exp(cplx(0.0, x.dot(pw->xi)));
    return phase * pw->u;
  }
  if (const auto* pl = std::get_if<PlantedData>(&a)) {
    const RVector z = x - pl->center;
    const double rho = z.norm();
    CVector v = pl->leading.eval(z);
    if (rho > 0.0) {
      v += pl->amp * std::pow(rho, pl->exponent) * pl->direction;
    }
    return v;
  }
  if (const auto* bb = std::get_if<BubbleData>(&a)) {
    const double rho2 = x.squaredNorm();
    const double f = bb->c * std::pow(1.0 + rho2, -0.5 * rep.n);
    return f * (bb->u - rep.clifford(x) * bb->u);
  }
  if (const auto* cf = std::get_if<ClosedFormData>(&a)) {
    return cf->value(x);
  }
  fail(ErrorKind::domain, "field has no closed-form evaluator");
}

bool closed_gradient(const FieldAnalytic& a, const CliffordRep& rep,
                     const RVector& x, Matrix* out) {
  const int n = rep.n;
  const int N = rep.fiber_dim;
  if (const auto* hp = std::get_if<HarmonicPolyData>(&a)) {
    *out = hp->poly.grad(x - hp->center);
    return true;
  }
  if (const auto* pw = std::get_if<PlaneWaveData>(&a)) {
    const cplx phase = std::exp(cplx(0.0, x.dot(pw->xi)));
    Matrix g(N, n);
    for (int j = 0; j < n; ++j) {
      g.col(j) = cplx(0.0, pw->xi[j]) * phase * pw->u;
    }
    *out = g;
    return true;
  }
  if (const auto* pl = std::get_if<PlantedData>(&a)) {
    const RVector z = x - pl->center;
    const double rho = z.norm();
    Matrix g = pl->leading.grad(z);
    if (rho > 0.0) {
      const double s = pl->exponent;
      const double factor = pl->amp * s * std::pow(rho, s - 2.0);
      for (int j = 0; j < n; ++j) {
        g.col(j) += factor * z[j] * pl->direction;
      }
    }
    *out = g;
    return true;
  }
  if (const auto* bb = std::get_if<BubbleData>(&a)) {
    const double rho2 = x.squaredNorm();
    const double f = bb->c * std::pow(1.0 + rho2, -0.5 * rep.n);
    const double df_scale = -rep.n * bb->c * std::pow(1.0 + rho2, -0.5 * rep.n - 1.0);
    const CVector gu = rep.clifford(x) * bb->u;
    Matrix g(N, n);
    for (int j = 0; j < n; ++j) {
      g.col(j) = df_scale * x[j] * (bb->u - gu) - f * (rep.gammas[static_cast<std::size_t>(j)] * bb->u);
    }
    *out = g;
    return true;
  }
  if (const auto* cf = std::get_if<ClosedFormData>(&a)) {
    if (!cf->grad) return false;
    *out = cf->grad(x);
    return true;
  }
  return false;
}

bool closed_laplacian(const FieldAnalytic& a, const CliffordRep& rep,
                      const RVector& x, CVector* out) {
  const int n = rep.n;
  if (const auto* hp = std::get_if<HarmonicPolyData>(&a)) {
    *out = hp->poly.laplacian_eval(x - hp->center);
    return true;
  }
  if (const auto* pw = std::get_if<PlaneWaveData>(&a)) {
    const cplx phase = std::exp(cplx(0.0, x.dot(pw->xi)));
    *out = -pw->xi.squaredNorm() * phase * pw->u;
    return true;
  }
  if (const auto* pl = std::get_if<PlantedData>(&a)) {
    const RVector z = x - pl->center;
    const double rho = z.norm();
    CVector v = pl->leading.laplacian_eval(z);
    const double s = pl->exponent;
    if (rho > 0.0) {
      v += pl->amp * s * (s + n - 2.0) * std::pow(rho, s - 2.0) * pl->direction;
    } else {
      require(s > 2.0 || pl->amp == 0.0, ErrorKind::domain,
              "laplacian of the fractional tail is singular at the center");
    }
    *out = v;
    return true;
  }
  if (const auto* bb = std::get_if<BubbleData>(&a)) {
    const double rho2 = x.squaredNorm();
    const CVector gu = rep.clifford(x) * bb->u;
    const double lap_f =
        -bb->c * n * std::pow(1.0 + rho2, -0.5 * n - 2.0) * (n - 2.0 * rho2);
    const double cross = 2.0 * n * bb->c * std::pow(1.0 + rho2, -0.5 * n - 1.0);
    *out = lap_f * (bb->u - gu) + cross * gu;
    return true;
  }
  if (const auto* cf = std::get_if<ClosedFormData>(&a)) {
    if (!cf->lap) return false;
    *out = cf->lap(x);
    return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpinorField basics
// ---------------------------------------------------------------------------

RVector SpinorField::center() const {
  if (const auto* hp = std::get_if<HarmonicPolyData>(&analytic_)) return hp->center;
  if (const auto* pl = std::get_if<PlantedData>(&analytic_)) return pl->center;
  return RVector::Zero(grid_.n);
}

CVector SpinorField::node_value(std::size_t flat) const {
  require(loaded_[flat] != 0, ErrorKind::domain,
          "node value requested outside the loaded region");
  const int N = rep_->fiber_dim;
  CVector v(N);
  for (int c = 0; c < N; ++c) v[c] = values_[flat * N + c];
  return v;
}

void SpinorField::set_node_value(std::size_t flat, const CVector& v) {
  const int N = rep_->fiber_dim;
  for (int c = 0; c < N; ++c) values_[flat * N + c] = v[c];
  loaded_[flat] = 1;
}

double SpinorField::max_abs() const {
  const int N = rep_->fiber_dim;
  double best = 0.0;
  for (std::size_t i = 0; i < loaded_.size(); ++i) {
    if (!loaded_[i]) continue;
    for (int c = 0; c < N; ++c) {
      best = std::max(best, std::abs(values_[i * N + c]));
    }
  }
  return best;
}

CVector SpinorField::value_at(const RVector& x) const {
  if (mode_ == EvalMode::analytic &&
      !std::holds_alternative<std::monostate>(analytic_)) {
    return closed_value(analytic_, *rep_, x);
  }
  return interp_value(x, mode_ == EvalMode::interp_linear ? 2 : 4);
}

Matrix SpinorField::gradient_at(const RVector& x) const {
  if (mode_ == EvalMode::analytic) {
    Matrix g;
    if (closed_gradient(analytic_, *rep_, x, &g)) return g;
  }
  return interp_gradient(x, mode_ == EvalMode::interp_linear ? 2 : 4);
}

CVector SpinorField::laplacian_at(const RVector& x) const {
  if (mode_ == EvalMode::analytic) {
    CVector v;
    if (closed_laplacian(analytic_, *rep_, x, &v)) return v;
  }
  return interp_laplacian(x, mode_ == EvalMode::interp_linear ? 2 : 4);
}

CVector SpinorField::dirac_at(const RVector& x) const {
  const Matrix g = gradient_at(x);
  CVector v = CVector::Zero(rep_->fiber_dim);
  for (int j = 0; j < grid_.n; ++j) {
    v += rep_->gammas[static_cast<std::size_t>(j)] * g.col(j);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

CVector SpinorField::interp_value(const RVector& x, int order) const {
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  std::vector<AxisWeights> aw(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    aw[static_cast<std::size_t>(a)] = axis_interp_weights(grid_, a, x[a], order);
  }
  CVector acc = CVector::Zero(N);
  std::vector<int> off(static_cast<std::size_t>(n), 0);
  while (true) {
    double w = 1.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const auto& aa = aw[static_cast<std::size_t>(a)];
      w *= aa.w[off[static_cast<std::size_t>(a)]];
      idx[static_cast<std::size_t>(a)] = aa.base + off[static_cast<std::size_t>(a)];
    }
    const std::size_t flat = grid_.flat_index(idx);
    require(loaded_[flat] != 0, ErrorKind::domain,
            "interpolation stencil leaves the loaded region");
    for (int c = 0; c < N; ++c) acc[c] += w * values_[flat * N + c];
    int a = n - 1;
    for (; a >= 0; --a) {
      auto& o = off[static_cast<std::size_t>(a)];
      if (++o < aw[static_cast<std::size_t>(a)].count) break;
      o = 0;
    }
    if (a < 0) break;
  }
  return acc;
}

Matrix SpinorField::interp_gradient(const RVector& x, int order) const {
  ensure_gradient_grids();
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  std::vector<AxisWeights> aw(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    aw[static_cast<std::size_t>(a)] = axis_interp_weights(grid_, a, x[a], order);
  }
  Matrix acc = Matrix::Zero(N, n);
  std::vector<int> off(static_cast<std::size_t>(n), 0);
  while (true) {
    double w = 1.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const auto& aa = aw[static_cast<std::size_t>(a)];
      w *= aa.w[off[static_cast<std::size_t>(a)]];
      idx[static_cast<std::size_t>(a)] = aa.base + off[static_cast<std::size_t>(a)];
    }
    const std::size_t flat = grid_.flat_index(idx);
    require(grad_mask_[flat] != 0, ErrorKind::domain,
            "gradient interpolation leaves the differentiable region");
    for (int a = 0; a < n; ++a) {
      const auto& g = grad_grids_[static_cast<std::size_t>(a)];
      for (int c = 0; c < N; ++c) acc(c, a) += w * g[flat * N + c];
    }
    int a = n - 1;
    for (; a >= 0; --a) {
      auto& o = off[static_cast<std::size_t>(a)];
      if (++o < aw[static_cast<std::size_t>(a)].count) break;
      o = 0;
    }
    if (a < 0) break;
  }
  return acc;
}

CVector SpinorField::interp_laplacian(const RVector& x, int order) const {
  ensure_laplacian_grid();
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  std::vector<AxisWeights> aw(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    aw[static_cast<std::size_t>(a)] = axis_interp_weights(grid_, a, x[a], order);
  }
  CVector acc = CVector::Zero(N);
  std::vector<int> off(static_cast<std::size_t>(n), 0);
  while (true) {
    double w = 1.0;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const auto& aa = aw[static_cast<std::size_t>(a)];
      w *= aa.w[off[static_cast<std::size_t>(a)]];
      idx[static_cast<std::size_t>(a)] = aa.base + off[static_cast<std::size_t>(a)];
    }
    const std::size_t flat = grid_.flat_index(idx);
    require(lap_mask_[flat] != 0, ErrorKind::domain,
            "laplacian interpolation leaves the differentiable region");
    for (int c = 0; c < N; ++c) acc[c] += w * lap_grid_[flat * N + c];
    int a = n - 1;
    for (; a >= 0; --a) {
      auto& o = off[static_cast<std::size_t>(a)];
      if (++o < aw[static_cast<std::size_t>(a)].count) break;
      o = 0;
    }
    if (a < 0) break;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Stencil derivative grids
// ---------------------------------------------------------------------------

void SpinorField::ensure_gradient_grids() const {
  if (!grad_grids_.empty()) return;
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  const int m = grid_.points_per_axis;
  const double inv12h = 1.0 / (12.0 * grid_.h());
  const std::size_t count = grid_.node_count();
  std::vector<std::vector<cplx>> grids(
      static_cast<std::size_t>(n), std::vector<cplx>(count * static_cast<std::size_t>(N)));
  std::vector<std::uint8_t> mask(count, 0);
  std::vector<std::size_t> strides(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) strides[static_cast<std::size_t>(a)] = axis_stride(grid_, a);

  parallel_for(count, [&](std::size_t flat) {
    const std::vector<int> idx = grid_.multi_index(flat);
    if (!loaded_[flat]) return;
    for (int a = 0; a < n; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      if (i < 2 || i > m - 3) return;
      const std::size_t s = strides[static_cast<std::size_t>(a)];
      if (!loaded_[flat - 2 * s] || !loaded_[flat - s] || !loaded_[flat + s] ||
          !loaded_[flat + 2 * s]) {
        return;
      }
    }
    for (int a = 0; a < n; ++a) {
      const std::size_t s = strides[static_cast<std::size_t>(a)];
      for (int c = 0; c < N; ++c) {
        const cplx fm2 = values_[(flat - 2 * s) * N + c];
        const cplx fm1 = values_[(flat - s) * N + c];
        const cplx fp1 = values_[(flat + s) * N + c];
        const cplx fp2 = values_[(flat + 2 * s) * N + c];
        // Symmetric grouping: exact cancellation for constant data and less
        // rounding for smooth data.
        grids[static_cast<std::size_t>(a)][flat * N + c] =
            ((fm2 - fp2) + 8.0 * (fp1 - fm1)) * inv12h;
      }
    }
    mask[flat] = 1;
  });
  grad_grids_ = std::move(grids);
  grad_mask_ = std::move(mask);
}

void SpinorField::ensure_laplacian_grid() const {
  if (!lap_grid_.empty()) return;
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  const int m = grid_.points_per_axis;
  const double h = grid_.h();
  const double inv12h2 = 1.0 / (12.0 * h * h);
  const std::size_t count = grid_.node_count();
  std::vector<cplx> lap(count * static_cast<std::size_t>(N));
  std::vector<std::uint8_t> mask(count, 0);
  std::vector<std::size_t> strides(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) strides[static_cast<std::size_t>(a)] = axis_stride(grid_, a);

  parallel_for(count, [&](std::size_t flat) {
    const std::vector<int> idx = grid_.multi_index(flat);
    if (!loaded_[flat]) return;
    for (int a = 0; a < n; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      if (i < 2 || i > m - 3) return;
      const std::size_t s = strides[static_cast<std::size_t>(a)];
      if (!loaded_[flat - 2 * s] || !loaded_[flat - s] || !loaded_[flat + s] ||
          !loaded_[flat + 2 * s]) {
        return;
      }
    }
    for (int c = 0; c < N; ++c) {
      cplx acc = 0.0;
      for (int a = 0; a < n; ++a) {
        const std::size_t s = strides[static_cast<std::size_t>(a)];
        const cplx fm2 = values_[(flat - 2 * s) * N + c];
        const cplx fm1 = values_[(flat - s) * N + c];
        const cplx f0 = values_[flat * N + c];
        const cplx fp1 = values_[(flat + s) * N + c];
        const cplx fp2 = values_[(flat + 2 * s) * N + c];
        // Symmetric grouping: constant data cancels exactly.
        acc += ((16.0 * (fm1 + fp1) - (fm2 + fp2)) - 30.0 * f0) * inv12h2;
      }
      lap[flat * N + c] = acc;
    }
    mask[flat] = 1;
  });
  lap_grid_ = std::move(lap);
  lap_mask_ = std::move(mask);
}

bool SpinorField::gradient_node(std::size_t flat, Matrix* out) const {
  ensure_gradient_grids();
  if (!grad_mask_[flat]) return false;
  const int n = grid_.n;
  const int N = rep_->fiber_dim;
  Matrix g(N, n);
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < N; ++c) {
      g(c, a) = grad_grids_[static_cast<std::size_t>(a)][flat * N + c];
    }
  }
  *out = g;
  return true;
}

bool SpinorField::laplacian_node(std::size_t flat, CVector* out) const {
  ensure_laplacian_grid();
  if (!lap_mask_[flat]) return false;
  const int N = rep_->fiber_dim;
  CVector v(N);
  for (int c = 0; c < N; ++c) v[c] = lap_grid_[flat * N + c];
  *out = v;
  return true;
}

const SphereRule& SpinorField::sphere_rule() const {
  if (!sphere_rule_) {
    sphere_rule_ = std::make_shared<const SphereRule>(
        unit_sphere_rule(grid_.n, grid_.sphere_nodes, kSphereRuleSeed));
  }
  return *sphere_rule_;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

SpinorField make_field(std::shared_ptr<const CliffordRep> rep,
                       const GridSpec& grid, FieldKind kind,
                       FieldAnalytic analytic) {
  grid.validate();
  require(grid.n == rep->n, ErrorKind::shape_mismatch,
          "grid and representation dimensions differ");
  SpinorField f;
  f.grid_ = grid;
  f.rep_ = std::move(rep);
  f.kind_ = kind;
  f.mode_ = EvalMode::analytic;
  f.analytic_ = std::move(analytic);
  const int N = f.rep_->fiber_dim;
  const std::size_t count = grid.node_count();
  f.values_.assign(count * static_cast<std::size_t>(N), cplx(0.0, 0.0));
  f.loaded_.assign(count, 1);
  const CliffordRep& rp = *f.rep_;
  const FieldAnalytic& an = f.analytic_;
  parallel_for(count, [&](std::size_t flat) {
    const RVector x = grid.node_coord(grid.multi_index(flat));
    const CVector v = closed_value(an, rp, x);
    for (int c = 0; c < N; ++c) f.values_[flat * static_cast<std::size_t>(N) + c] = v[c];
  });
  require(f.max_abs() >= kDegenerateTol, ErrorKind::degenerate_field,
          "field is numerically zero on the grid");
  return f;
}

SpinorField synth_harmonic_poly(std::shared_ptr<const CliffordRep> rep,
                                const GridSpec& grid,
                                const HomogeneousSpinorPoly& poly,
                                const RVector& center) {
  require(poly.n() == rep->n && poly.fiber_dim() == rep->fiber_dim,
          ErrorKind::shape_mismatch, "polynomial shape does not match representation");
  poly.check_homogeneous();
  const double scale = poly.max_abs_coeff();
  require(scale > 0.0, ErrorKind::degenerate_field, "polynomial is identically zero");
  require(poly.dirac_residual(*rep) <= 1e-10 * scale, ErrorKind::hypothesis,
          "polynomial is not in the kernel of the first-order operator");
  HarmonicPolyData data;
  data.poly = poly;
  data.center = center;
  return make_field(std::move(rep), grid, FieldKind::harmonic_poly, data);
}

std::pair<double, CVector> plane_wave_eigenpair(const CliffordRep& rep,
                                                const RVector& xi, int sign) {
  require(xi.size() == rep.n, ErrorKind::shape_mismatch, "frequency vector has wrong length");
  const double norm = xi.norm();
  require(norm > 0.0, ErrorKind::degenerate_field, "frequency vector is zero");
  require(sign == 1 || sign == -1, ErrorKind::config, "branch sign must be +1 or -1");
  const Matrix A = cplx(0.0, 1.0) * rep.clifford(xi);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  require(es.info() == Eigen::Success, ErrorKind::ill_conditioned,
          "eigen decomposition of the symbol failed");
  const int pick = sign > 0 ? rep.fiber_dim - 1 : 0;
  const double lambda = es.eigenvalues()[pick];
  CVector u = es.eigenvectors().col(pick);
  // Deterministic phase: rotate the largest-magnitude entry to the positive
  // real axis (ties break to the lowest index).
  int imax = 0;
  double best = -1.0;
  for (int c = 0; c < rep.fiber_dim; ++c) {
    const double m = std::abs(u[c]);
    if (m > best + 1e-15) {
      best = m;
      imax = c;
    }
  }
  u *= std::conj(u[imax]) / std::abs(u[imax]);
  u.normalize();
  const double resid = (A * u - lambda * u).cwiseAbs().maxCoeff();
  require(resid <= 1e-10 * norm, ErrorKind::construction,
          "symbol eigenpair residual too large");
  require(std::abs(std::abs(lambda) - norm) <= 1e-10 * norm,
          ErrorKind::construction, "symbol eigenvalue should have magnitude |xi|");
  return {lambda, u};
}

SpinorField synth_plane_wave(std::shared_ptr<const CliffordRep> rep,
                             const GridSpec& grid, const RVector& xi, int sign) {
  auto [lambda, u] = plane_wave_eigenpair(*rep, xi, sign);
  PlaneWaveData data;
  data.xi = xi;
  data.u = u;
  data.lambda = lambda;
  return make_field(std::move(rep), grid, FieldKind::plane_wave, data);
}

SpinorField synth_planted(std::shared_ptr<const CliffordRep> rep,
                          const GridSpec& grid,
                          const HomogeneousSpinorPoly& leading, double amp,
                          const CVector& direction, const RVector& center) {
  require(leading.n() == rep->n && leading.fiber_dim() == rep->fiber_dim,
          ErrorKind::shape_mismatch, "leading term shape does not match representation");
  leading.check_homogeneous();
  const double scale = leading.max_abs_coeff();
  require(scale > 0.0, ErrorKind::degenerate_field, "leading term is identically zero");
  require(leading.dirac_residual(*rep) <= 1e-10 * scale, ErrorKind::hypothesis,
          "leading term is not in the kernel of the first-order operator");
  require(direction.size() == rep->fiber_dim, ErrorKind::shape_mismatch,
          "tail direction has wrong fiber dimension");
  require(amp >= 0.0, ErrorKind::config, "tail amplitude must be nonnegative");
  PlantedData data;
  data.leading = leading;
  data.amp = amp;
  data.exponent = leading.degree() + 0.5;
  data.direction = direction;
  data.center = center;
  return make_field(std::move(rep), grid, FieldKind::planted, data);
}

double calibrate_bubble(const CliffordRep& rep, const CVector& u) {
  require(u.size() == rep.fiber_dim, ErrorKind::shape_mismatch,
          "bubble fiber vector has wrong dimension");
  require(u.norm() > 0.0, ErrorKind::degenerate_field, "bubble fiber vector is zero");
  // Small auxiliary grid: evaluate the unit-amplitude profile, apply the
  // stencil operator, and least-squares fit the amplitude against the
  // critical nonlinearity. Both sides scale by known powers of c.
  GridSpec aux;
  aux.n = rep.n;
  aux.R = 0.8;
  aux.points_per_axis = 17;
  aux.sphere_nodes = 64;
  BubbleData unit;
  unit.c = 1.0;
  unit.u = u;
  auto rep_ptr = std::make_shared<const CliffordRep>(rep);
  SpinorField psi1 = make_field(rep_ptr, aux, FieldKind::dirac_bubble, unit);
  const double q = 2.0 / (rep.n - 1.0);
  std::vector<double> nums, dens;
  const std::size_t count = aux.node_count();
  std::vector<Matrix> dummy;
  for (std::size_t flat = 0; flat < count; ++flat) {
    Matrix g;
    if (!psi1.gradient_node(flat, &g)) continue;
    const std::vector<int> idx = aux.multi_index(flat);
    if (!aux.inside_ball(idx)) continue;
    CVector a = CVector::Zero(rep.fiber_dim);
    for (int j = 0; j < rep.n; ++j) a += rep.gammas[static_cast<std::size_t>(j)] * g.col(j);
    const CVector v = psi1.node_value(flat);
    const CVector b = std::pow(v.norm(), q) * v;
    nums.push_back(fiber_inner(a, b).real());
    dens.push_back(b.squaredNorm());
  }
  require(!nums.empty(), ErrorKind::resolution, "calibration grid has no interior nodes");
  const double num = pairwise_sum(nums);
  const double den = pairwise_sum(dens);
  require(num > 0.0 && den > 0.0, ErrorKind::calibration,
          "bubble calibration projection is not positive");
  const double ratio = num / den;  // equals c^q at the optimum
  const double c = std::pow(ratio, 1.0 / q);
  // Verify: with the fitted amplitude the pointwise residual must be small
  // relative to the stencil scale.
  double worst = 0.0;
  double scale = 0.0;
  std::size_t pos = 0;
  for (std::size_t flat = 0; flat < count; ++flat) {
    Matrix g;
    if (!psi1.gradient_node(flat, &g)) continue;
    const std::vector<int> idx = aux.multi_index(flat);
    if (!aux.inside_ball(idx)) continue;
    CVector a = CVector::Zero(rep.fiber_dim);
    for (int j = 0; j < rep.n; ++j) a += rep.gammas[static_cast<std::size_t>(j)] * g.col(j);
    const CVector v = psi1.node_value(flat);
    const CVector b = std::pow(v.norm(), q) * v;
    const CVector resid = c * a - std::pow(c, 1.0 + q) * b;
    worst = std::max(worst, resid.cwiseAbs().maxCoeff());
    scale = std::max(scale, (c * a).cwiseAbs().maxCoeff());
    ++pos;
  }
  require(worst <= 5e-2 * scale, ErrorKind::calibration,
          "bubble residual after calibration exceeds the stencil tolerance");
  return c;
}

SpinorField synth_dirac_bubble(std::shared_ptr<const CliffordRep> rep,
                               const GridSpec& grid, const CVector& u,
                               double c) {
  if (c <= 0.0) c = calibrate_bubble(*rep, u);
  BubbleData data;
  data.c = c;
  data.u = u;
  return make_field(std::move(rep), grid, FieldKind::dirac_bubble, data);
}

SpinorField synth_custom(std::shared_ptr<const CliffordRep> rep,
                         const GridSpec& grid, ClosedFormData closed) {
  require(static_cast<bool>(closed.value), ErrorKind::config,
          "custom field needs a value evaluator");
  return make_field(std::move(rep), grid, FieldKind::custom, std::move(closed));
}

SpinorField field_from_samples(std::shared_ptr<const CliffordRep> rep,
                               const GridSpec& grid, std::vector<cplx> values,
                               std::vector<std::uint8_t> loaded) {
  grid.validate();
  require(grid.n == rep->n, ErrorKind::shape_mismatch,
          "grid and representation dimensions differ");
  const std::size_t count = grid.node_count();
  require(loaded.size() == count, ErrorKind::shape_mismatch, "mask size mismatch");
  require(values.size() == count * static_cast<std::size_t>(rep->fiber_dim),
          ErrorKind::shape_mismatch, "sample buffer size mismatch");
  SpinorField f;
  f.grid_ = grid;
  f.rep_ = std::move(rep);
  f.kind_ = FieldKind::custom;
  f.mode_ = EvalMode::interp_cubic;
  f.values_ = std::move(values);
  f.loaded_ = std::move(loaded);
  return f;
}

// ---------------------------------------------------------------------------
// Derived fields and traces
// ---------------------------------------------------------------------------

SpinorField apply_dirac(const SpinorField& field) {
  const GridSpec& grid = field.grid();
  const CliffordRep& rep = field.rep();
  const int N = rep.fiber_dim;
  field.ensure_gradient_grids();
  const std::size_t count = grid.node_count();
  std::vector<cplx> values(count * static_cast<std::size_t>(N), cplx(0.0, 0.0));
  std::vector<std::uint8_t> mask(count, 0);
  parallel_for(count, [&](std::size_t flat) {
    Matrix g;
    if (!field.gradient_node(flat, &g)) return;
    CVector v = CVector::Zero(N);
    for (int j = 0; j < grid.n; ++j) {
      v += rep.gammas[static_cast<std::size_t>(j)] * g.col(j);
    }
    for (int c = 0; c < N; ++c) values[flat * static_cast<std::size_t>(N) + c] = v[c];
    mask[flat] = 1;
  });
  return field_from_samples(field.rep_ptr(), grid, std::move(values), std::move(mask));
}

SphereSamples sphere_trace(const SpinorField& field, const RVector& center,
                           double r) {
  const GridSpec& grid = field.grid();
  require(center.size() == grid.n, ErrorKind::shape_mismatch,
          "sphere center has wrong dimension");
  require(r > 0.0, ErrorKind::domain, "sphere radius must be positive");
  const double band = 3.0 * grid.h();
  require(center.norm() + r <= grid.R - band + 1e-12, ErrorKind::domain,
          "sphere leaves the resolved region of the grid");
  const SphereRule& rule = field.sphere_rule();
  const double rpow = std::pow(r, grid.n - 1);
  SphereSamples s;
  s.center = center;
  s.r = r;
  const std::size_t m = rule.nodes.size();
  s.points.resize(m);
  s.weights.resize(m);
  s.psi.resize(m);
  s.dnu.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const RVector dir = rule.nodes[i];
    const RVector x = center + r * dir;
    s.points[i] = x;
    s.weights[i] = rule.weights[i] * rpow;
    s.psi[i] = field.value_at(x);
    const Matrix g = field.gradient_at(x);
    CVector dn = CVector::Zero(field.rep().fiber_dim);
    for (int j = 0; j < grid.n; ++j) dn += dir[j] * g.col(j);
    s.dnu[i] = dn;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void save_field(const SpinorField& field, const std::string& path) {
  const GridSpec& grid = field.grid();
  const int N = field.rep().fiber_dim;
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot open " + path + " for writing");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", grid.R);
  std::string header = std::string("spinodal-field v1; ") +
                       std::to_string(grid.n) + "; " + std::to_string(N) +
                       "; " + buf;
  std::snprintf(buf, sizeof buf, "%.17g", grid.h());
  header += std::string("; ") + buf;
  out << header << "\n";
  const std::size_t count = grid.node_count();
  for (std::size_t flat = 0; flat < count; ++flat) {
    if (!field.has_node(flat)) continue;
    const std::vector<int> idx = grid.multi_index(flat);
    if (!grid.inside_ball(idx)) continue;
    for (int a = 0; a < grid.n; ++a) {
      out << idx[static_cast<std::size_t>(a)] << (a + 1 < grid.n ? ' ' : ' ');
    }
    const CVector v = field.node_value(flat);
    for (int c = 0; c < N; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", v[c].real(), v[c].imag());
      out << buf << (c + 1 < N ? " " : "");
    }
    out << "\n";
  }
  require(out.good(), ErrorKind::io, "write to " + path + " failed");
}

SpinorField load_field(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> parts;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      const std::size_t b = tok.find_first_not_of(" \t");
      const std::size_t e = tok.find_last_not_of(" \t\r");
      parts.push_back(b == std::string::npos ? std::string()
                                             : tok.substr(b, e - b + 1));
    }
  }
  require(parts.size() == 5 && parts[0] == "spinodal-field v1", ErrorKind::io,
          "not a spinodal field file: " + path);
  const int n = std::stoi(parts[1]);
  const int N = std::stoi(parts[2]);
  const double R = std::stod(parts[3]);
  const double h = std::stod(parts[4]);
  require(n >= 1 && n <= 8, ErrorKind::io, "field file dimension out of range");
  require(R > 0.0 && h > 0.0, ErrorKind::io, "field file has invalid geometry");
  const int m = static_cast<int>(std::lround(2.0 * R / h)) + 1;
  require(m >= 9 && m % 2 == 1, ErrorKind::io, "field file grid spacing is inconsistent");
  auto rep = std::make_shared<const CliffordRep>(build_clifford_rep(n));
  require(rep->fiber_dim == N, ErrorKind::io,
          "field file fiber dimension does not match the representation");
  GridSpec grid;
  grid.n = n;
  grid.R = R;
  grid.points_per_axis = m;
  const std::size_t count = grid.node_count();
  std::vector<cplx> values(count * static_cast<std::size_t>(N), cplx(0.0, 0.0));
  std::vector<std::uint8_t> loaded(count, 0);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      require(static_cast<bool>(ss >> idx[static_cast<std::size_t>(a)]), ErrorKind::io,
              "truncated node record in " + path);
      require(idx[static_cast<std::size_t>(a)] >= 0 &&
                  idx[static_cast<std::size_t>(a)] < m,
              ErrorKind::io, "node index out of range in " + path);
    }
    const std::size_t flat = grid.flat_index(idx);
    for (int c = 0; c < N; ++c) {
      double re = 0.0, im = 0.0;
      require(static_cast<bool>(ss >> re >> im), ErrorKind::io,
              "truncated sample record in " + path);
      values[flat * static_cast<std::size_t>(N) + c] = cplx(re, im);
    }
    loaded[flat] = 1;
  }
  SpinorField f = field_from_samples(rep, grid, std::move(values), std::move(loaded));
  require(f.max_abs() >= kDegenerateTol, ErrorKind::degenerate_field,
          "loaded field is numerically zero");
  return f;
}

}  // namespace spinodal
