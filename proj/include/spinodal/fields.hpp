#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "spinodal/clifford.hpp"
#include "spinodal/common.hpp"
#include "spinodal/grid.hpp"
#include "spinodal/quadrature.hpp"
#include "spinodal/spinor_poly.hpp"

namespace spinodal {

/// Fiber inner product, conjugate-linear in the second slot.
inline cplx fiber_inner(const CVector& a, const CVector& b) { return b.dot(a); }

enum class FieldKind { harmonic_poly, plane_wave, planted, dirac_bubble, custom };
const char* field_kind_name(FieldKind kind);

enum class EvalMode { analytic, interp_linear, interp_cubic };

struct HarmonicPolyData {
  HomogeneousSpinorPoly poly;
  RVector center;
};

struct PlaneWaveData {
  RVector xi;
  CVector u;       // unit eigenvector of i gamma(xi)
  double lambda;   // matching eigenvalue, +-|xi|
};

struct PlantedData {
  HomogeneousSpinorPoly leading;  // degree k, Dirac-harmonic
  double amp = 0.0;               // amplitude of the fractional tail
  double exponent = 0.0;          // s = k + 1/2
  CVector direction;              // fiber direction of the tail
  RVector center;
};

struct BubbleData {
  double c = 0.0;  // amplitude; solves the critical nonlinear equation
  CVector u;
};

struct ClosedFormData {
  std::function<CVector(const RVector&)> value;
  std::function<Matrix(const RVector&)> grad;  // optional (may be empty)
  std::function<CVector(const RVector&)> lap;  // optional (may be empty)
};

using FieldAnalytic = std::variant<std::monostate, HarmonicPolyData,
                                   PlaneWaveData, PlantedData, BubbleData,
                                   ClosedFormData>;

/// Spinor samples of one sphere: absolute node positions, flat surface-measure
/// weights (already including r^{n-1}), field values and radial derivatives.
struct SphereSamples {
  RVector center;
  double r = 0.0;
  std::vector<RVector> points;
  std::vector<double> weights;
  std::vector<CVector> psi;
  std::vector<CVector> dnu;
};

/// A spinor field sampled on a grid, optionally backed by closed-form
/// evaluators. Off-node evaluation uses the closed form when available and
/// the mode is analytic; otherwise tensor-product interpolation of the node
/// samples (and, for derivatives, of the fourth-order stencil grids).
class SpinorField {
 public:
  SpinorField() = default;

  const GridSpec& grid() const { return grid_; }
  const CliffordRep& rep() const { return *rep_; }
  std::shared_ptr<const CliffordRep> rep_ptr() const { return rep_; }
  FieldKind kind() const { return kind_; }
  EvalMode eval_mode() const { return mode_; }
  void set_eval_mode(EvalMode m) { mode_ = m; }
  const FieldAnalytic& analytic() const { return analytic_; }
  RVector center() const;

  bool has_node(std::size_t flat) const { return loaded_[flat] != 0; }
  CVector node_value(std::size_t flat) const;
  void set_node_value(std::size_t flat, const CVector& v);
  double max_abs() const;

  CVector value_at(const RVector& x) const;
  /// fiber_dim x n complex matrix of first partials.
  Matrix gradient_at(const RVector& x) const;
  CVector laplacian_at(const RVector& x) const;
  /// sum_j gamma_j (d_j psi) at x.
  CVector dirac_at(const RVector& x) const;

  /// Builds the fourth-order stencil first-derivative grids if absent.
  void ensure_gradient_grids() const;
  void ensure_laplacian_grid() const;
  bool gradient_node(std::size_t flat, Matrix* out) const;
  bool laplacian_node(std::size_t flat, CVector* out) const;

  const SphereRule& sphere_rule() const;

  friend SpinorField make_field(std::shared_ptr<const CliffordRep> rep,
                                const GridSpec& grid, FieldKind kind,
                                FieldAnalytic analytic);
  friend SpinorField field_from_samples(std::shared_ptr<const CliffordRep> rep,
                                        const GridSpec& grid,
                                        std::vector<cplx> values,
                                        std::vector<std::uint8_t> loaded);

 private:
  CVector interp_value(const RVector& x, int order) const;
  Matrix interp_gradient(const RVector& x, int order) const;
  CVector interp_laplacian(const RVector& x, int order) const;

  GridSpec grid_;
  std::shared_ptr<const CliffordRep> rep_;
  FieldKind kind_ = FieldKind::custom;
  EvalMode mode_ = EvalMode::analytic;
  FieldAnalytic analytic_;
  std::vector<cplx> values_;          // node-major, fiber contiguous
  std::vector<std::uint8_t> loaded_;  // 1 where values_ holds a sample

  mutable std::vector<std::vector<cplx>> grad_grids_;  // [axis][node*fiber]
  mutable std::vector<std::uint8_t> grad_mask_;
  mutable std::vector<cplx> lap_grid_;
  mutable std::vector<std::uint8_t> lap_mask_;
  mutable std::shared_ptr<const SphereRule> sphere_rule_;
};

/// Samples a closed-form field on every cube node of the grid.
SpinorField make_field(std::shared_ptr<const CliffordRep> rep,
                       const GridSpec& grid, FieldKind kind,
                       FieldAnalytic analytic);

/// Eigenpair of the Hermitian matrix i gamma(xi): sign selects the branch
/// lambda = sign * |xi|. The eigenvector phase is fixed deterministically.
std::pair<double, CVector> plane_wave_eigenpair(const CliffordRep& rep,
                                                const RVector& xi, int sign);

SpinorField synth_harmonic_poly(std::shared_ptr<const CliffordRep> rep,
                                const GridSpec& grid,
                                const HomogeneousSpinorPoly& poly,
                                const RVector& center);
SpinorField synth_plane_wave(std::shared_ptr<const CliffordRep> rep,
                             const GridSpec& grid, const RVector& xi, int sign);
SpinorField synth_planted(std::shared_ptr<const CliffordRep> rep,
                          const GridSpec& grid,
                          const HomogeneousSpinorPoly& leading, double amp,
                          const CVector& direction, const RVector& center);
/// c <= 0 requests calibration via the stencil residual oracle.
SpinorField synth_dirac_bubble(std::shared_ptr<const CliffordRep> rep,
                               const GridSpec& grid, const CVector& u,
                               double c);
SpinorField synth_custom(std::shared_ptr<const CliffordRep> rep,
                         const GridSpec& grid, ClosedFormData closed);
SpinorField field_from_samples(std::shared_ptr<const CliffordRep> rep,
                               const GridSpec& grid, std::vector<cplx> values,
                               std::vector<std::uint8_t> loaded);

/// Amplitude for which the bubble profile solves the critical equation
/// D psi = |psi|^(2/(n-1)) psi, found by least-squares residual minimization
/// against the stencil Dirac operator on a small auxiliary grid.
double calibrate_bubble(const CliffordRep& rep, const CVector& u);

/// Fourth-order stencil Dirac derivative as a sampled field; the loaded
/// region shrinks by the stencil band.
SpinorField apply_dirac(const SpinorField& field);

/// Samples field and radial derivative on the sphere |x - center| = r using
/// the grid's cached direction rule. Weights are flat surface measure.
SphereSamples sphere_trace(const SpinorField& field, const RVector& center,
                           double r);

void save_field(const SpinorField& field, const std::string& path);
SpinorField load_field(const std::string& path);

}  // namespace spinodal
