#pragma once

#include <vector>

#include "spinodal/clifford.hpp"
#include "spinodal/common.hpp"
#include "spinodal/polynomial.hpp"

namespace spinodal {

/// Spinor-valued homogeneous polynomial of degree k on R^n: one scalar
/// polynomial per fiber component. Components may be zero (empty Poly).
/// Derivative polynomials are cached after first use so pointwise gradient
/// evaluation stays cheap inside quadrature loops.
class HomogeneousSpinorPoly {
 public:
  HomogeneousSpinorPoly() = default;
  HomogeneousSpinorPoly(int n, int fiber_dim, int degree);
  HomogeneousSpinorPoly(int n, int degree, std::vector<Poly> components);

  int n() const { return n_; }
  int fiber_dim() const { return static_cast<int>(components_.size()); }
  int degree() const { return degree_; }
  const Poly& component(int c) const { return components_.at(static_cast<std::size_t>(c)); }
  Poly& component(int c);

  CVector eval(const RVector& x) const;
  /// Gradient as fiber_dim x n complex matrix (row = component, col = axis).
  Matrix grad(const RVector& x) const;
  CVector laplacian_eval(const RVector& x) const;

  double max_abs_coeff() const;
  bool is_zero() const;
  /// Largest coefficient magnitude of (component-wise) Laplacian.
  double harmonic_residual() const;
  /// Largest coefficient magnitude of sum_j gamma_j d_j applied to this.
  double dirac_residual(const CliffordRep& rep) const;
  /// Verifies every nonzero component is homogeneous of the stated degree.
  void check_homogeneous() const;

  HomogeneousSpinorPoly scaled(cplx factor) const;
  HomogeneousSpinorPoly plus(const HomogeneousSpinorPoly& other) const;

 private:
  void ensure_derivatives() const;

  int n_ = 0;
  int degree_ = 0;
  std::vector<Poly> components_;
  mutable bool deriv_ready_ = false;
  mutable std::vector<std::vector<Poly>> deriv_;  // [component][axis]
  mutable std::vector<Poly> lap_;                 // [component]
};

/// Result of applying the first-order operator sum_j gamma_j d_j at the
/// coefficient level; degree drops by one.
HomogeneousSpinorPoly dirac_apply_poly(const CliffordRep& rep,
                                       const HomogeneousSpinorPoly& p);

}  // namespace spinodal
