#pragma once

#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/spinor_poly.hpp"

namespace spinodal {

/// Dimension of the space of scalar harmonic homogeneous polynomials of
/// degree k on R^n: C(n+k-1, k) - C(n+k-3, k-2).
int harmonic_space_dim(int n, int k);

/// Integral of the monomial x^alpha over the unit sphere S^(n-1); zero when
/// any exponent is odd, otherwise 2 * prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2).
double monomial_sphere_integral(int n, const MultiIndex& alpha);

/// Basis of scalar harmonic homogeneous polynomials of degree k,
/// orthonormal in L2 of the unit sphere. Coefficients come from an exact
/// rational kernel computation for k <= 4 and a floating-point kernel beyond.
std::vector<Poly> scalar_harmonic_basis(int n, int k);

/// Basis of spinor-valued homogeneous polynomials of degree k annihilated by
/// the first-order operator sum_j gamma_j d_j, orthonormal in L2 of the
/// sphere with the fiber inner product.
std::vector<HomogeneousSpinorPoly> dirac_harmonic_basis(const CliffordRep& rep,
                                                        int k);

struct LeadingTermFit {
  HomogeneousSpinorPoly poly;
  double rel_residual = 0.0;   // weighted L2 misfit on the sampled shells
  double slope_estimate = 0.0; // log-log growth rate used by the precheck
};

/// Least-squares recovery of the degree-k leading term of a field around
/// `center`, from sphere samples on `shells` radii in [r_min, r_max].
/// A log-log slope precheck rejects fields whose vanishing order is not k
/// (tolerance 0.2).
LeadingTermFit fit_leading_term(const SpinorField& field, const RVector& center,
                                int k, double r_min, double r_max, int shells);

void save_spinor_poly(const HomogeneousSpinorPoly& poly, const std::string& path);
HomogeneousSpinorPoly load_spinor_poly(const std::string& path);

}  // namespace spinodal
