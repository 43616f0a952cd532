#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/rng.hpp"
#include "spinodal/spinor_poly.hpp"

namespace spinodal {

/// One manufactured field together with its ground truth at the grid center:
/// the vanishing order (-1 when the center is not a zero), the number of
/// invariant directions of the leading polynomial (-1 when not applicable),
/// and whether the field is exactly Dirac-harmonic.
struct CorpusEntry {
  std::string name;
  SpinorField field;
  int order = -1;
  int invariance = -1;
  bool exactly_harmonic = false;
};

/// Deterministic draw of a unit vector in R^n.
RVector random_unit_vector(int n, Rng* rng);
/// Deterministic draw of a unit spinor in C^dim.
CVector random_unit_spinor(int dim, Rng* rng);

/// A fixed unit vector in the kernel of gamma(e1) + i gamma(e2). The matrix
/// is nilpotent (the squared symbol of an isotropic vector vanishes), so the
/// kernel is nontrivial in every dimension; the representative is chosen
/// deterministically and phase-fixed.
CVector isotropic_kernel_vector(const CliffordRep& rep);

/// (x1 + i x2)^k times the isotropic kernel vector: an exactly Dirac-harmonic
/// homogeneous polynomial of degree k whose zero set is the codimension-two
/// plane {x1 = x2 = 0}.
HomogeneousSpinorPoly planar_power(const CliffordRep& rep, int k);

/// Random complex mix of the degree-k Dirac-harmonic basis, normalized to
/// unit largest coefficient.
HomogeneousSpinorPoly random_harmonic_mix(const CliffordRep& rep, int degree,
                                          Rng* rng);

/// One field of each analytic kind with seed-derived parameters: a random
/// harmonic mix, planar powers of degree 1 and 2, a plane wave, planted
/// fields of degree 1 and 2, and a calibrated bubble. Equal seeds give
/// bit-identical entries.
std::vector<CorpusEntry> manufactured_corpus(
    std::shared_ptr<const CliffordRep> rep, const GridSpec& grid,
    std::uint64_t seed);

/// Random spinor field whose components are polynomials of total degree at
/// most three with Gaussian coefficients; smooth, generically nonvanishing,
/// closed-form derivatives. Deterministic per seed.
SpinorField random_smooth_field(std::shared_ptr<const CliffordRep> rep,
                                const GridSpec& grid, std::uint64_t seed);

}  // namespace spinodal
