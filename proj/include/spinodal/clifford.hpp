#pragma once

#include "spinodal/common.hpp"

namespace spinodal {

/// Gamma-matrix representation of the n-dimensional Clifford algebra on the
/// complex fiber C^N, N = 2^floor(n/2), with the skew-adjoint convention:
///
///     gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij I,   gamma_i^* = -gamma_i.
///
/// The fiber inner product <a, b> = sum_c a_c * conj(b_c) is conjugate-linear
/// in the second slot throughout the project.
struct CliffordRep {
  int n = 0;
  int fiber_dim = 0;
  std::vector<Matrix> gammas;

  /// gamma(v) = sum_i v_i gamma_i.
  Matrix clifford(const RVector& v) const;
};

/// Builds the representation by a fixed recursive doubling scheme: the n=2
/// pair is gamma_1 = diag(i, -i), gamma_2 = [[0, 1], [-1, 0]]; even n adds two
/// block generators and doubles the fiber; odd n appends i times the chirality
/// element of the (n-1)-representation. Deterministic, so downstream outputs
/// are bit-reproducible.
CliffordRep build_clifford_rep(int n);

/// (sum_i v_i gamma_i) psi.
CVector clifford_mul(const CliffordRep& rep, const RVector& v, const CVector& psi);

/// Max entrywise residual over all anticommutator relations and
/// skew-adjointness checks; the build is accepted only if this is <= 1e-12.
double clifford_relation_residual(const CliffordRep& rep);

}  // namespace spinodal
