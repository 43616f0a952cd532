#pragma once

#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/spinor_poly.hpp"

namespace spinodal {

/// Fundamental solution G0 of minus the laplacian:
///   n >= 3: |z|^{2-n} / ((n-2) n omega_n),   n = 2: log(1/|z|) / (2 pi).
double laplace_fundamental(int n, const RVector& z);

/// Partial derivative d^alpha G0(z), computed by an exact rational-in-radius
/// differentiation engine (numerator polynomial over a power of |z|), so no
/// finite differencing enters. alpha may have any order up to 8; |alpha| >= 1
/// is required for n = 2 (the logarithm itself is handled separately).
double laplace_derivative(int n, const MultiIndex& alpha, const RVector& z);

/// Matrix fundamental solution of the first-order operator:
///   G(z) = -gamma(z) / (n omega_n |z|^n),  sum_j gamma_j d_j G = delta * I.
Matrix dirac_fundamental(const CliffordRep& rep, const RVector& z);

/// d^beta of the matrix kernel at z: sum_j gamma_j d^{beta+e_j} G0(z).
Matrix green_derivative(const CliffordRep& rep, const MultiIndex& beta,
                        const RVector& z);

/// Degree-k Taylor term (in x, around 0) of x -> G(x - y) applied to the
/// fiber vector u: sum_{|beta|=k} (d^beta G)(-y) u x^beta / beta!.
/// Annihilated by the first-order operator in x for every fixed y != 0.
HomogeneousSpinorPoly green_taylor_term(const CliffordRep& rep, int k,
                                        const RVector& y, const CVector& u);

struct RepresentationCheck {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  std::size_t probes = 0;
  double scale = 0.0;  // sup |psi| over the probe set, the normalizer
};

/// Checks the integral representation
///   psi(x) = int_{B_r(c)} G(x-y) (D psi)(y) dy
///          - int_{dB_r(c)} G(x-y) gamma(nu) psi(y) ds(y)
/// at the given probe points (all strictly inside the ball). The volume term
/// integrates along rays from x, where the kernel singularity cancels the
/// polar jacobian exactly.
RepresentationCheck newton_represent(const SpinorField& field,
                                     const RVector& center, double r,
                                     const std::vector<RVector>& probes,
                                     int ray_nodes = 32);

/// Output of the Taylor/remainder splitting around a center: homogeneous
/// terms of degree 0..K with K = floor(sigma) + 1, each recovered from the
/// representation coefficients, plus a power-law fit of the remainder.
struct Decomposition {
  double sigma = 0.0;
  RVector center;
  std::vector<HomogeneousSpinorPoly> terms;  // degree k at index k
  double q_exponent_fit = 0.0;   // log-log slope of the remainder shell norm
  double q_rel_size = 0.0;       // remainder / field, largest sampled shell
  std::vector<double> term_shell_norms;  // L2(S) norm of each term at r = 1
};

/// Splits the field around `center` into recovered Taylor terms of degree
/// <= floor(sigma)+1 and a remainder, using ball radius r for the
/// representation integrals. Radial quadrature uses the square-root map so
/// half-integer remainder powers integrate cleanly.
Decomposition decompose(const SpinorField& field, const RVector& center,
                        double sigma, double r, int radial_nodes = 24);

void save_decomposition(const Decomposition& dec, const std::string& path);

}  // namespace spinodal
