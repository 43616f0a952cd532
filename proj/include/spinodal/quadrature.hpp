#pragma once

#include <cstdint>
#include <functional>

#include "spinodal/common.hpp"

namespace spinodal {

/// Gauss-Legendre nodes/weights on [0, 1] (k points). Exact for polynomials
/// of degree <= 2k-1.
struct RadialRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
RadialRule gauss_legendre_01(int k);

/// Quadrature on the unit sphere S^{n-1}: nodes on |x| = 1 and positive
/// weights summing to the sphere area n*omega_n.
///
/// Rules by dimension (documented because convergence-based tests depend on
/// them): n=2 trapezoid in angle (spectrally accurate); n=3 product
/// Gauss-Legendre in cos(polar) x trapezoid in azimuth (spectrally accurate);
/// n>=4 quasi-Monte Carlo (Halton points mapped through Box-Muller to the
/// sphere, Cranley-Patterson shifted by the seed) with >= 4096 equal weights,
/// whose weight sum is exact by construction.
struct SphereRule {
  int n = 0;
  std::vector<RVector> nodes;
  std::vector<double> weights;
};
SphereRule unit_sphere_rule(int n, int target_nodes, std::uint64_t seed = 0);

/// Radial part of a spherical-shell decomposition of the ball integral
/// over B_r: weights already include the rho^{n-1} area factor, so
///   integral_{B_r} f dv  ~=  sum_i w_i * sum_j wsph_j * f(c + rho_i * node_j).
/// With sqrt_map the substitution rho = r t^2 is used, which integrates
/// half-integer radial powers (and rho^{-1/2}, rho^{-1} singularities at the
/// center) exactly or near-exactly.
struct ShellRule {
  std::vector<double> rho;
  std::vector<double> weights;
};
ShellRule shell_rule(int n, double r, int k, bool sqrt_map = false);

/// Halton sequence point i (1-based) in the given base.
double radical_inverse(std::uint64_t i, int base);

}  // namespace spinodal
