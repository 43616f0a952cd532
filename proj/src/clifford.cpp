#include "spinodal/clifford.hpp"

namespace spinodal {

namespace {

const cplx kI(0.0, 1.0);

/// The fixed n=2 pair: gamma_1 = diag(i, -i), gamma_2 = [[0,1],[-1,0]].
std::vector<Matrix> base_pair() {
  Matrix g1 = Matrix::Zero(2, 2);
  g1(0, 0) = kI;
  g1(1, 1) = -kI;
  Matrix g2 = Matrix::Zero(2, 2);
  g2(0, 1) = cplx(1.0, 0.0);
  g2(1, 0) = cplx(-1.0, 0.0);
  return {g1, g2};
}

/// Doubling step: given generators on C^N, produce n+2 generators on C^{2N}:
/// old gammas become off-diagonal blocks, plus [[0,I],[-I,0]] and diag(iI,-iI).
std::vector<Matrix> doubled(const std::vector<Matrix>& gs) {
  const int N = static_cast<int>(gs.front().rows());
  std::vector<Matrix> out;
  out.reserve(gs.size() + 2);
  for (const Matrix& g : gs) {
    Matrix big = Matrix::Zero(2 * N, 2 * N);
    big.block(0, N, N, N) = g;
    big.block(N, 0, N, N) = g;
    out.push_back(big);
  }
  Matrix a = Matrix::Zero(2 * N, 2 * N);
  a.block(0, N, N, N) = Matrix::Identity(N, N);
  a.block(N, 0, N, N) = -Matrix::Identity(N, N);
  out.push_back(a);
  Matrix b = Matrix::Zero(2 * N, 2 * N);
  b.block(0, 0, N, N) = kI * Matrix::Identity(N, N);
  b.block(N, N, N, N) = -kI * Matrix::Identity(N, N);
  out.push_back(b);
  return out;
}

/// Chirality completion for odd n = 2m+1: gamma_{2m+1} = i^{m+1} g_1...g_{2m},
/// which squares to -I, is skew-adjoint, and anticommutes with the even set.
Matrix odd_completion(const std::vector<Matrix>& gs) {
  const int m = static_cast<int>(gs.size()) / 2;
  Matrix prod = Matrix::Identity(gs.front().rows(), gs.front().cols());
  for (const Matrix& g : gs) prod = prod * g;
  cplx phase(1.0, 0.0);
  for (int j = 0; j < m + 1; ++j) phase *= kI;
  return phase * prod;
}

}  // namespace

Matrix CliffordRep::clifford(const RVector& v) const {
  require(v.size() == n, ErrorKind::shape_mismatch,
          "CliffordRep::clifford: vector dimension mismatch");
  Matrix g = Matrix::Zero(fiber_dim, fiber_dim);
  for (int i = 0; i < n; ++i) g += v[i] * gammas[i];
  return g;
}

CliffordRep build_clifford_rep(int n) {
  require(n >= 2, ErrorKind::invalid_dimension,
          "build_clifford_rep: dimension must be >= 2");
  std::vector<Matrix> gs = base_pair();
  const int even_part = (n / 2) * 2;
  while (static_cast<int>(gs.size()) < even_part) gs = doubled(gs);
  if (n % 2 == 1) gs.push_back(odd_completion(gs));

  CliffordRep rep;
  rep.n = n;
  rep.fiber_dim = static_cast<int>(gs.front().rows());
  rep.gammas = std::move(gs);
  const double res = clifford_relation_residual(rep);
  require(res <= 1e-12, ErrorKind::construction,
          "build_clifford_rep: relation residual above tolerance");
  return rep;
}

CVector clifford_mul(const CliffordRep& rep, const RVector& v,
                     const CVector& psi) {
  require(v.size() == rep.n && psi.size() == rep.fiber_dim,
          ErrorKind::shape_mismatch, "clifford_mul: dimension mismatch");
  CVector out = CVector::Zero(rep.fiber_dim);
  for (int i = 0; i < rep.n; ++i) out += v[i] * (rep.gammas[i] * psi);
  return out;
}

double clifford_relation_residual(const CliffordRep& rep) {
  const int N = rep.fiber_dim;
  const Matrix id = Matrix::Identity(N, N);
  double worst = 0.0;
  for (int i = 0; i < rep.n; ++i) {
    worst = std::max(worst,
                     (rep.gammas[i].adjoint() + rep.gammas[i]).cwiseAbs().maxCoeff());
    for (int j = 0; j < rep.n; ++j) {
      const Matrix anti = rep.gammas[i] * rep.gammas[j] +
                          rep.gammas[j] * rep.gammas[i] +
                          (i == j ? 2.0 : 0.0) * id;
      worst = std::max(worst, anti.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace spinodal
