#include <doctest.h>

#include "spinodal/clifford.hpp"

using namespace spinodal;

TEST_SUITE("clifford") {

TEST_CASE("relation residual is at rounding level for n = 2..6") {
  const int expected_fiber[] = {2, 2, 4, 4, 8};
  for (int n = 2; n <= 6; ++n) {
    const CliffordRep rep = build_clifford_rep(n);
    CHECK(rep.n == n);
    CHECK(rep.fiber_dim == expected_fiber[n - 2]);
    CHECK(clifford_relation_residual(rep) <= 1e-12);
  }
}

TEST_CASE("gamma(v)^2 = -|v|^2 I") {
  const CliffordRep rep = build_clifford_rep(3);
  RVector v(3);
  v << 0.3, -1.2, 0.7;
  const Matrix g = rep.clifford(v);
  const Matrix sq = g * g + v.squaredNorm() * Matrix::Identity(2, 2);
  CHECK(sq.cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("gamma(v) is skew-adjoint, so <gamma(v)u, u> is purely imaginary") {
  const CliffordRep rep = build_clifford_rep(4);
  RVector v(4);
  v << 1.0, 0.5, -0.25, 2.0;
  CVector u(4);
  u << cplx(1, 2), cplx(0, -1), cplx(0.5, 0.5), cplx(-2, 0.25);
  const CVector gu = clifford_mul(rep, v, u);
  const cplx ip = u.dot(gu);  // conj(u) . gu
  CHECK(std::abs(ip.real()) <= 1e-12 * u.squaredNorm() * v.norm());
}

TEST_CASE("dimension guard") {
  CHECK_THROWS_AS(build_clifford_rep(1), Error);
  try {
    build_clifford_rep(0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_dimension);
  }
}

}  // TEST_SUITE
