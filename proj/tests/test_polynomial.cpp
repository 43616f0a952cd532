#include <doctest.h>

#include <cmath>

#include "spinodal/polynomial.hpp"

using namespace spinodal;

TEST_SUITE("polynomial") {

TEST_CASE("monomial enumeration is complete and deterministic") {
  const auto m32 = monomials_of_degree(3, 2);
  CHECK(m32.size() == 6);  // C(4,2)
  // Lexicographic with the first variable slowest and descending exponent.
  CHECK(m32.front() == MultiIndex({2, 0, 0}));
  CHECK(m32.back() == MultiIndex({0, 0, 2}));
  CHECK(monomials_of_degree(4, 3).size() == 20);  // C(6,3)
  CHECK(monomials_of_degree(2, 0).size() == 1);
}

TEST_CASE("evaluation, derivative, laplacian") {
  // p = x^2 y - 3 z^3
  Poly p(3);
  p.add_term({2, 1, 0}, cplx(1.0, 0.0));
  p.add_term({0, 0, 3}, cplx(-3.0, 0.0));
  RVector x(3);
  x << 2.0, -1.0, 0.5;
  CHECK(std::abs(p.eval(x) - cplx(-4.375, 0.0)) <= 1e-14);

  const Poly dp = p.derivative(0);  // 2 x y
  CHECK(std::abs(dp.eval(x) - cplx(-4.0, 0.0)) <= 1e-14);

  const Poly lap = p.laplacian();  // 2 y - 18 z
  CHECK(std::abs(lap.eval(x) - cplx(-11.0, 0.0)) <= 1e-14);

  CHECK(p.degree() == 3);
  CHECK(p.is_homogeneous(3));
  Poly q = p;
  q.add_term({0, 0, 0}, cplx(1.0, 0.0));
  CHECK(!q.is_homogeneous(3));
}

TEST_CASE("|x|^2 has laplacian 2n") {
  for (int n = 2; n <= 4; ++n) {
    Poly p(n);
    for (int a = 0; a < n; ++a) {
      MultiIndex alpha(static_cast<std::size_t>(n), 0);
      alpha[static_cast<std::size_t>(a)] = 2;
      p.add_term(alpha, cplx(1.0, 0.0));
    }
    const Poly lap = p.laplacian();
    RVector x = RVector::Constant(n, 0.37);
    CHECK(std::abs(lap.eval(x) - cplx(2.0 * n, 0.0)) <= 1e-14);
  }
}

TEST_CASE("rational arithmetic normalizes") {
  const Rational a(1, 2), b(1, 3);
  const Rational s = a + b;
  CHECK(s.num == 5);
  CHECK(s.den == 6);
  const Rational t = a * b;
  CHECK(t.num == 1);
  CHECK(t.den == 6);
  const Rational u = Rational(2, -4);
  CHECK(u.num == -1);
  CHECK(u.den == 2);
}

TEST_CASE("rational nullspace of a 1x3 row") {
  std::vector<std::vector<Rational>> m = {{Rational(1), Rational(2), Rational(3)}};
  const auto basis = rational_nullspace(m, 3);
  REQUIRE(basis.size() == 2);
  for (const auto& v : basis) {
    Rational dot;
    for (int j = 0; j < 3; ++j) dot = dot + m[0][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
    CHECK(dot.is_zero());
  }
}

TEST_CASE("laplacian kernel on degree-2 monomials in the plane") {
  // Columns: x^2, xy, y^2; laplacian row: [2, 0, 2].
  std::vector<std::vector<Rational>> m = {{Rational(2), Rational(0), Rational(2)}};
  const auto basis = rational_nullspace(m, 3);
  REQUIRE(basis.size() == 2);  // harmonic polynomials x^2 - y^2 and xy
}

}  // TEST_SUITE
