#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "spinodal/fields.hpp"
#include "spinodal/green.hpp"
#include "spinodal/harmonic.hpp"

using namespace spinodal;

namespace {

std::shared_ptr<const CliffordRep> rep_of(int n) {
  return std::make_shared<const CliffordRep>(build_clifford_rep(n));
}

GridSpec small_grid(int n, double R = 1.0, int m = 33, int sphere = 512) {
  GridSpec g;
  g.n = n;
  g.R = R;
  g.points_per_axis = m;
  g.sphere_nodes = sphere;
  return g;
}

RVector vec3(double a, double b, double c) {
  RVector v(3);
  v << a, b, c;
  return v;
}

/// Fourth-order central first-difference of a scalar function along one axis.
template <typename F>
double fd_axis(F&& f, const RVector& z, int axis, double h) {
  RVector p = z;
  auto at = [&](double step) {
    p[axis] = z[axis] + step;
    return f(p);
  };
  return (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
}

double poly_pair_diff(const HomogeneousSpinorPoly& a,
                      const HomogeneousSpinorPoly& b) {
  REQUIRE(a.fiber_dim() == b.fiber_dim());
  double worst = 0.0;
  for (int c = 0; c < a.fiber_dim(); ++c) {
    worst = std::max(worst, (a.component(c) - b.component(c)).max_abs_coeff());
  }
  return worst;
}

}  // namespace

TEST_SUITE("green") {

TEST_CASE("scalar kernel matches closed forms at reference points") {
  RVector z3 = vec3(2.0, 0.0, 0.0);
  CHECK(laplace_fundamental(3, z3) ==
        doctest::Approx(0.039788735772973836).epsilon(1e-14));  // 1/(8 pi)
  RVector z2(2);
  z2 << std::exp(1.0), 0.0;
  CHECK(laplace_fundamental(2, z2) ==
        doctest::Approx(-0.15915494309189535).epsilon(1e-14));  // -1/(2 pi)
  RVector z4(4);
  z4 << 0.5, -0.5, 0.5, 0.5;
  CHECK(laplace_fundamental(4, z4) ==
        doctest::Approx(0.02533029591058444).epsilon(1e-14));  // 1/(4 pi^2)
}

TEST_CASE("first kernel derivatives match the explicit gradient") {
  for (int n : {2, 3, 4}) {
    RVector z(n);
    for (int j = 0; j < n; ++j) z[j] = 0.3 + 0.2 * j * (j % 2 ? -1 : 1);
    const double r = z.norm();
    for (int j = 0; j < n; ++j) {
      MultiIndex a(n, 0);
      a[j] = 1;
      const double want = -z[j] / (unit_sphere_area(n) * std::pow(r, n));
      CHECK(laplace_derivative(n, a, z) ==
            doctest::Approx(want).epsilon(1e-13));
    }
  }
}

TEST_CASE("second kernel derivatives match the explicit Hessian") {
  // d_i d_j G0 = (n z_i z_j - delta_ij |z|^2) / (area * |z|^{n+2}),
  // valid in every dimension including the planar logarithm.
  for (int n : {2, 3, 4}) {
    RVector z(n);
    for (int j = 0; j < n; ++j) z[j] = 0.7 - 0.3 * j;
    const double r = z.norm();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        MultiIndex a(n, 0);
        a[i] += 1;
        a[j] += 1;
        const double want = (n * z[i] * z[j] - (i == j ? r * r : 0.0)) /
                            (unit_sphere_area(n) * std::pow(r, n + 2));
        CHECK(laplace_derivative(n, a, z) ==
              doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("third derivatives agree with finite differences of the Hessian") {
  const int n = 3;
  const RVector z = vec3(0.7, -0.4, 0.5);
  MultiIndex parent = {1, 1, 0};
  for (int axis : {0, 1, 2}) {
    MultiIndex a = parent;
    a[axis] += 1;
    const double got = laplace_derivative(n, a, z);
    const double fd = fd_axis(
        [&](const RVector& p) { return laplace_derivative(n, parent, p); }, z,
        axis, 0.02);
    CHECK(got == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("the scalar kernel is harmonic away from the pole") {
  for (int n : {2, 3, 4}) {
    RVector z(n);
    for (int j = 0; j < n; ++j) z[j] = 0.4 + 0.1 * j;
    double lap = 0.0, scale = 0.0;
    for (int j = 0; j < n; ++j) {
      MultiIndex a(n, 0);
      a[j] = 2;
      const double term = laplace_derivative(n, a, z);
      lap += term;
      scale = std::max(scale, std::abs(term));
    }
    CHECK(std::abs(lap) <= 1e-12 * scale);
  }
}

TEST_CASE("matrix kernel equals the gamma-weighted scalar gradient") {
  auto rep = rep_of(3);
  const RVector z = vec3(0.2, -0.6, 0.9);
  Matrix want = Matrix::Zero(rep->fiber_dim, rep->fiber_dim);
  for (int j = 0; j < 3; ++j) {
    MultiIndex a(3, 0);
    a[j] = 1;
    want += rep->gammas[j] * laplace_derivative(3, a, z);
  }
  const Matrix got = dirac_fundamental(*rep, z);
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-14 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("matrix kernel is annihilated by the operator away from the pole") {
  for (int n : {2, 3, 4}) {
    auto rep = rep_of(n);
    RVector z(n);
    for (int j = 0; j < n; ++j) z[j] = 0.5 - 0.15 * j;
    Matrix acc = Matrix::Zero(rep->fiber_dim, rep->fiber_dim);
    double scale = 0.0;
    for (int j = 0; j < n; ++j) {
      MultiIndex ej(n, 0);
      ej[j] = 1;
      const Matrix dj = green_derivative(*rep, ej, z);
      acc += rep->gammas[j] * dj;
      scale = std::max(scale, dj.cwiseAbs().maxCoeff());
    }
    CHECK(acc.cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("Taylor terms are operator-harmonic and sum to the kernel") {
  auto rep = rep_of(3);
  const RVector y = vec3(0.3, -1.0, 0.4);
  CVector u(rep->fiber_dim);
  u << cplx(1.0, 0.0), cplx(0.0, 0.5);
  u.normalize();

  // Degree zero is the kernel value itself.
  const HomogeneousSpinorPoly t0 = green_taylor_term(*rep, 0, y, u);
  const CVector direct = dirac_fundamental(*rep, RVector(-y)) * u;
  CHECK((t0.eval(RVector::Zero(3)) - direct).norm() <= 1e-14 * direct.norm());

  // Every term is annihilated by the first-order operator in x.
  for (int k = 1; k <= 3; ++k) {
    const HomogeneousSpinorPoly tk = green_taylor_term(*rep, k, y, u);
    CHECK(tk.degree() == k);
    CHECK(tk.dirac_residual(*rep) <= 1e-12 * tk.max_abs_coeff());
  }

  // Remainder after degrees 0..2 scales like |x|^3: halving |x| divides it
  // by about 8.
  auto remainder = [&](double t) {
    RVector dir = vec3(0.35, 0.2, -0.1);
    dir.normalize();
    const RVector x = t * dir;
    CVector sum = CVector::Zero(rep->fiber_dim);
    for (int k = 0; k <= 2; ++k)
      sum += green_taylor_term(*rep, k, y, u).eval(x);
    return (dirac_fundamental(*rep, RVector(x - y)) * u - sum).norm();
  };
  const double ratio = remainder(0.1) / remainder(0.05);
  CHECK(ratio >= 5.6);
  CHECK(ratio <= 11.2);
}

TEST_CASE("representation reproduces a constant spinor exactly") {
  auto rep = rep_of(3);
  HomogeneousSpinorPoly c0(3, rep->fiber_dim, 0);
  c0.component(0) = Poly::constant(3, cplx(0.8, -0.3));
  c0.component(1) = Poly::constant(3, cplx(0.1, 0.4));
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), c0, RVector::Zero(3));
  std::vector<RVector> probes = {RVector::Zero(3), vec3(0.1, 0.05, -0.2)};
  const RepresentationCheck chk =
      newton_represent(f, RVector::Zero(3), 0.7, probes);
  CHECK(chk.max_rel_err <= 1e-10);
}

TEST_CASE("representation reproduces operator-harmonic polynomials") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 2);
  REQUIRE(!basis.empty());
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  std::vector<RVector> probes = {vec3(0.15, -0.1, 0.2), vec3(-0.05, 0.2, 0.1)};
  const RepresentationCheck chk =
      newton_represent(f, RVector::Zero(3), 0.7, probes);
  CHECK(chk.max_rel_err <= 1e-8);
}

TEST_CASE("representation handles a nonzero interior term") {
  auto rep = rep_of(3);
  const RVector xi = vec3(1.2, -0.8, 0.5);
  SpinorField f = synth_plane_wave(rep, small_grid(3), xi, +1);
  std::vector<RVector> probes = {RVector::Zero(3), vec3(0.12, 0.08, -0.15)};
  const RepresentationCheck chk =
      newton_represent(f, RVector::Zero(3), 0.7, probes);
  CHECK(chk.max_rel_err <= 1e-6);
}

TEST_CASE("representation error shrinks under grid refinement") {
  auto rep = rep_of(3);
  const RVector xi = vec3(1.2, -0.8, 0.5);
  std::vector<RVector> probes = {vec3(0.1, 0.0, 0.05), vec3(-0.08, 0.12, 0.0)};
  double errs[2];
  int idx = 0;
  for (int m : {33, 65}) {
    SpinorField f = synth_plane_wave(rep, small_grid(3, 1.0, m), xi, +1);
    f.set_eval_mode(EvalMode::interp_cubic);
    errs[idx++] = newton_represent(f, RVector::Zero(3), 0.7, probes).max_rel_err;
  }
  CHECK(errs[1] <= 1e-3);
  CHECK(errs[0] / errs[1] >= 2.0);
}

TEST_CASE("representation rejects probes near the sphere") {
  auto rep = rep_of(3);
  SpinorField f = synth_plane_wave(rep, small_grid(3), vec3(1.0, 0.0, 0.0), +1);
  std::vector<RVector> probes = {vec3(0.69, 0.0, 0.0)};
  CHECK_THROWS_AS(newton_represent(f, RVector::Zero(3), 0.7, probes), Error);
}

TEST_CASE("splitting recovers a planted leading term and tail exponent") {
  auto rep = rep_of(3);
  CVector dir(rep->fiber_dim);
  dir << cplx(0.6, 0.0), cplx(0.0, 0.8);
  for (int k : {1, 2}) {
    const auto basis = dirac_harmonic_basis(*rep, k);
    REQUIRE(!basis.empty());
    const HomogeneousSpinorPoly& lead = basis[0];
    SpinorField f =
        synth_planted(rep, small_grid(3), lead, 0.3, dir, RVector::Zero(3));
    const double sigma = k - 0.5;
    const Decomposition dec = decompose(f, RVector::Zero(3), sigma, 0.5);
    REQUIRE(static_cast<int>(dec.terms.size()) == k + 1);

    const double scale = lead.max_abs_coeff();
    CHECK(poly_pair_diff(dec.terms[k], lead) <= 1e-8 * scale);
    for (int j = 0; j < k; ++j) {
      CHECK(dec.terms[j].max_abs_coeff() <= 1e-8 * scale);
    }
    CHECK(dec.q_exponent_fit == doctest::Approx(k + 0.5).epsilon(0.02));
    CHECK(dec.q_rel_size > 0.0);
  }
}

TEST_CASE("splitting of a pure polynomial hits the quadrature floor") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 1);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  const Decomposition dec = decompose(f, RVector::Zero(3), 1.5, 0.5);
  REQUIRE(dec.terms.size() == 3);
  const double scale = basis[0].max_abs_coeff();
  CHECK(poly_pair_diff(dec.terms[1], basis[0]) <= 1e-10 * scale);
  CHECK(dec.terms[0].max_abs_coeff() <= 1e-10 * scale);
  CHECK(dec.terms[2].max_abs_coeff() <= 1e-10 * scale);
  CHECK(dec.q_exponent_fit == 99.0);  // sentinel: remainder below floor
  CHECK(dec.q_rel_size <= 1e-10);
}

TEST_CASE("splitting report serializes deterministically") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 1);
  CVector dir(rep->fiber_dim);
  dir << cplx(1.0, 0.0), cplx(0.0, 0.0);
  SpinorField f =
      synth_planted(rep, small_grid(3), basis[0], 0.2, dir, RVector::Zero(3));
  const Decomposition dec = decompose(f, RVector::Zero(3), 0.5, 0.5);
  const std::string path_a = "/tmp/spinodal_dec_a.json";
  const std::string path_b = "/tmp/spinodal_dec_b.json";
  save_decomposition(dec, path_a);
  save_decomposition(dec, path_b);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(path_a);
  CHECK(a == slurp(path_b));
  CHECK(a.find("spinodal-decomposition v1") != std::string::npos);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("kernel argument guards") {
  auto rep = rep_of(3);
  CHECK_THROWS_AS(laplace_fundamental(3, RVector::Zero(3)), Error);
  CHECK_THROWS_AS(laplace_fundamental(1, RVector::Ones(1)), Error);
  MultiIndex wrong = {1, 0};
  CHECK_THROWS_AS(laplace_derivative(3, wrong, vec3(1, 0, 0)), Error);
  SpinorField f = synth_plane_wave(rep, small_grid(3), vec3(1, 0, 0), +1);
  CHECK_THROWS_AS(decompose(f, RVector::Zero(3), 7.0, 0.5), Error);
}

}  // TEST_SUITE
