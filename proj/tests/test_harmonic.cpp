#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "spinodal/harmonic.hpp"
#include "spinodal/quadrature.hpp"

using namespace spinodal;

namespace {

std::shared_ptr<const CliffordRep> rep_of(int n) {
  return std::make_shared<const CliffordRep>(build_clifford_rep(n));
}

const double kPi = 3.14159265358979323846;

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("harmonic space dimensions") {
  CHECK(harmonic_space_dim(3, 0) == 1);
  CHECK(harmonic_space_dim(3, 1) == 3);
  CHECK(harmonic_space_dim(3, 2) == 5);
  CHECK(harmonic_space_dim(3, 3) == 7);
  CHECK(harmonic_space_dim(3, 4) == 9);
  CHECK(harmonic_space_dim(2, 5) == 2);
  CHECK(harmonic_space_dim(4, 2) == 9);
}

TEST_CASE("monomial sphere integrals") {
  CHECK(monomial_sphere_integral(3, {0, 0, 0}) == doctest::Approx(4.0 * kPi).epsilon(1e-13));
  CHECK(monomial_sphere_integral(3, {2, 0, 0}) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
  CHECK(monomial_sphere_integral(3, {2, 2, 0}) == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-13));
  CHECK(monomial_sphere_integral(3, {1, 2, 0}) == 0.0);
  CHECK(monomial_sphere_integral(2, {0, 0}) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(monomial_sphere_integral(2, {4, 0}) == doctest::Approx(2.0 * kPi * 3.0 / 8.0).epsilon(1e-13));
}

TEST_CASE("scalar harmonic basis: exact kernel, quadrature orthonormality") {
  for (int k = 1; k <= 4; ++k) {
    const auto basis = scalar_harmonic_basis(3, k);
    CHECK(static_cast<int>(basis.size()) == 2 * k + 1);
    for (const Poly& p : basis) {
      CHECK(p.laplacian().max_abs_coeff() <= 1e-12 * std::max(1.0, p.max_abs_coeff()));
    }
    // Orthonormality checked against an independent quadrature rule.
    const SphereRule rule = unit_sphere_rule(3, 512);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = a; b < basis.size(); ++b) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          acc += rule.weights[i] * basis[a].eval(rule.nodes[i]) *
                 std::conj(basis[b].eval(rule.nodes[i]));
        }
        const double want = a == b ? 1.0 : 0.0;
        CHECK(std::abs(acc - want) <= 1e-10);
      }
    }
  }
}

TEST_CASE("scalar harmonic basis: floating-point branch at degree 5") {
  const auto basis = scalar_harmonic_basis(3, 5);
  CHECK(static_cast<int>(basis.size()) == 11);
  for (const Poly& p : basis) {
    CHECK(p.laplacian().max_abs_coeff() <= 1e-9 * std::max(1.0, p.max_abs_coeff()));
  }
}

TEST_CASE("kernel basis dimensions for the first-order operator") {
  // n = 2: two elements at every positive degree.
  auto rep2 = rep_of(2);
  for (int k = 1; k <= 4; ++k) {
    CHECK(dirac_harmonic_basis(*rep2, k).size() == 2);
  }
  // n = 3: dimension 2(k+1).
  auto rep3 = rep_of(3);
  CHECK(dirac_harmonic_basis(*rep3, 0).size() == 2);
  CHECK(dirac_harmonic_basis(*rep3, 1).size() == 4);
  CHECK(dirac_harmonic_basis(*rep3, 2).size() == 6);
  CHECK(dirac_harmonic_basis(*rep3, 3).size() == 8);
  // n = 4: dimension 2(k+1)(k+2).
  auto rep4 = rep_of(4);
  CHECK(dirac_harmonic_basis(*rep4, 1).size() == 12);
}

TEST_CASE("kernel basis elements are operator-annihilated and harmonic") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 2);
  for (const auto& hp : basis) {
    const double scale = std::max(hp.max_abs_coeff(), 1.0);
    CHECK(hp.dirac_residual(*rep) <= 1e-10 * scale);
    // Components of kernel elements are scalar harmonics (the squared
    // operator is minus the laplacian).
    CHECK(hp.harmonic_residual() <= 1e-9 * scale);
    CHECK(hp.degree() == 2);
  }
}

TEST_CASE("explicit planar kernel element") {
  // In the plane, ((x1 + i x2)^k, -(x1 + i x2)^k) is annihilated exactly.
  auto rep = rep_of(2);
  for (int k = 1; k <= 3; ++k) {
    Poly f(2);
    // (x1 + i x2)^k expanded by the binomial theorem.
    for (int j = 0; j <= k; ++j) {
      double binom = 1.0;
      for (int t = 0; t < j; ++t) binom = binom * (k - t) / (t + 1);
      cplx coeff = binom;
      for (int t = 0; t < j; ++t) coeff *= cplx(0.0, 1.0);
      f.add_term({k - j, j}, coeff);
    }
    HomogeneousSpinorPoly hp(2, 2, k);
    hp.component(0) = f;
    hp.component(1) = f * cplx(-1.0, 0.0);
    CHECK(hp.dirac_residual(*rep) <= 1e-14);
  }
}

TEST_CASE("leading-term fit recovers a planted polynomial") {
  auto rep = rep_of(3);
  GridSpec g;
  g.n = 3;
  g.R = 1.0;
  g.points_per_axis = 33;
  g.sphere_nodes = 512;
  const auto basis = dirac_harmonic_basis(*rep, 2);
  // Take a fixed linear combination so all components are exercised.
  HomogeneousSpinorPoly target = basis[0].scaled(cplx(2.0, 0.5))
                                     .plus(basis[1].scaled(cplx(-1.0, 1.0)));
  SpinorField f = synth_harmonic_poly(rep, g, target, RVector::Zero(3));
  const LeadingTermFit fit = fit_leading_term(f, RVector::Zero(3), 2, 0.05, 0.12, 4);
  CHECK(fit.rel_residual <= 1e-10);
  CHECK(std::abs(fit.slope_estimate - 2.0) <= 0.05);
  // Coefficientwise agreement.
  const HomogeneousSpinorPoly diff = fit.poly.plus(target.scaled(cplx(-1.0, 0.0)));
  CHECK(diff.max_abs_coeff() <= 1e-8 * target.max_abs_coeff());
}

TEST_CASE("leading-term fit tolerates a fractional radial tail") {
  auto rep = rep_of(3);
  GridSpec g;
  g.n = 3;
  g.R = 1.0;
  g.points_per_axis = 33;
  g.sphere_nodes = 512;
  const auto basis = dirac_harmonic_basis(*rep, 2);
  CVector dir(2);
  dir << cplx(0.0, 1.0), cplx(1.0, 0.0);
  SpinorField f = synth_planted(rep, g, basis[0], 0.05, dir, RVector::Zero(3));
  const LeadingTermFit fit = fit_leading_term(f, RVector::Zero(3), 2, 0.05, 0.12, 4);
  const HomogeneousSpinorPoly diff = fit.poly.plus(basis[0].scaled(cplx(-1.0, 0.0)));
  // The tail is constant on each sphere, hence orthogonal to the degree-2
  // harmonic fit basis: recovery error stays near quadrature accuracy even
  // though the tail itself contributes visibly to the misfit.
  CHECK(diff.max_abs_coeff() <= 1e-6 * basis[0].max_abs_coeff());
  CHECK(fit.rel_residual >= 0.01);
  CHECK(fit.rel_residual <= 0.15);
}

TEST_CASE("fit precheck rejects the wrong vanishing order") {
  auto rep = rep_of(3);
  GridSpec g;
  g.n = 3;
  g.R = 1.0;
  g.points_per_axis = 33;
  g.sphere_nodes = 512;
  const auto basis = dirac_harmonic_basis(*rep, 2);
  SpinorField f = synth_harmonic_poly(rep, g, basis[0], RVector::Zero(3));
  try {
    fit_leading_term(f, RVector::Zero(3), 1, 0.05, 0.12, 4);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::wrong_order);
  }
}

TEST_CASE("polynomial serialization round-trips exactly") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 3);
  const std::string path = "/tmp/spinodal_poly.json";
  save_spinor_poly(basis[2], path);
  const HomogeneousSpinorPoly back = load_spinor_poly(path);
  CHECK(back.n() == 3);
  CHECK(back.degree() == 3);
  const HomogeneousSpinorPoly diff = back.plus(basis[2].scaled(cplx(-1.0, 0.0)));
  CHECK(diff.max_abs_coeff() == 0.0);
  std::remove(path.c_str());
}

}  // TEST_SUITE
