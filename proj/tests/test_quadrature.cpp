#include <doctest.h>

#include <cmath>

#include "spinodal/quadrature.hpp"

using namespace spinodal;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre on [0,1] integrates degree 2k-1 exactly") {
  const RadialRule r = gauss_legendre_01(5);
  double s9 = 0.0, s0 = 0.0;
  for (int i = 0; i < 5; ++i) {
    s9 += r.weights[i] * std::pow(r.nodes[i], 9);
    s0 += r.weights[i];
  }
  CHECK(std::abs(s0 - 1.0) <= 1e-14);
  CHECK(std::abs(s9 - 0.1) <= 1e-14);
}

TEST_CASE("circle rule: weight sum and second moments") {
  const SphereRule rule = unit_sphere_rule(2, 64);
  double w = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    w += rule.weights[i];
    x2 += rule.weights[i] * rule.nodes[i][0] * rule.nodes[i][0];
  }
  CHECK(std::abs(w - 2.0 * kPi) <= 1e-12);
  CHECK(std::abs(x2 - kPi) <= 1e-12);
}

TEST_CASE("2-sphere rule: area, moments, and a degree-4 harmonic") {
  const SphereRule rule = unit_sphere_rule(3, 512);
  CHECK(rule.nodes.size() == 512);
  double w = 0.0, z2 = 0.0, h4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const RVector& p = rule.nodes[i];
    w += rule.weights[i];
    z2 += rule.weights[i] * p[2] * p[2];
    // 35 z^4 - 30 z^2 + 3 is (up to scale) a degree-4 Legendre harmonic.
    const double z = p[2];
    h4 += rule.weights[i] * (35.0 * z * z * z * z - 30.0 * z * z + 3.0);
  }
  CHECK(std::abs(w - 4.0 * kPi) <= 1e-11);
  CHECK(std::abs(z2 - 4.0 * kPi / 3.0) <= 1e-11);
  CHECK(std::abs(h4) <= 1e-10);
}

TEST_CASE("3-sphere rule: exact weight sum, near-exact moments") {
  const SphereRule rule = unit_sphere_rule(4, 4096, 7);
  const double area = unit_sphere_area(4);  // 2 pi^2
  double w = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    w += rule.weights[i];
    x2 += rule.weights[i] * rule.nodes[i][0] * rule.nodes[i][0];
    CHECK(std::abs(rule.nodes[i].norm() - 1.0) <= 1e-12);
  }
  CHECK(std::abs(w - area) <= 1e-10);
  // Quasi-Monte Carlo: second moment area/4 within a percent.
  CHECK(std::abs(x2 - area / 4.0) <= 0.01 * area);
}

TEST_CASE("shell rule reproduces ball volume and half-integer moments") {
  const int n = 3;
  const double r = 0.8;
  const ShellRule plain = shell_rule(n, r, 16, false);
  double vol = 0.0;
  for (std::size_t i = 0; i < plain.rho.size(); ++i) vol += plain.weights[i];
  // sum w = integral_0^r rho^{n-1} = r^n / n; times sphere area -> ball volume.
  CHECK(std::abs(vol * unit_sphere_area(n) - unit_ball_volume(n) * std::pow(r, n)) <= 1e-12);

  const ShellRule mapped = shell_rule(n, r, 16, true);
  double m_half = 0.0;
  for (std::size_t i = 0; i < mapped.rho.size(); ++i) {
    m_half += mapped.weights[i] * std::pow(mapped.rho[i], -0.5);
  }
  // integral_0^r rho^{n-1-1/2} d rho = r^{n-1/2} / (n - 1/2), exact under
  // the rho = r t^2 substitution.
  CHECK(std::abs(m_half - std::pow(r, n - 0.5) / (n - 0.5)) <= 1e-13);
}

TEST_CASE("halton radical inverse") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(std::abs(radical_inverse(1, 3) - 1.0 / 3.0) <= 1e-16);
}

}  // TEST_SUITE
