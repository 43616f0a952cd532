#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "spinodal/fields.hpp"
#include "spinodal/frequency.hpp"
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

}  // namespace

TEST_SUITE("frequency") {

TEST_CASE("homogeneous fields have frequency exactly their degree") {
  auto rep = rep_of(3);
  const ModelMetric flat = ModelMetric::flat(3);
  for (int k : {1, 2, 3}) {
    const auto basis = dirac_harmonic_basis(*rep, k);
    SpinorField f =
        synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
    for (double r : {0.1, 0.35, 0.6}) {
      const double h = boundary_height(f, RVector::Zero(3), r, flat);
      const double d = boundary_flux(f, RVector::Zero(3), r, flat);
      CHECK(std::abs(r * d / h - k) <= 1e-12);
    }
  }
}

TEST_CASE("planar degree-one height matches the closed form") {
  // psi = ((x1 + i x2), -(x1 + i x2)): |psi|^2 = 2 r^2 on the circle of
  // radius r, so H(r) = 2 r^2 * 2 pi r = 4 pi r^3.
  auto rep = rep_of(2);
  Poly p(2);
  p.add_term({1, 0}, cplx(1.0, 0.0));
  p.add_term({0, 1}, cplx(0.0, 1.0));
  std::vector<Poly> comps = {p, p * cplx(-1.0, 0.0)};
  HomogeneousSpinorPoly poly(2, 1, comps);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(2), poly, RVector::Zero(2));
  const double h = boundary_height(f, RVector::Zero(2), 0.5,
                                   ModelMetric::flat(2));
  CHECK(h == doctest::Approx(4.0 * 3.14159265358979323846 * 0.125)
                 .epsilon(1e-12));
}

TEST_CASE("plane waves have purely oscillatory radial pairing") {
  auto rep = rep_of(3);
  SpinorField f =
      synth_plane_wave(rep, small_grid(3), vec3(1.3, -0.7, 0.4), +1);
  const ModelMetric flat = ModelMetric::flat(3);
  for (double r : {0.2, 0.5}) {
    const double h = boundary_height(f, RVector::Zero(3), r, flat);
    const double d = boundary_flux(f, RVector::Zero(3), r, flat);
    CHECK(std::abs(d) <= 1e-10 * h / r);
  }
}

TEST_CASE("profile columns are consistent and metric weight cancels in N") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 2);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  const std::vector<double> radii = {0.1, 0.2, 0.3, 0.4};
  const ModelMetric flat = ModelMetric::flat(3);
  const ModelMetric curved = ModelMetric::sphere(3, 1.0);
  const FrequencyProfile pf = frequency_profile(f, RVector::Zero(3), radii,
                                                flat);
  const FrequencyProfile pc = frequency_profile(f, RVector::Zero(3), radii,
                                                curved);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    CHECK(pf.order[j] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pc.order[j] == doctest::Approx(2.0).epsilon(1e-12));
    // The curved height carries the area ratio phi^{n-1} < 1 on the sphere.
    const double phi2 = pc.height[j] / pf.height[j];
    CHECK(phi2 < 1.0);
    CHECK(phi2 > 0.9);
    // Default options: adjusted = N + 1 with c_am = 0.
    CHECK(pf.adjusted[j] == doctest::Approx(pf.order[j] + 1.0).epsilon(1e-14));
  }
}

TEST_CASE("vanishing order snaps to the planted degree") {
  auto rep = rep_of(3);
  CVector dir(rep->fiber_dim);
  dir << cplx(0.8, 0.0), cplx(0.0, 0.6);
  for (int k : {1, 2}) {
    const auto basis = dirac_harmonic_basis(*rep, k);
    SpinorField f =
        synth_planted(rep, small_grid(3), basis[0], 0.4, dir, RVector::Zero(3));
    const VanishingOrder vo = vanishing_order(f, RVector::Zero(3), 0.3);
    CHECK(vo.order == k);
    CHECK(std::abs(vo.limit - k) <= 1e-3);
    CHECK(vo.raw.size() == 6);
  }
}

TEST_CASE("vanishing order of a nonvanishing field is zero") {
  auto rep = rep_of(3);
  CVector u(rep->fiber_dim);
  u << cplx(1.0, 0.0), cplx(0.0, 0.0);
  SpinorField f = synth_dirac_bubble(rep, small_grid(3), u, 1.0);
  const VanishingOrder vo = vanishing_order(f, RVector::Zero(3), 0.3);
  CHECK(vo.order == 0);
}

TEST_CASE("monotonicity audit is clean on an exactly constant frequency") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 2);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  const FrequencyProfile prof = frequency_profile(
      f, RVector::Zero(3), {0.05, 0.1, 0.15, 0.2, 0.25, 0.3},
      ModelMetric::flat(3));
  const MonotonicityAudit audit = monotonicity_audit(prof);
  CHECK(audit.c_am_fit == 0.0);
  CHECK(audit.violations.empty());
  CHECK(audit.max_violation == 0.0);
}

TEST_CASE("monotonicity audit matches the closed-form pair constant") {
  // Hand-built profile with one decreasing step: the smallest admissible
  // constant solves exp(c/(b+1)(t^{b+1}-s^{b+1})) (N_t+1) = (N_s+1).
  FrequencyProfile prof;
  prof.radii = {0.1, 0.2};
  prof.order = {2.0, 1.9};
  prof.height = {1.0, 1.0};
  prof.flux = {0.0, 0.0};
  prof.adjusted = {0.0, 0.0};
  const double beta = 0.5;
  const double want = std::log(3.0 / 2.9) * (beta + 1.0) /
                      (std::pow(0.2, beta + 1.0) - std::pow(0.1, beta + 1.0));
  const MonotonicityAudit audit = monotonicity_audit(prof, beta, 1.0);
  CHECK(audit.c_am_fit == doctest::Approx(want).epsilon(2e-3));
  CHECK(audit.violations.empty());
}

TEST_CASE("monotonicity audit reports unrepairable drops") {
  FrequencyProfile prof;
  prof.radii = {0.1, 0.1001};
  prof.order = {5.0, 0.0};
  const MonotonicityAudit audit = monotonicity_audit(prof);
  CHECK(audit.c_am_fit == 1e3);
  CHECK(audit.violations.size() == 1);
  CHECK(audit.max_violation > 0.0);
}

TEST_CASE("doubling bound holds with equality for homogeneous fields") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 1);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  const DoublingCheck chk = doubling_check(f, RVector::Zero(3), 0.2, 0.4,
                                           ModelMetric::flat(3));
  CHECK(chk.passed);
  CHECK(chk.sup_order == doctest::Approx(1.0).epsilon(1e-10));
  // H ~ r^{n-1+2k} exactly, so the bound is achieved up to quadrature.
  CHECK(chk.lhs == doctest::Approx(chk.rhs).epsilon(1e-10));
}

TEST_CASE("uniform order scan takes the maximum over centers") {
  auto rep = rep_of(3);
  CVector dir(rep->fiber_dim);
  dir << cplx(1.0, 0.0), cplx(0.0, 0.0);
  const auto basis = dirac_harmonic_basis(*rep, 2);
  SpinorField f =
      synth_planted(rep, small_grid(3), basis[0], 0.2, dir, RVector::Zero(3));
  std::vector<RVector> centers = {RVector::Zero(3), vec3(0.21, 0.13, -0.17)};
  const UniformOrderScan scan = uniform_order_scan(f, centers, 0.15);
  REQUIRE(scan.orders.size() == 2);
  CHECK(scan.orders[0].order == 2);
  CHECK(scan.orders[1].order == 0);
  CHECK(scan.max_order == 2);
}

TEST_CASE("profile serialization is deterministic csv") {
  auto rep = rep_of(3);
  const auto basis = dirac_harmonic_basis(*rep, 1);
  SpinorField f =
      synth_harmonic_poly(rep, small_grid(3), basis[0], RVector::Zero(3));
  const FrequencyProfile prof = frequency_profile(
      f, RVector::Zero(3), {0.1, 0.2, 0.3}, ModelMetric::flat(3));
  const std::string pa = "/tmp/spinodal_freq_a.csv";
  const std::string pb = "/tmp/spinodal_freq_b.csv";
  save_frequency_profile(prof, pa);
  save_frequency_profile(prof, pb);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(pa);
  CHECK(a == slurp(pb));
  CHECK(a.find("spinodal-frequency v1") != std::string::npos);
  CHECK(a.find("r,H,D,N,adjustedN") != std::string::npos);
  int rows = 0;
  std::stringstream ss(a);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] != '#' && line[0] != 'r') ++rows;
  }
  CHECK(rows == 3);
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

TEST_CASE("degenerate and malformed inputs are rejected") {
  auto rep = rep_of(3);
  const GridSpec g = small_grid(3, 1.0, 17, 64);
  std::vector<cplx> zeros(g.node_count() * rep->fiber_dim, cplx(0.0, 0.0));
  std::vector<std::uint8_t> loaded(g.node_count(), 1);
  SpinorField zero = field_from_samples(rep, g, zeros, loaded);
  CHECK(boundary_height(zero, RVector::Zero(3), 0.3, ModelMetric::flat(3)) ==
        0.0);
  CHECK_THROWS_AS(frequency_profile(zero, RVector::Zero(3), {0.3},
                                    ModelMetric::flat(3)),
                  Error);

  SpinorField f = synth_plane_wave(rep, small_grid(3), vec3(1, 0, 0), +1);
  CHECK_THROWS_AS(frequency_profile(f, RVector::Zero(3), {0.3, 0.2},
                                    ModelMetric::flat(3)),
                  Error);
  CHECK_THROWS_AS(doubling_check(f, RVector::Zero(3), 0.4, 0.2,
                                 ModelMetric::flat(3)),
                  Error);
  CHECK_THROWS_AS(vanishing_order(f, RVector::Zero(3), -0.1), Error);
}

}  // TEST_SUITE
