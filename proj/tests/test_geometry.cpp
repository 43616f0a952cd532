#include <doctest.h>

#include <cmath>

#include "spinodal/geometry.hpp"

using namespace spinodal;

TEST_SUITE("geometry") {

TEST_CASE("flat model: det w = 1, W = 0") {
  const ModelMetric m = ModelMetric::flat(3);
  const auto [detw, w] = radial_warp(m, 0.42);
  CHECK(detw == 1.0);
  CHECK(w == 0.0);
  CHECK(metric_expansion_check(m, RVector::Constant(3, 0.1)) == 0.0);
  CHECK(scalar_curvature(m) == 0.0);
  CHECK(std::isinf(coord_radius(m)));
  CHECK(coord_growth_constant(m) == 0.0);
}

TEST_CASE("unit 2-sphere warp at rho = 0.1") {
  const ModelMetric m = ModelMetric::sphere(3, 1.0);
  const auto [detw, w] = radial_warp(m, 0.1);
  // phi = sin(0.1)/0.1; det w = phi^4.
  const double phi = std::sin(0.1) / 0.1;
  CHECK(std::abs(detw - std::pow(phi, 4)) <= 1e-15);
  // W = 2 (cot(0.1) - 1/0.1) = 2 (-z/3 - z^3/45 - 2 z^5/945 - ...)
  //   = -0.06671115348...
  CHECK(w == doctest::Approx(-0.0667111534815).epsilon(1e-9));
}

TEST_CASE("W/rho tends to -(n-1) kappa / 3") {
  for (double kappa : {1.0, -1.0, 2.5}) {
    const ModelMetric m = kappa > 0 ? ModelMetric::sphere(4, kappa)
                                    : ModelMetric::hyperbolic(4, kappa);
    const double rho = 1e-3;
    const double w = radial_warp(m, rho).second;
    CHECK(std::abs(w / rho + (m.n - 1) * kappa / 3.0) <= 1e-5 * std::abs(kappa));
  }
}

TEST_CASE("series branch matches the direct formula near the switch point") {
  // The implementation switches to a series below z = 1e-2 to avoid the
  // cot(z) - 1/z cancellation; just below the switch the direct double
  // evaluation still has ~10 good digits, enough to cross-check the series.
  const double rho = 0.00999;
  const double s = radial_warp(ModelMetric::sphere(3, 1.0), rho).second;
  const double s_direct = 2.0 * (std::cos(rho) / std::sin(rho) - 1.0 / rho);
  CHECK(std::abs(s - s_direct) <= 1e-10);
  const double h = radial_warp(ModelMetric::hyperbolic(3, -1.0), rho).second;
  const double h_direct = 2.0 * (std::cosh(rho) / std::sinh(rho) - 1.0 / rho);
  CHECK(std::abs(h - h_direct) <= 1e-10);
}

TEST_CASE("expansion residual decays like r^4 on space forms") {
  const ModelMetric m = ModelMetric::sphere(3, 1.0);
  RVector dir(3);
  dir << 0.6, 0.48, 0.64;
  dir.normalize();
  const double r1 = metric_expansion_check(m, 0.1 * dir);
  const double r2 = metric_expansion_check(m, 0.05 * dir);
  CHECK(r1 > 0.0);
  const double ratio = r1 / r2;
  // Fourth order: halving the radius divides the residual by ~16.
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("scalar curvature and coordinate constants") {
  const ModelMetric s = ModelMetric::sphere(3, 1.0);
  CHECK(scalar_curvature(s) == doctest::Approx(6.0));
  CHECK(coord_radius(s) == doctest::Approx(0.5));
  const ModelMetric h = ModelMetric::hyperbolic(3, -1.0);
  CHECK(scalar_curvature(h) == doctest::Approx(-6.0));
  // |W| ~ 2 rho / 3 for small rho; the least-squares constant over (0, 0.5]
  // sits slightly above 2/3 for the sphere branch (cot grows superlinearly).
  const double c = coord_growth_constant(s);
  CHECK(c > 0.6);
  CHECK(c < 0.8);
}

TEST_CASE("domain guards") {
  const ModelMetric s = ModelMetric::sphere(2, 4.0);  // guard pi/2
  CHECK_THROWS_AS(radial_warp(s, 1.6), Error);
  CHECK_THROWS_AS(radial_warp(s, 0.0), Error);
  try {
    metric_expansion_check(s, RVector::Constant(2, 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(ModelMetric::sphere(3, -1.0), Error);
  CHECK_THROWS_AS(ModelMetric::hyperbolic(3, 1.0), Error);
}

}  // TEST_SUITE
