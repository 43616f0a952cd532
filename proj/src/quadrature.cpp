#include "spinodal/quadrature.hpp"

#include <cmath>

#include "spinodal/rng.hpp"

namespace spinodal {

namespace {
const double kPi = 3.14159265358979323846;
}

RadialRule gauss_legendre_01(int k) {
  require(k >= 1, ErrorKind::invalid_dimension, "gauss_legendre_01: k >= 1");
  RadialRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  // Nodes on [-1,1] by Newton iteration from the Chebyshev initial guess,
  // then affinely mapped to [0,1].
  for (int i = 0; i < k; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (k + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < k; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = k * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[k - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[k - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, result = 0.0;
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return result;
}

SphereRule unit_sphere_rule(int n, int target_nodes, std::uint64_t seed) {
  require(n >= 2, ErrorKind::invalid_dimension, "unit_sphere_rule: n >= 2");
  require(target_nodes >= 4, ErrorKind::invalid_dimension,
          "unit_sphere_rule: too few nodes");
  SphereRule rule;
  rule.n = n;

  if (n == 2) {
    const int m = target_nodes;
    rule.nodes.reserve(m);
    rule.weights.assign(m, 2.0 * kPi / m);
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * kPi * i / m;
      RVector p(2);
      p << std::cos(th), std::sin(th);
      rule.nodes.push_back(p);
    }
    return rule;
  }

  if (n == 3) {
    // integral_{S^2} f = integral_{-1}^{1} integral_0^{2pi} f d(phi) d(cos th)
    int p = static_cast<int>(std::lround(std::sqrt(target_nodes / 2.0)));
    p = std::max(p, 4);
    const int q = 2 * p;
    const RadialRule gl = gauss_legendre_01(p);
    rule.nodes.reserve(static_cast<std::size_t>(p) * q);
    rule.weights.reserve(static_cast<std::size_t>(p) * q);
    for (int i = 0; i < p; ++i) {
      const double t = 2.0 * gl.nodes[i] - 1.0;  // cos(theta) in (-1,1)
      const double wt = 2.0 * gl.weights[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int j = 0; j < q; ++j) {
        const double ph = 2.0 * kPi * j / q;
        RVector node(3);
        node << s * std::cos(ph), s * std::sin(ph), t;
        rule.nodes.push_back(node);
        rule.weights.push_back(wt * (2.0 * kPi / q));
      }
    }
    return rule;
  }

  // n >= 4: Halton quasi-Monte Carlo through Box-Muller onto the sphere.
  const int m = std::max(target_nodes, 4096);
  static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const int pairs = (n + 1) / 2;
  require(2 * pairs <= 8, ErrorKind::invalid_dimension,
          "unit_sphere_rule: dimension beyond the Halton base table");
  Rng rng(seed ^ 0x5350484552455155ULL);
  std::vector<double> shift(2 * pairs);
  for (double& s : shift) s = rng.uniform();

  const double area = unit_sphere_area(n);
  rule.nodes.reserve(m);
  rule.weights.assign(m, area / m);
  for (int i = 0; i < m; ++i) {
    RVector g(n);
    for (int pr = 0; pr < pairs; ++pr) {
      double u1 = radical_inverse(i + 1, bases[2 * pr]) + shift[2 * pr];
      double u2 = radical_inverse(i + 1, bases[2 * pr + 1]) + shift[2 * pr + 1];
      u1 -= std::floor(u1);
      u2 -= std::floor(u2);
      if (u1 < 1e-16) u1 = 1e-16;
      const double rad = std::sqrt(-2.0 * std::log(u1));
      const double z1 = rad * std::cos(2.0 * kPi * u2);
      const double z2 = rad * std::sin(2.0 * kPi * u2);
      g[2 * pr] = z1;
      if (2 * pr + 1 < n) g[2 * pr + 1] = z2;
    }
    double norm = g.norm();
    if (norm < 1e-14) {
      g.setZero();
      g[0] = 1.0;
      norm = 1.0;
    }
    rule.nodes.push_back(g / norm);
  }
  return rule;
}

ShellRule shell_rule(int n, double r, int k, bool sqrt_map) {
  require(r > 0.0, ErrorKind::domain, "shell_rule: radius must be positive");
  const RadialRule gl = gauss_legendre_01(k);
  ShellRule rule;
  rule.rho.resize(k);
  rule.weights.resize(k);
  for (int i = 0; i < k; ++i) {
    const double t = gl.nodes[i];
    if (sqrt_map) {
      // rho = r t^2, d(rho) = 2 r t dt; weight = w * rho^{n-1} * 2 r t.
      const double rho = r * t * t;
      rule.rho[i] = rho;
      rule.weights[i] = gl.weights[i] * std::pow(rho, n - 1) * 2.0 * r * t;
    } else {
      const double rho = r * t;
      rule.rho[i] = rho;
      rule.weights[i] = gl.weights[i] * std::pow(rho, n - 1) * r;
    }
  }
  return rule;
}

}  // namespace spinodal
