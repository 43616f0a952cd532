#include "spinodal/identities.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "spinodal/quadrature.hpp"

namespace spinodal {

namespace {

void require_hardy_dimension(int n) {
  require(n != 2, ErrorKind::unsupported_dimension,
          "hardy_slack: the constant 2/(n-2) degenerates in dimension 2");
  require(n >= 3, ErrorKind::invalid_dimension,
          "hardy_slack: dimension must be >= 3");
}

}  // namespace

double hardy_radius(const GridSpec& grid, const ModelMetric& metric) {
  require_hardy_dimension(grid.n);
  double r = 0.3 * grid.R;
  if (!metric.is_flat()) {
    require(metric.n == grid.n, ErrorKind::shape_mismatch,
            "hardy_radius: metric dimension mismatch");
    const double c = coord_growth_constant(metric);
    r = std::min(r, std::sqrt((grid.n - 2) / (4.0 * c)));
  }
  return r;
}

HardyReport hardy_slack(int n, const std::function<double(const RVector&)>& u,
                        const std::function<double(const RVector&)>& grad_u,
                        const RVector& center, double r, int radial_nodes,
                        int sphere_nodes) {
  require_hardy_dimension(n);
  require(r > 0.0, ErrorKind::domain, "hardy_slack: radius must be positive");
  require(center.size() == n, ErrorKind::shape_mismatch,
          "hardy_slack: center dimension mismatch");

  const double c_h = 2.0 / (n - 2);
  const SphereRule dirs = unit_sphere_rule(n, sphere_nodes);
  const ShellRule shells = shell_rule(n, r, radial_nodes, /*sqrt_map=*/true);

  std::vector<double> bterms(dirs.nodes.size());
  for (std::size_t d = 0; d < dirs.nodes.size(); ++d) {
    const double val = u(center + r * dirs.nodes[d]);
    bterms[d] = dirs.weights[d] * std::pow(r, n - 1) * val * val;
  }

  std::vector<double> gterms, sterms;
  gterms.reserve(shells.rho.size() * dirs.nodes.size());
  sterms.reserve(shells.rho.size() * dirs.nodes.size());
  for (std::size_t s = 0; s < shells.rho.size(); ++s) {
    const double rho = shells.rho[s];
    for (std::size_t d = 0; d < dirs.nodes.size(); ++d) {
      const RVector x = center + rho * dirs.nodes[d];
      const double w = shells.weights[s] * dirs.weights[d];
      const double g = grad_u(x);
      const double v = u(x);
      gterms.push_back(w * g * g);
      sterms.push_back(w * v * v / (rho * rho));
    }
  }

  HardyReport out;
  out.r = r;
  out.c_hardy = c_h;
  out.boundary_term = c_h / r * pairwise_sum(bterms);
  out.gradient_term = c_h * c_h * pairwise_sum(gterms);
  out.singular_term = pairwise_sum(sterms);
  out.slack = out.boundary_term + out.gradient_term - out.singular_term;
  return out;
}

HardyReport hardy_slack(const SpinorField& field, const RVector& center,
                        double r, int radial_nodes) {
  const int n = field.grid().n;
  require_hardy_dimension(n);
  return hardy_slack(
      n, [&](const RVector& x) { return field.value_at(x).norm(); },
      [&](const RVector& x) { return field.gradient_at(x).norm(); }, center, r,
      radial_nodes, field.grid().sphere_nodes);
}

PohozaevReport pohozaev_residual(const SpinorField& field,
                                 const RVector& center, double r,
                                 int radial_nodes) {
  const int n = field.grid().n;
  require(r > 0.0, ErrorKind::domain,
          "pohozaev_residual: radius must be positive");

  const SphereSamples trace = sphere_trace(field, center, r);
  std::vector<double> bterms(trace.points.size());
  std::vector<double> bscale(trace.points.size());
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const Matrix grad = field.gradient_at(trace.points[i]);
    const double g2 = grad.squaredNorm();
    const double dn2 = trace.dnu[i].squaredNorm();
    const double mixed = fiber_inner(trace.psi[i], trace.dnu[i]).real();
    bterms[i] =
        trace.weights[i] * (r * g2 - 2.0 * r * dn2 - (n - 2) * mixed);
    bscale[i] = trace.weights[i] * r * g2;
  }

  const SphereRule& dirs = field.sphere_rule();
  const ShellRule shells = shell_rule(n, r, radial_nodes, /*sqrt_map=*/true);
  std::vector<double> vterms;
  vterms.reserve(shells.rho.size() * dirs.nodes.size());
  for (std::size_t s = 0; s < shells.rho.size(); ++s) {
    for (std::size_t d = 0; d < dirs.nodes.size(); ++d) {
      const RVector offset = shells.rho[s] * dirs.nodes[d];
      const RVector x = center + offset;
      const CVector lap = field.laplacian_at(x);
      const CVector scaling =
          2.0 * (field.gradient_at(x) * offset.cast<cplx>()) +
          cplx(n - 2, 0.0) * field.value_at(x);
      vterms.push_back(shells.weights[s] * dirs.weights[d] *
                       fiber_inner(scaling, -lap).real());
    }
  }

  PohozaevReport out;
  out.r = r;
  out.boundary = pairwise_sum(bterms);
  out.volume = pairwise_sum(vterms);
  out.residual = out.boundary - out.volume;
  out.scale = std::max(pairwise_sum(bscale), std::abs(out.volume));
  return out;
}

LichnerowiczReport lichnerowicz_residual(const SpinorField& field,
                                         const RVector& center, double r,
                                         const ModelMetric& metric,
                                         int radial_nodes) {
  const int n = field.grid().n;
  require(r > 0.0, ErrorKind::domain,
          "lichnerowicz_residual: radius must be positive");

  const SphereSamples trace = sphere_trace(field, center, r);
  std::vector<double> dterms(trace.points.size());
  std::vector<double> rterms(trace.points.size());
  const CliffordRep& rep = field.rep();
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const RVector nu = (trace.points[i] - center) / r;
    const CVector dpsi = field.dirac_at(trace.points[i]);
    dterms[i] = trace.weights[i] *
                fiber_inner(rep.clifford(nu) * dpsi, trace.psi[i]).real();
    rterms[i] =
        trace.weights[i] * fiber_inner(trace.dnu[i], trace.psi[i]).real();
  }

  const SphereRule& dirs = field.sphere_rule();
  const ShellRule shells = shell_rule(n, r, radial_nodes, /*sqrt_map=*/true);
  std::vector<double> denergy, genergy, mass;
  denergy.reserve(shells.rho.size() * dirs.nodes.size());
  genergy.reserve(shells.rho.size() * dirs.nodes.size());
  mass.reserve(shells.rho.size() * dirs.nodes.size());
  for (std::size_t s = 0; s < shells.rho.size(); ++s) {
    for (std::size_t d = 0; d < dirs.nodes.size(); ++d) {
      const RVector x = center + shells.rho[s] * dirs.nodes[d];
      const double w = shells.weights[s] * dirs.weights[d];
      denergy.push_back(w * field.dirac_at(x).squaredNorm());
      genergy.push_back(w * field.gradient_at(x).squaredNorm());
      mass.push_back(w * field.value_at(x).squaredNorm());
    }
  }

  LichnerowiczReport out;
  out.r = r;
  out.dirac_energy = pairwise_sum(denergy);
  out.gradient_energy = pairwise_sum(genergy);
  out.dirac_boundary = pairwise_sum(dterms);
  out.radial_boundary = pairwise_sum(rterms);
  out.curvature_term = 0.25 * scalar_curvature(metric) * pairwise_sum(mass);
  out.residual = out.dirac_energy + out.dirac_boundary - out.gradient_energy +
                 out.radial_boundary - out.curvature_term;
  out.scale = std::max({out.dirac_energy, out.gradient_energy,
                        std::abs(out.radial_boundary), 1e-300});
  return out;
}

double boundary_dirac_pairing(const SpinorField& field, const RVector& center,
                              double r) {
  const SphereSamples trace = sphere_trace(field, center, r);
  const CliffordRep& rep = field.rep();
  std::vector<double> terms(trace.points.size());
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const RVector nu = (trace.points[i] - center) / r;
    const CVector dpsi = field.dirac_at(trace.points[i]);
    terms[i] = trace.weights[i] *
               fiber_inner(rep.clifford(nu) * dpsi, trace.psi[i]).real();
  }
  return pairwise_sum(terms);
}

void save_identity_reports(const std::vector<HardyReport>& hardy,
                           const std::vector<PohozaevReport>& pohozaev,
                           const std::vector<LichnerowiczReport>& lichnerowicz,
                           const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io,
          "save_identity_reports: cannot open " + path);
  for (const HardyReport& h : hardy) {
    nlohmann::json j;
    j["identity"] = "hardy";
    j["r"] = h.r;
    j["c_hardy"] = h.c_hardy;
    j["boundary_term"] = h.boundary_term;
    j["gradient_term"] = h.gradient_term;
    j["singular_term"] = h.singular_term;
    j["slack"] = h.slack;
    out << j.dump() << "\n";
  }
  for (const PohozaevReport& p : pohozaev) {
    nlohmann::json j;
    j["identity"] = "pohozaev";
    j["r"] = p.r;
    j["boundary"] = p.boundary;
    j["volume"] = p.volume;
    j["residual"] = p.residual;
    j["scale"] = p.scale;
    out << j.dump() << "\n";
  }
  for (const LichnerowiczReport& l : lichnerowicz) {
    nlohmann::json j;
    j["identity"] = "lichnerowicz";
    j["r"] = l.r;
    j["dirac_energy"] = l.dirac_energy;
    j["gradient_energy"] = l.gradient_energy;
    j["dirac_boundary"] = l.dirac_boundary;
    j["radial_boundary"] = l.radial_boundary;
    j["curvature_term"] = l.curvature_term;
    j["residual"] = l.residual;
    out << j.dump() << "\n";
  }
  require(out.good(), ErrorKind::io, "save_identity_reports: write failed");
}

}  // namespace spinodal
