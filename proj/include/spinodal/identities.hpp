#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/geometry.hpp"

namespace spinodal {

/// Largest radius on which the weighted Hardy inequality is certified:
/// 0.3 R for the flat model, additionally capped by
/// sqrt((n-2) / (4 C_coord)) when the metric curves.
double hardy_radius(const GridSpec& grid, const ModelMetric& metric);

struct HardyReport {
  double r = 0.0;
  double c_hardy = 0.0;        // 2 / (n - 2)
  double boundary_term = 0.0;  // (C/r) * int_{|x-c|=r} u^2
  double gradient_term = 0.0;  // C^2 * int_B |grad u|^2
  double singular_term = 0.0;  // int_B u^2 / rho^2
  double slack = 0.0;          // boundary + gradient - singular, >= 0
};

/// Scalar Hardy slack for a nonnegative function u with pointwise gradient
/// bound grad_u:
///   int_B u^2/rho^2  <=  (C/r) int_{dB} u^2 + C^2 int_B |grad u|^2,
/// C = 2/(n-2). Dimension 2 is rejected (the constant degenerates).
HardyReport hardy_slack(int n, const std::function<double(const RVector&)>& u,
                        const std::function<double(const RVector&)>& grad_u,
                        const RVector& center, double r, int radial_nodes = 24,
                        int sphere_nodes = 512);

/// Spinor Hardy slack through the Kato reduction u = |psi|, with |grad psi|
/// (Frobenius) dominating |grad u| pointwise.
HardyReport hardy_slack(const SpinorField& field, const RVector& center,
                        double r, int radial_nodes = 24);

struct PohozaevReport {
  double r = 0.0;
  double boundary = 0.0;  // int_{dB} r|grad|^2 - 2r|d_nu|^2 - (n-2)Re<psi,d_nu psi>
  double volume = 0.0;    // int_B Re<2 (x-c).grad psi + (n-2) psi, -lap psi>
  double residual = 0.0;  // boundary - volume; 0 for smooth fields
  double scale = 0.0;     // magnitude reference for relative judgments
};

/// Rellich-type balance between the radial boundary energy and the interior
/// scaling pairing. Vanishes identically on harmonic fields and measures
/// discretization error otherwise.
PohozaevReport pohozaev_residual(const SpinorField& field,
                                 const RVector& center, double r,
                                 int radial_nodes = 24);

struct LichnerowiczReport {
  double r = 0.0;
  double dirac_energy = 0.0;     // int_B |D psi|^2
  double gradient_energy = 0.0;  // int_B |grad psi|^2
  double dirac_boundary = 0.0;   // Re int_{dB} <gamma(nu) D psi, psi>
  double radial_boundary = 0.0;  // Re int_{dB} <d_nu psi, psi>
  double curvature_term = 0.0;   // (scal/4) int_B |psi|^2
  double residual = 0.0;
  double scale = 0.0;
};

/// Integrated square-comparison of the first-order operator with the rough
/// laplacian: dirac_energy + dirac_boundary - gradient_energy +
/// radial_boundary - curvature_term. Exactly zero in the flat model.
LichnerowiczReport lichnerowicz_residual(const SpinorField& field,
                                         const RVector& center, double r,
                                         const ModelMetric& metric,
                                         int radial_nodes = 24);

/// Re int_{|x-c|=r} <gamma(nu) D psi, psi> ds: vanishes pointwise whenever
/// D psi is a real multiple of psi (eigenfields), by skew-adjointness.
double boundary_dirac_pairing(const SpinorField& field, const RVector& center,
                              double r);

/// One JSON object per line: hardy, pohozaev and lichnerowicz records in that
/// order, deterministic bytes.
void save_identity_reports(const std::vector<HardyReport>& hardy,
                           const std::vector<PohozaevReport>& pohozaev,
                           const std::vector<LichnerowiczReport>& lichnerowicz,
                           const std::string& path);

}  // namespace spinodal
