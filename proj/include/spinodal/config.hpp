#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spinodal/fields.hpp"
#include "spinodal/geometry.hpp"

namespace spinodal {

/// One run description, mirrored from a `spinodal-config v1` JSON document.
/// Loading is fail-closed: unknown keys, a missing or wrong format marker,
/// and out-of-range numbers are all rejected, so a config that loads today
/// reproduces the same run tomorrow.
struct RunConfig {
  int dimension = 3;
  int points_per_axis = 33;
  double radius = 1.0;
  int sphere_nodes = 512;

  std::string metric = "flat";  // flat | sphere | hyperbolic
  double curvature = 0.0;

  std::string field_kind = "planted";  // harmonic | planar | plane_wave |
                                       // planted | bubble
  int degree = 2;
  double amplitude = 0.05;
  std::vector<double> xi;  // plane-wave vector; empty = seeded default
  int wave_sign = 1;

  std::vector<double> radii;  // profile radii; empty = seeded default span
  double sigma = 2.5;         // decomposition threshold
  double beta = 0.5;          // almost-monotonicity exponent
  double c_n = 1.0;           // almost-monotonicity shift
  double c0 = 1.25;           // nodal detection constant
  int refine_levels = 3;

  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool emit_svg = false;

  /// Canonical serialization (sorted keys, fixed float format) of every
  /// field that affects computed values; output_dir and emit_svg are
  /// excluded, so runs that differ only in destination serialize equally.
  std::string canonical() const;
  /// FNV-1a 64-bit hash of the canonical form, as 16 hex digits. Artifacts
  /// produced by runs with equal hashes are byte-identical.
  std::string hash() const;

  ModelMetric model_metric() const;
  GridSpec grid() const;
};

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(const std::string& bytes);

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Builds the field described by the config (kinds as in RunConfig): seeded
/// choices (wave vector, planted direction, basis mix) come from the config
/// seed, so equal configs give bit-identical fields.
SpinorField field_from_config(const RunConfig& cfg,
                              std::shared_ptr<const CliffordRep> rep);

/// Stamps an emitted artifact with the config hash: JSON objects gain a
/// "config_hash" member, line-oriented text (CSV, JSONL) gains a
/// "# config=<hash>" comment after the format line. Deterministic rewrite.
void stamp_config(const std::string& path, const std::string& hash);

}  // namespace spinodal
