#include "spinodal/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <utility>

#include "spinodal/corpus.hpp"
#include "spinodal/rng.hpp"

namespace spinodal {
namespace {

constexpr const char* kConfigFormat = "spinodal-config v1";
constexpr std::uint64_t kTagConfigField = 0x636f6e6600000006ULL;

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) {
  fail(ErrorKind::config, "config: " + what);
}

int take_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) config_fail(std::string(key) + " must be an integer");
  return v.get<int>();
}

double take_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) config_fail(std::string(key) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_fail(std::string(key) + " must be finite");
  return d;
}

std::string take_string(const json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) config_fail(std::string(key) + " must be a string");
  return v.get<std::string>();
}

bool take_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) config_fail(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::vector<double> take_double_array(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (!v.is_array()) config_fail(std::string(key) + " must be an array");
  for (const json& e : v) {
    if (!e.is_number()) config_fail(std::string(key) + " entries must be numbers");
    const double d = e.get<double>();
    if (!std::isfinite(d)) config_fail(std::string(key) + " entries must be finite");
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::canonical() const {
  // nlohmann objects iterate in sorted key order and dump() prints doubles in
  // shortest round-trip form, so equal configs serialize to equal bytes.
  // Only fields that influence computed values enter the canonical form:
  // output_dir and emit_svg choose where and whether files land, not what
  // they contain, so runs that differ only there share a hash.
  json j;
  j["format"] = kConfigFormat;
  j["dimension"] = dimension;
  j["points_per_axis"] = points_per_axis;
  j["radius"] = radius;
  j["sphere_nodes"] = sphere_nodes;
  j["metric"] = metric;
  j["curvature"] = curvature;
  j["field_kind"] = field_kind;
  j["degree"] = degree;
  j["amplitude"] = amplitude;
  j["xi"] = xi;
  j["wave_sign"] = wave_sign;
  j["radii"] = radii;
  j["sigma"] = sigma;
  j["beta"] = beta;
  j["c_n"] = c_n;
  j["c0"] = c0;
  j["refine_levels"] = refine_levels;
  j["seed"] = seed;
  return j.dump();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return std::string(buf);
}

ModelMetric RunConfig::model_metric() const {
  if (metric == "flat") return ModelMetric::flat(dimension);
  if (metric == "sphere") {
    return ModelMetric::sphere(dimension, curvature > 0.0 ? curvature : 1.0);
  }
  if (metric == "hyperbolic") {
    return ModelMetric::hyperbolic(dimension, curvature < 0.0 ? curvature : -1.0);
  }
  config_fail("unknown metric '" + metric + "'");
}

GridSpec RunConfig::grid() const {
  GridSpec g;
  g.n = dimension;
  g.R = radius;
  g.points_per_axis = points_per_axis;
  g.sphere_nodes = sphere_nodes;
  g.validate();
  return g;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_fail(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_fail("top level must be an object");

  static const std::set<std::string> known = {
      "format",    "dimension", "points_per_axis", "radius",
      "sphere_nodes", "metric", "curvature",       "field_kind",
      "degree",    "amplitude", "xi",              "wave_sign",
      "radii",     "sigma",     "beta",            "c_n",
      "c0",        "refine_levels", "output_dir",  "seed",
      "emit_svg"};
  for (const auto& item : j.items()) {
    if (known.count(item.key()) == 0) {
      config_fail("unknown key '" + item.key() + "'");
    }
  }
  if (!j.contains("format")) config_fail("missing format marker");
  if (!j.at("format").is_string() ||
      j.at("format").get<std::string>() != kConfigFormat) {
    config_fail(std::string("format must be '") + kConfigFormat + "'");
  }

  RunConfig cfg;
  cfg.dimension = take_int(j, "dimension", cfg.dimension);
  cfg.points_per_axis = take_int(j, "points_per_axis", cfg.points_per_axis);
  cfg.radius = take_double(j, "radius", cfg.radius);
  cfg.sphere_nodes = take_int(j, "sphere_nodes", cfg.sphere_nodes);
  cfg.metric = take_string(j, "metric", cfg.metric);
  cfg.curvature = take_double(j, "curvature", cfg.curvature);
  cfg.field_kind = take_string(j, "field_kind", cfg.field_kind);
  cfg.degree = take_int(j, "degree", cfg.degree);
  cfg.amplitude = take_double(j, "amplitude", cfg.amplitude);
  cfg.xi = take_double_array(j, "xi");
  cfg.wave_sign = take_int(j, "wave_sign", cfg.wave_sign);
  cfg.radii = take_double_array(j, "radii");
  cfg.sigma = take_double(j, "sigma", cfg.sigma);
  cfg.beta = take_double(j, "beta", cfg.beta);
  cfg.c_n = take_double(j, "c_n", cfg.c_n);
  cfg.c0 = take_double(j, "c0", cfg.c0);
  cfg.refine_levels = take_int(j, "refine_levels", cfg.refine_levels);
  cfg.output_dir = take_string(j, "output_dir", cfg.output_dir);
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      config_fail("seed must be an integer");
    }
    if (v.is_number_integer() && !v.is_number_unsigned() &&
        v.get<long long>() < 0) {
      config_fail("seed must be nonnegative");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.emit_svg = take_bool(j, "emit_svg", cfg.emit_svg);

  if (cfg.dimension < 2 || cfg.dimension > 8) {
    config_fail("dimension must lie in [2, 8]");
  }
  if (cfg.points_per_axis < 9 || cfg.points_per_axis % 2 == 0) {
    config_fail("points_per_axis must be odd and >= 9");
  }
  if (!(cfg.radius > 0.0)) config_fail("radius must be positive");
  if (cfg.sphere_nodes < 8) config_fail("sphere_nodes must be >= 8");
  if (cfg.metric != "flat" && cfg.metric != "sphere" &&
      cfg.metric != "hyperbolic") {
    config_fail("metric must be flat, sphere, or hyperbolic");
  }
  if (cfg.field_kind != "harmonic" && cfg.field_kind != "planar" &&
      cfg.field_kind != "plane_wave" && cfg.field_kind != "planted" &&
      cfg.field_kind != "bubble") {
    config_fail("field_kind must be one of harmonic, planar, plane_wave, "
                "planted, bubble");
  }
  if (cfg.degree < 0 || cfg.degree > 6) config_fail("degree must lie in [0, 6]");
  if (!(cfg.amplitude >= 0.0)) config_fail("amplitude must be >= 0");
  if (!cfg.xi.empty() &&
      static_cast<int>(cfg.xi.size()) != cfg.dimension) {
    config_fail("xi must have exactly 'dimension' entries");
  }
  if (cfg.wave_sign != 1 && cfg.wave_sign != -1) {
    config_fail("wave_sign must be +1 or -1");
  }
  for (const double r : cfg.radii) {
    if (!(r > 0.0 && r < cfg.radius)) {
      config_fail("radii must lie strictly inside (0, radius)");
    }
  }
  if (!(cfg.sigma > 0.0)) config_fail("sigma must be positive");
  if (!(cfg.beta > 0.0)) config_fail("beta must be positive");
  if (!(cfg.c_n >= 0.0)) config_fail("c_n must be >= 0");
  if (!(cfg.c0 > 0.0)) config_fail("c0 must be positive");
  if (cfg.refine_levels < 0 || cfg.refine_levels > 8) {
    config_fail("refine_levels must lie in [0, 8]");
  }
  if (cfg.output_dir.empty()) config_fail("output_dir must be nonempty");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SpinorField field_from_config(const RunConfig& cfg,
                              std::shared_ptr<const CliffordRep> rep) {
  require(rep != nullptr && rep->n == cfg.dimension, ErrorKind::invalid_dimension,
          "config field: representation dimension mismatch");
  const GridSpec grid = cfg.grid();
  Rng rng(cfg.seed ^ kTagConfigField);
  const RVector origin = RVector::Zero(cfg.dimension);

  if (cfg.field_kind == "harmonic") {
    require(cfg.degree >= 1, ErrorKind::config,
            "harmonic field needs degree >= 1");
    return synth_harmonic_poly(rep, grid,
                               random_harmonic_mix(*rep, cfg.degree, &rng),
                               origin);
  }
  if (cfg.field_kind == "planar") {
    require(cfg.degree >= 1, ErrorKind::config, "planar field needs degree >= 1");
    return synth_harmonic_poly(rep, grid, planar_power(*rep, cfg.degree),
                               origin);
  }
  if (cfg.field_kind == "plane_wave") {
    RVector xi;
    if (cfg.xi.empty()) {
      xi = random_unit_vector(cfg.dimension, &rng) * 1.2;
    } else {
      xi = RVector(cfg.dimension);
      for (int i = 0; i < cfg.dimension; ++i) {
        xi(i) = cfg.xi[static_cast<std::size_t>(i)];
      }
    }
    return synth_plane_wave(rep, grid, xi, cfg.wave_sign);
  }
  if (cfg.field_kind == "planted") {
    require(cfg.degree >= 1, ErrorKind::config,
            "planted field needs degree >= 1");
    const HomogeneousSpinorPoly leading =
        random_harmonic_mix(*rep, cfg.degree, &rng);
    const CVector dir = random_unit_spinor(rep->fiber_dim, &rng);
    return synth_planted(rep, grid, leading, cfg.amplitude, dir, origin);
  }
  // bubble: amplitude 0 requests the calibrated value.
  const CVector u = random_unit_spinor(rep->fiber_dim, &rng);
  return synth_dirac_bubble(rep, grid, u,
                            cfg.amplitude > 0.0 ? cfg.amplitude : -1.0);
}

void stamp_config(const std::string& path, const std::string& hash) {
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "stamp: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::string out;
  std::size_t first = 0;
  while (first < text.size() &&
         std::isspace(static_cast<unsigned char>(text[first]))) {
    ++first;
  }
  if (first < text.size() && text[first] == '{') {
    bool whole = true;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception&) {
      whole = false;  // several objects: JSON-lines artifact
    }
    if (whole) {
      j["config_hash"] = hash;
      out = j.dump(2);
      out.push_back('\n');
    } else {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        json obj;
        try {
          obj = json::parse(line);
        } catch (const json::exception& e) {
          fail(ErrorKind::io,
               std::string("stamp: invalid JSON-lines artifact: ") + e.what());
        }
        obj["config_hash"] = hash;
        out += obj.dump();
        out.push_back('\n');
      }
    }
  } else {
    const std::size_t eol = text.find('\n');
    if (eol == std::string::npos) {
      fail(ErrorKind::io, "stamp: artifact has no header line");
    }
    out = text.substr(0, eol + 1) + "# config=" + hash + "\n" +
          text.substr(eol + 1);
  }
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) fail(ErrorKind::io, "stamp: cannot rewrite " + path);
  outf << out;
  if (!outf) fail(ErrorKind::io, "stamp: write failed for " + path);
}

}  // namespace spinodal
