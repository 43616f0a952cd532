#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "spinodal/config.hpp"
#include "spinodal/corpus.hpp"
#include "spinodal/svg.hpp"

using namespace spinodal;

namespace {

std::shared_ptr<const CliffordRep> rep_of(int n) {
  return std::make_shared<const CliffordRep>(build_clifford_rep(n));
}

GridSpec small_grid(int n, int m = 17) {
  GridSpec g;
  g.n = n;
  g.R = 1.0;
  g.points_per_axis = m;
  g.sphere_nodes = 256;
  return g;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::domain;
}

std::size_t count_occurrences(const std::string& text, const std::string& sub) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(sub); pos != std::string::npos;
       pos = text.find(sub, pos + sub.size())) {
    ++count;
  }
  return count;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

constexpr const char* kFullConfig = R"json({
  "format": "spinodal-config v1",
  "dimension": 3,
  "points_per_axis": 17,
  "radius": 1.0,
  "sphere_nodes": 256,
  "metric": "flat",
  "curvature": 0.0,
  "field_kind": "planted",
  "degree": 2,
  "amplitude": 0.05,
  "xi": [],
  "wave_sign": 1,
  "radii": [0.2, 0.3, 0.4],
  "sigma": 2.5,
  "beta": 0.5,
  "c_n": 1.0,
  "c0": 1.25,
  "refine_levels": 3,
  "output_dir": "out",
  "seed": 11,
  "emit_svg": false
})json";

}  // namespace

TEST_SUITE("support") {

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config parses a full document and hashes deterministically") {
  const RunConfig cfg = parse_config(kFullConfig);
  CHECK(cfg.dimension == 3);
  CHECK(cfg.points_per_axis == 17);
  CHECK(cfg.field_kind == "planted");
  CHECK(cfg.degree == 2);
  CHECK(cfg.amplitude == doctest::Approx(0.05));
  CHECK(cfg.radii.size() == 3);
  CHECK(cfg.seed == 11);
  CHECK(cfg.output_dir == "out");

  const RunConfig again = parse_config(kFullConfig);
  CHECK(cfg.hash() == again.hash());
  CHECK(cfg.hash().size() == 16);

  RunConfig other = cfg;
  other.seed = 12;
  CHECK(other.hash() != cfg.hash());
  CHECK(other.canonical() != cfg.canonical());

  // The hash names the computation, not the destination: redirecting the
  // output or toggling plot emission must not change it.
  RunConfig moved = cfg;
  moved.output_dir = "elsewhere";
  moved.emit_svg = !cfg.emit_svg;
  CHECK(moved.hash() == cfg.hash());
}

TEST_CASE("config defaults apply for a minimal document") {
  const RunConfig cfg = parse_config(R"({"format": "spinodal-config v1"})");
  CHECK(cfg.dimension == 3);
  CHECK(cfg.points_per_axis == 33);
  CHECK(cfg.radius == 1.0);
  CHECK(cfg.metric == "flat");
  CHECK(cfg.field_kind == "planted");
  CHECK(cfg.c0 == 1.25);
  CHECK(cfg.refine_levels == 3);
  CHECK(cfg.seed == 0);
  CHECK_FALSE(cfg.emit_svg);
}

TEST_CASE("config loading is fail-closed") {
  const auto parse_patched = [](const char* key, nlohmann::json value) {
    nlohmann::json j = nlohmann::json::parse(kFullConfig);
    j[key] = std::move(value);
    return parse_config(j.dump());
  };
  CHECK(kind_of([&] { parse_patched("surprise", 1); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("format", "spinodal-config v2"); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("dimension", 1); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("points_per_axis", 16); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("radius", 0.0); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("metric", "wavy"); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("field_kind", "mystery"); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("xi", std::vector<double>{1.0, 2.0}); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] {
          parse_patched("radii", std::vector<double>{0.5, 1.5});
        }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("wave_sign", 2); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("sigma", -1.0); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("refine_levels", 9); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("output_dir", ""); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("seed", -3); }) == ErrorKind::config);
  CHECK(kind_of([&] { parse_patched("emit_svg", 1); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("{\"format\": "); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("[1, 2]"); }) == ErrorKind::config);
  CHECK(kind_of([] {
          nlohmann::json j = nlohmann::json::parse(kFullConfig);
          j.erase("format");
          parse_config(j.dump());
        }) == ErrorKind::config);
  CHECK(kind_of([] { load_config("/tmp/spinodal_missing_config.json"); }) ==
        ErrorKind::io);
}

TEST_CASE("model metric and grid derive from the config") {
  nlohmann::json j = nlohmann::json::parse(kFullConfig);
  j["metric"] = "sphere";
  j["curvature"] = 2.5;
  const RunConfig cfg = parse_config(j.dump());
  const ModelMetric metric = cfg.model_metric();
  CHECK(metric.kind == MetricKind::sphere);
  CHECK(metric.curvature == doctest::Approx(2.5));
  CHECK(metric.n == 3);
  const GridSpec grid = cfg.grid();
  CHECK(grid.points_per_axis == 17);
  CHECK(grid.sphere_nodes == 256);
  CHECK(grid.R == 1.0);

  j["metric"] = "hyperbolic";
  j["curvature"] = 0.0;  // curved metrics fall back to unit |curvature|
  CHECK(parse_config(j.dump()).model_metric().curvature ==
        doctest::Approx(-1.0));
}

TEST_CASE("configured fields are deterministic and honor their kind") {
  auto rep = rep_of(3);
  nlohmann::json j = nlohmann::json::parse(kFullConfig);
  RVector x(3);
  x << 0.21, -0.34, 0.12;

  const RunConfig planted = parse_config(j.dump());
  const SpinorField f1 = field_from_config(planted, rep);
  const SpinorField f2 = field_from_config(planted, rep);
  CHECK(f1.kind() == FieldKind::planted);
  CHECK(f1.value_at(x) == f2.value_at(x));

  j["field_kind"] = "plane_wave";
  j["xi"] = std::vector<double>{0.5, -0.25, 1.0};
  const SpinorField wave = field_from_config(parse_config(j.dump()), rep);
  CHECK(wave.kind() == FieldKind::plane_wave);
  const auto& wd = std::get<PlaneWaveData>(wave.analytic());
  CHECK(wd.xi(0) == doctest::Approx(0.5));
  CHECK(wd.xi(2) == doctest::Approx(1.0));

  j["field_kind"] = "harmonic";
  j.erase("xi");
  CHECK(field_from_config(parse_config(j.dump()), rep).kind() ==
        FieldKind::harmonic_poly);

  j["field_kind"] = "planar";
  j["degree"] = 1;
  const SpinorField planar = field_from_config(parse_config(j.dump()), rep);
  CHECK(planar.value_at(RVector::Zero(3)).norm() == 0.0);

  j["field_kind"] = "bubble";
  j["amplitude"] = 0.5;
  const SpinorField bubble = field_from_config(parse_config(j.dump()), rep);
  CHECK(bubble.kind() == FieldKind::dirac_bubble);
  CHECK(std::get<BubbleData>(bubble.analytic()).c == doctest::Approx(0.5));

  CHECK(kind_of([&] { field_from_config(planted, rep_of(4)); }) ==
        ErrorKind::invalid_dimension);
}

TEST_CASE("stamp embeds the config hash in every artifact shape") {
  const std::string hash = "0123456789abcdef";

  const std::string csv = "/tmp/spinodal_stamp.csv";
  spit(csv, "# fmt v1\na,b\n1,2\n");
  stamp_config(csv, hash);
  const auto lines = split_lines(slurp(csv));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# fmt v1");
  CHECK(lines[1] == "# config=" + hash);
  CHECK(lines[3] == "1,2");

  const std::string jsonp = "/tmp/spinodal_stamp.json";
  spit(jsonp, "{\"x\": 1}\n");
  stamp_config(jsonp, hash);
  const nlohmann::json j = nlohmann::json::parse(slurp(jsonp));
  CHECK(j.at("config_hash").get<std::string>() == hash);
  CHECK(j.at("x").get<int>() == 1);

  const std::string jsonl = "/tmp/spinodal_stamp.jsonl";
  spit(jsonl, "{\"row\": 1}\n{\"row\": 2}\n");
  stamp_config(jsonl, hash);
  const auto jlines = split_lines(slurp(jsonl));
  REQUIRE(jlines.size() == 2);
  for (const std::string& line : jlines) {
    CHECK(nlohmann::json::parse(line).at("config_hash").get<std::string>() ==
          hash);
  }

  // Same input stamps to identical bytes.
  const std::string copy = "/tmp/spinodal_stamp_copy.csv";
  spit(copy, "# fmt v1\na,b\n1,2\n");
  stamp_config(copy, hash);
  CHECK(slurp(copy) == slurp(csv));

  CHECK(kind_of([&] { stamp_config("/tmp/spinodal_stamp_missing", hash); }) ==
        ErrorKind::io);
}

TEST_CASE("isotropic kernel vectors satisfy the symbol equation") {
  for (const int n : {2, 3, 4}) {
    const CliffordRep rep = build_clifford_rep(n);
    const CVector u = isotropic_kernel_vector(rep);
    const Matrix symbol = rep.gammas[0] + cplx(0.0, 1.0) * rep.gammas[1];
    CHECK((symbol * u).norm() <= 1.0e-12);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1.0e-12));
    CHECK(u == isotropic_kernel_vector(rep));
  }
}

TEST_CASE("planar powers are Dirac-harmonic with planar zero sets") {
  const CliffordRep rep = build_clifford_rep(3);
  const CVector u = isotropic_kernel_vector(rep);
  for (const int k : {1, 2}) {
    const HomogeneousSpinorPoly p = planar_power(rep, k);
    CHECK(p.degree() == k);
    CHECK(p.dirac_residual(rep) <= 1.0e-12);
    RVector axis(3);
    axis << 0.0, 0.0, 0.7;
    CHECK(p.eval(axis).norm() == 0.0);
    RVector x(3);
    x << 0.3, 0.4, 0.1;
    const cplx z = std::pow(cplx(0.3, 0.4), k);
    CHECK((p.eval(x) - z * u).norm() <= 1.0e-12);
  }
}

TEST_CASE("random harmonic mixes are harmonic, normalized and seed-stable") {
  const CliffordRep rep = build_clifford_rep(3);
  Rng rng_a(99);
  Rng rng_b(99);
  Rng rng_c(100);
  const HomogeneousSpinorPoly a = random_harmonic_mix(rep, 2, &rng_a);
  const HomogeneousSpinorPoly b = random_harmonic_mix(rep, 2, &rng_b);
  const HomogeneousSpinorPoly c = random_harmonic_mix(rep, 2, &rng_c);
  CHECK(a.dirac_residual(rep) <= 1.0e-12);
  CHECK(a.max_abs_coeff() == doctest::Approx(1.0).epsilon(1.0e-12));
  RVector x(3);
  x << 0.4, -0.2, 0.3;
  CHECK(a.eval(x) == b.eval(x));
  CHECK((a.eval(x) - c.eval(x)).norm() > 1.0e-6);
}

TEST_CASE("manufactured corpus carries its ground truth") {
  auto rep = rep_of(3);
  const GridSpec grid = small_grid(3);
  const auto corpus = manufactured_corpus(rep, grid, 5);
  REQUIRE(corpus.size() == 7);
  const std::vector<std::string> names = {
      "harmonic_mix_deg2", "planar_k1", "planar_k2", "plane_wave",
      "planted_k1",        "planted_k2", "bubble"};
  const std::vector<int> orders = {2, 1, 2, -1, 1, 2, -1};
  const std::vector<bool> harmonic = {true, true, true, false,
                                      false, false, false};
  RVector x(3);
  x << 0.25, 0.1, -0.3;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CAPTURE(i);
    CHECK(corpus[i].name == names[i]);
    CHECK(corpus[i].order == orders[i]);
    CHECK(corpus[i].exactly_harmonic == harmonic[i]);
    if (corpus[i].order >= 1) {
      CHECK(corpus[i].invariance >= 0);
      CHECK(corpus[i].invariance <= 1);  // n - 2
    }
    if (corpus[i].exactly_harmonic) {
      CHECK(corpus[i].field.dirac_at(x).norm() <= 1.0e-10);
    }
  }
  CHECK(corpus[1].invariance == 1);  // the planar zero set is the x3 axis
  CHECK(corpus[2].invariance == 1);
  CHECK(corpus[3].field.value_at(x).norm() == doctest::Approx(1.0));

  const auto again = manufactured_corpus(rep, grid, 5);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(corpus[i].field.value_at(x) == again[i].field.value_at(x));
  }
}

TEST_CASE("random smooth fields expose consistent closed-form derivatives") {
  auto rep = rep_of(3);
  const GridSpec grid = small_grid(3);
  const SpinorField f = random_smooth_field(rep, grid, 42);
  const SpinorField g = random_smooth_field(rep, grid, 42);
  RVector x(3);
  x << 0.3, -0.15, 0.22;
  CHECK(f.value_at(x) == g.value_at(x));
  CHECK(f.value_at(x).norm() > 0.0);

  // Central differences against the closed-form gradient and laplacian.
  const double step = 1.0e-5;
  const Matrix grad = f.gradient_at(x);
  CVector lap_fd = CVector::Zero(rep->fiber_dim);
  for (int j = 0; j < 3; ++j) {
    RVector xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    const CVector vp = f.value_at(xp);
    const CVector vm = f.value_at(xm);
    const CVector diff = (vp - vm) / (2.0 * step);
    CHECK((diff - grad.col(j)).norm() <= 1.0e-6 * (1.0 + grad.norm()));
    lap_fd += (vp - 2.0 * f.value_at(x) + vm) / (step * step);
  }
  CHECK((lap_fd - f.laplacian_at(x)).norm() <=
        1.0e-4 * (1.0 + f.laplacian_at(x).norm()));

  const SpinorField h = random_smooth_field(rep, grid, 43);
  CHECK((f.value_at(x) - h.value_at(x)).norm() > 1.0e-8);
}

TEST_CASE("svg plots are deterministic and structurally sound") {
  SvgSeries line;
  for (int i = 0; i <= 20; ++i) {
    const double t = static_cast<double>(i) / 20.0;
    line.x.push_back(t);
    line.y.push_back(t * t - 0.3);
  }
  SvgSeries dots;
  dots.points = true;
  dots.color = "#d1242f";
  for (int i = 0; i < 5; ++i) {
    dots.x.push_back(0.2 * i);
    dots.y.push_back(0.1 * i - 0.2);
  }
  const std::string pa = "/tmp/spinodal_plot_a.svg";
  const std::string pb = "/tmp/spinodal_plot_b.svg";
  write_svg_plot(pa, "unit test chart", {line, dots});
  write_svg_plot(pb, "unit test chart", {line, dots});
  const std::string body = slurp(pa);
  CHECK(body == slurp(pb));
  CHECK(count_occurrences(body, "<svg") == 1);
  CHECK(count_occurrences(body, "<polyline") == 1);
  CHECK(count_occurrences(body, "<circle") == 5);
  CHECK(count_occurrences(body, "</svg>") == 1);

  CHECK(kind_of([] { write_svg_plot("/tmp/spinodal_plot_bad.svg", "t", {}); }) ==
        ErrorKind::domain);
  SvgSeries bad;
  bad.x = {1.0, 2.0};
  bad.y = {1.0};
  CHECK(kind_of([&] {
          write_svg_plot("/tmp/spinodal_plot_bad.svg", "t", {bad});
        }) == ErrorKind::shape_mismatch);
  SvgSeries nan_series;
  nan_series.x = {0.0, 1.0};
  nan_series.y = {0.0, std::nan("")};
  CHECK(kind_of([&] {
          write_svg_plot("/tmp/spinodal_plot_bad.svg", "t", {nan_series});
        }) == ErrorKind::domain);
  CHECK(kind_of([&] {
          write_svg_plot("/tmp/spinodal_plot_bad.svg", "t", {line}, 10, 10);
        }) == ErrorKind::domain);
}

}  // TEST_SUITE
