// Command-line driver: batch pipelines over one JSON run configuration plus
// the aggregate verification suite. Exit codes: 0 success/pass, 1 verification
// failure, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinodal/acceptance.hpp"
#include "spinodal/clifford.hpp"
#include "spinodal/common.hpp"
#include "spinodal/config.hpp"
#include "spinodal/frequency.hpp"
#include "spinodal/green.hpp"
#include "spinodal/nodal.hpp"
#include "spinodal/svg.hpp"

namespace {

using namespace spinodal;

constexpr double kRepResidualTol = 1.0e-12;

int exit_code_for(const Error& e) {
  return (e.kind() == ErrorKind::config || e.kind() == ErrorKind::io) ? 2 : 1;
}

struct Pipeline {
  RunConfig cfg;
  std::string hash;
  std::shared_ptr<const CliffordRep> rep;
  SpinorField field;
};

Pipeline open_pipeline(const std::string& config_path) {
  Pipeline p;
  p.cfg = load_config(config_path);
  p.hash = p.cfg.hash();
  p.rep = std::make_shared<const CliffordRep>(build_clifford_rep(p.cfg.dimension));
  p.field = field_from_config(p.cfg, p.rep);
  std::filesystem::create_directories(p.cfg.output_dir);
  return p;
}

std::vector<double> profile_radii(const RunConfig& cfg) {
  if (!cfg.radii.empty()) return cfg.radii;
  std::vector<double> radii;
  for (int i = 0; i < 10; ++i) {
    radii.push_back(cfg.radius * (0.15 + 0.05 * static_cast<double>(i)));
  }
  return radii;
}

int cmd_rep_check(int n) {
  const CliffordRep rep = build_clifford_rep(n);
  const double residual = clifford_relation_residual(rep);
  std::printf("rep-check: n=%d fiber=%d max relation residual %.3g (tol %.1g)\n",
              rep.n, rep.fiber_dim, residual, kRepResidualTol);
  return residual <= kRepResidualTol ? 0 : 1;
}

int cmd_freq(const std::string& config_path) {
  Pipeline p = open_pipeline(config_path);
  const RVector center = RVector::Zero(p.cfg.dimension);
  FrequencyOptions options;
  options.beta = p.cfg.beta;
  options.c_n = p.cfg.c_n;
  const std::vector<double> radii = profile_radii(p.cfg);
  const FrequencyProfile profile =
      frequency_profile(p.field, center, radii, p.cfg.model_metric(), options);
  const std::string path = p.cfg.output_dir + "/frequency.csv";
  save_frequency_profile(profile, path);
  stamp_config(path, p.hash);
  if (p.cfg.emit_svg) {
    SvgSeries series;
    series.x = profile.radii;
    series.y = profile.order;
    write_svg_plot(p.cfg.output_dir + "/frequency.svg",
                   "frequency profile N(r)", {series});
  }
  std::printf("freq: wrote %s (N(%.3g) = %.6g, config %s)\n", path.c_str(),
              profile.radii.back(), profile.order.back(), p.hash.c_str());
  return 0;
}

int cmd_decompose(const std::string& config_path) {
  Pipeline p = open_pipeline(config_path);
  const RVector center = RVector::Zero(p.cfg.dimension);
  const double r =
      p.cfg.radii.empty() ? 0.5 * p.cfg.radius : p.cfg.radii.back();
  const Decomposition dec = decompose(p.field, center, p.cfg.sigma, r);
  const std::string path = p.cfg.output_dir + "/decomposition.json";
  save_decomposition(dec, path);
  stamp_config(path, p.hash);
  std::printf("decompose: wrote %s (%zu terms, tail exponent %.4g, config %s)\n",
              path.c_str(), dec.terms.size(), dec.q_exponent_fit,
              p.hash.c_str());
  return 0;
}

int cmd_nodal(const std::string& config_path) {
  Pipeline p = open_pipeline(config_path);
  StratifiedNodalSet set =
      extract_nodal(p.field, p.cfg.c0, p.cfg.refine_levels);
  const double r0 =
      p.cfg.radii.empty() ? 0.25 * p.cfg.radius : p.cfg.radii.front();
  classify_all(p.field, &set, r0);
  const std::string path = p.cfg.output_dir + "/nodal.csv";
  save_nodal_set(set, path);
  stamp_config(path, p.hash);
  if (p.cfg.emit_svg && !set.samples.empty()) {
    SvgSeries scatter;
    scatter.points = true;
    for (const NodalSample& s : set.samples) {
      scatter.x.push_back(s.x(0));
      scatter.y.push_back(p.cfg.dimension >= 2 ? s.x(1) : 0.0);
    }
    write_svg_plot(p.cfg.output_dir + "/nodal.svg",
                   "nodal samples (first two axes)", {scatter});
  }
  std::size_t z1 = 0, zge2 = 0, other = 0;
  for (const NodalLabel& label : set.labels) {
    if (label.stratum == Stratum::z1) ++z1;
    else if (label.stratum == Stratum::zge2) ++zge2;
    else ++other;
  }
  std::printf(
      "nodal: wrote %s (%zu samples: %zu Z1, %zu Zge2, %zu unclassified, "
      "config %s)\n",
      path.c_str(), set.samples.size(), z1, zge2, other, p.hash.c_str());
  return 0;
}

int cmd_covering(int n, double epsilon, double gamma, int steps,
                 const std::string& out_path) {
  const CoveringIteration it = covering_iteration(n, epsilon, gamma, steps);
  if (!out_path.empty()) {
    char params[160];
    std::snprintf(params, sizeof params,
                  "covering n=%d epsilon=%.17g gamma=%.17g steps=%d", n,
                  epsilon, gamma, steps);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(params)));
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "covering: cannot open " + out_path);
    out << "# spinodal-covering v1\n# " << kArtifactVersion << "\n# config="
        << hash << "\nm,log2_count,log2_premeasure,premeasure\n";
    char row[160];
    for (const CoveringStep& s : it.steps) {
      std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g\n", s.m,
                    s.log2_count, s.log2_premeasure, s.premeasure);
      out << row;
    }
    if (!out) fail(ErrorKind::io, "covering: write failed for " + out_path);
  }
  const CoveringStep& last = it.steps.back();
  std::printf(
      "covering: n=%d epsilon=%.3g gamma=%.3g steps=%d final premeasure %.6g "
      "(log2 %.6g)\n",
      n, epsilon, gamma, steps, last.premeasure, last.log2_premeasure);
  return 0;
}

int cmd_verify(int n, std::uint64_t seed, const std::string& out_dir) {
  AcceptanceOptions opts;
  opts.n = n;
  opts.seed = seed;
  opts.artifact_dir = out_dir;
  const auto results = run_acceptance(opts);
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.passed) ++passed;
    std::printf("[%s] criterion %2d %-34s %s\n", r.passed ? "PASS" : "FAIL",
                r.index, r.name.c_str(), r.detail.c_str());
  }
  const bool ok = all_passed(results);
  std::printf("verify: %zu/%zu criteria passed (n=%d seed=%llu)\n", passed,
              results.size(), n, static_cast<unsigned long long>(seed));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinodal: desk-scale verification toolkit for Dirac-type "
               "operators (frequency functions, kernel representations, "
               "nodal-set geometry)"};
  app.require_subcommand(1);

  int rep_n = 3;
  CLI::App* rep_check =
      app.add_subcommand("rep-check", "verify the Clifford relations");
  rep_check->add_option("--n", rep_n, "ambient dimension")
      ->required()
      ->check(CLI::Range(2, 8));

  std::string freq_config;
  CLI::App* freq = app.add_subcommand(
      "freq", "frequency profile N(r) of the configured field");
  freq->add_option("--config", freq_config, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string dec_config;
  CLI::App* dec = app.add_subcommand(
      "decompose", "Taylor terms and remainder of the configured field");
  dec->add_option("--config", dec_config, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string nodal_config;
  CLI::App* nodal = app.add_subcommand(
      "nodal", "extract and classify the zero set of the configured field");
  nodal->add_option("--config", nodal_config, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  int cov_n = 3;
  double cov_epsilon = 0.5;
  double cov_gamma = 0.1;
  int cov_steps = 40;
  std::string cov_out;
  CLI::App* covering = app.add_subcommand(
      "covering", "iterate the codimension-two covering recursion");
  covering->add_option("--n", cov_n, "ambient dimension")
      ->required()
      ->check(CLI::Range(3, 8));
  covering->add_option("--epsilon", cov_epsilon, "scale growth factor");
  covering->add_option("--gamma", cov_gamma, "dimension offset");
  covering->add_option("--steps", cov_steps, "iteration count")
      ->check(CLI::Range(1, 100000));
  covering->add_option("--out", cov_out, "CSV output path (optional)");

  bool verify_all = false;
  int verify_n = 3;
  std::uint64_t verify_seed = 7;
  std::string verify_out = "acceptance_artifacts";
  CLI::App* verify =
      app.add_subcommand("verify", "run the full verification suite");
  verify->add_flag("--all", verify_all, "run every criterion");
  verify->add_option("--n", verify_n, "primary dimension")
      ->check(CLI::Range(2, 4));
  verify->add_option("--seed", verify_seed, "seed for the stochastic choices");
  verify->add_option("--out", verify_out, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rep_check->parsed()) return cmd_rep_check(rep_n);
    if (freq->parsed()) return cmd_freq(freq_config);
    if (dec->parsed()) return cmd_decompose(dec_config);
    if (nodal->parsed()) return cmd_nodal(nodal_config);
    if (covering->parsed()) {
      return cmd_covering(cov_n, cov_epsilon, cov_gamma, cov_steps, cov_out);
    }
    if (verify->parsed()) {
      if (!verify_all) {
        std::fprintf(stderr, "verify: pass --all to run the suite\n");
        return 2;
      }
      return cmd_verify(verify_n, verify_seed, verify_out);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
