#include "nsfde/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsfde/self_test.h"

namespace nsfde {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json meta(const ExperimentConfig& cfg) {
  return {{"version", version_string()}, {"config_hash", cfg.config_hash}, {"seed", cfg.seed}};
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw ConfigError("--out", "cannot write '" + (dir / name).string() + "'");
  return os;
}

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

ExperimentConfig load_validated(const Options& o) {
  if (o.config_path.empty()) throw ConfigError("--config", "a configuration file is required");
  ExperimentConfig cfg = load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out_dir.empty()) cfg.output_directory = o.out_dir;
  try {
    cfg.problem.validate(cfg.solver.horizon);
  } catch (const DomainError& e) {
    throw ConfigError("initial", e.what());
  }
  return cfg;
}

int simulate(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_validated(o);
  const MomentTable table = monte_carlo_moments(cfg.problem, cfg.solver, cfg.n_paths, cfg.seed, o.threads);
  const fs::path dir(cfg.output_directory);
  {
    auto os = open_output(dir, "moments.csv");
    table.write_csv(os, output_header(cfg));
  }
  {
    auto os = open_output(dir, "decay_fit.json");
    os << decay_fit_json(table, cfg) << '\n';
  }
  if (cfg.path_dump) {
    std::optional<FbmSampler> sampler;
    if (cfg.problem.has_fractional_noise()) sampler.emplace(cfg.solver.grid(), cfg.problem.hurst);
    const NoiseRealization noise =
        sample_noise(cfg.problem, cfg.solver, sampler ? &*sampler : nullptr, derive_seed(cfg.seed, 0));
    auto os = open_output(dir, "path.csv");
    solve(cfg.problem, noise, cfg.solver).write_csv(os, output_header(cfg));
  }
  out << "wrote " << (dir / "moments.csv").string() << " and " << (dir / "decay_fit.json").string() << '\n';
  return exit_code::ok;
}

int certify_cmd(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_validated(o);
  const DecayCertificate cert = certify(cfg.problem, cfg.solver.horizon, cfg.target_rate);
  const fs::path dir(cfg.output_directory);
  auto os = open_output(dir, "certificate.json");
  os << certificate_json(cert, cfg) << '\n';
  out << "theta = " << cert.theta << (cert.passes ? " (passes)" : " (fails)") << '\n';
  return exit_code::ok;
}

int gen_noise(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_validated(o);
  const auto paths = sample_fbm_paths(cfg.solver.grid(), cfg.problem.hurst, cfg.noise_paths, cfg.seed, o.threads);
  const fs::path dir(cfg.output_directory);
  auto os = open_output(dir, "ensemble.csv");
  auto header = output_header(cfg);
  header.push_back("hurst " + std::to_string(cfg.problem.hurst.value()));
  write_ensemble_csv(os, paths, header);
  out << "wrote " << paths.size() << " paths to " << (dir / "ensemble.csv").string() << '\n';
  return exit_code::ok;
}

int self_test(const Options& o, std::ostream& out) {
  std::vector<CheckResult> results = run_property_suite(o.threads);
  if (!o.config_path.empty()) {
    const ExperimentConfig cfg = load_validated(o);
    if (cfg.oracle) {
      const MomentTable table = monte_carlo_moments(cfg.problem, cfg.solver, cfg.n_paths, cfg.seed, o.threads);
      for (auto& r : run_oracle_checks(*cfg.oracle, table)) results.push_back(std::move(r));
    }
  }
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? exit_code::ok : exit_code::self_test_failed;
}

}  // namespace

std::vector<std::string> output_header(const ExperimentConfig& cfg) {
  return {std::string("nsfde ") + version_string(), "config_hash " + cfg.config_hash,
          "seed " + std::to_string(cfg.seed)};
}

std::string certificate_json(const DecayCertificate& cert, const ExperimentConfig& cfg) {
  const auto& c = cert.constants;
  const auto& b = cert.bounds;
  json j = meta(cfg);
  j["theta"] = cert.theta;
  j["passes"] = cert.passes;
  j["components"] = {{"neutral_static", cert.components.neutral_static},
                     {"neutral_convolution", cert.components.neutral_convolution},
                     {"drift", cert.components.drift},
                     {"jump", cert.components.jump}};
  j["constants"] = {{"M", b.M},       {"lambda", b.lambda}, {"lambda_choice", b.lambda_choice},
                    {"beta", c.beta}, {"M_1_minus_beta", b.M_smoothing}, {"K1", c.K1},
                    {"K2", c.K2},     {"K3", c.K3},         {"norm_inv_beta", c.norm_inv_beta},
                    {"gamma_sigma", c.gamma_sigma}};
  j["admissible_rate"] = {0.0, cert.admissible_rate_sup};
  j["predicted_rate_cap"] = cert.predicted_rate_cap ? json(*cert.predicted_rate_cap) : json(nullptr);
  j["predicted_rate_cap_note"] = "heuristic from proof structure";
  j["gamma_branch"] = cert.gamma_branch;
  return j.dump(2);
}

std::string decay_fit_json(const MomentTable& table, const ExperimentConfig& cfg) {
  json j = meta(cfg);
  j["n_paths"] = table.n_paths;
  try {
    const DecayFit fit = fit_decay_rate(table);
    j["a_hat"] = fit.a_hat;
    j["M_star_hat"] = fit.M_star_hat;
    j["r_squared"] = fit.r_squared;
    j["window"] = {fit.t_lo, fit.t_hi};
    j["n_used"] = fit.n_used;
  } catch (const InsufficientDataError& e) {
    j["a_hat"] = nullptr;
    j["fit_error"] = e.what();
  }
  return j.dump(2);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-square stability toolkit for neutral stochastic delay equations", "nsfde"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  std::uint64_t seed = 0;
  app.add_option("--config", o.config_path, "experiment JSON");
  app.add_option("--out", o.out_dir, "output directory (overrides outputs.directory)");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");
  app.add_option("--threads", o.threads, "Monte Carlo worker threads")->check(CLI::Range(1u, 1024u));
  auto* sim = app.add_subcommand("simulate", "Monte Carlo moments and decay fit");
  auto* cert = app.add_subcommand("certify", "contraction certificate");
  auto* noise = app.add_subcommand("gen-noise", "fBm ensemble on the solver grid");
  auto* test = app.add_subcommand("self-test", "property suites and preset oracles");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::config;
  }
  if (seed_opt->count() > 0) o.seed = seed;

  try {
    if (sim->parsed()) return simulate(o, out);
    if (cert->parsed()) return certify_cmd(o, out);
    if (noise->parsed()) return gen_noise(o, out);
    if (test->parsed()) return self_test(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const HypothesisError& e) {
    err << "hypothesis " << e.hypothesis() << " violated: " << e.what() << '\n';
    return exit_code::hypothesis;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_code::numerical;
  }
  return exit_code::config;
}

}  // namespace nsfde
