#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nsfde/cli.h"

using namespace nsfde;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nsfde_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json small_config() {
  return json::parse(R"({
    "model": {"eigenvalues": [1.0, 2.0], "q_eigenvalues": [1.0, 0.5], "hurst": 0.7},
    "jumps": {"jump_intensity": 1.0, "mark_sampler": {"kind": "gaussian", "mean": 0.0, "sd": 1.0}},
    "coefficients": {"drift_gains": [0.0, 0.0], "beta": 0.5, "sigma0": 0.3, "sigma_decay": 0.5,
                     "jump_gain": 0.0, "tau": 0.5},
    "initial": {"kind": "constant", "vector": [1.0, 0.5]},
    "solver": {"step": 0.0625, "horizon": 1.0},
    "monte_carlo": {"n_paths": 64, "seed": 12}
  })");
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const json& cfg, const fs::path& dir, std::vector<std::string> extra) {
  const fs::path file = dir / "config.json";
  std::ofstream(file) << cfg.dump();
  std::vector<std::string> args = std::move(extra);
  args.insert(args.end(), {"--config", file.string(), "--out", (dir / "out").string()});
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, CertifyZeroCoefficients) {
  const fs::path dir = scratch("certify");
  const CliRun r = run(small_config(), dir, {"certify"});
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const json cert = json::parse(slurp(dir / "out" / "certificate.json"));
  EXPECT_EQ(cert["theta"].get<double>(), 0.0);
  EXPECT_TRUE(cert["passes"].get<bool>());
  for (const char* key : {"components", "constants", "predicted_rate_cap", "gamma_branch", "config_hash"})
    EXPECT_TRUE(cert.contains(key)) << key;
  EXPECT_TRUE(cert["predicted_rate_cap"].is_null());
  EXPECT_EQ(cert["gamma_branch"], "gamma<lambda");
}

TEST(Cli, CertifyReportsTargetRateCap) {
  const fs::path dir = scratch("certify_cap");
  json cfg = small_config();
  cfg["certificate"] = {{"target_rate", 0.4}};
  ASSERT_EQ(run(cfg, dir, {"certify"}).code, exit_code::ok);
  const json cert = json::parse(slurp(dir / "out" / "certificate.json"));
  EXPECT_DOUBLE_EQ(cert["predicted_rate_cap"].get<double>(), 0.4);
  EXPECT_EQ(cert["predicted_rate_cap_note"], "heuristic from proof structure");
}

TEST(Cli, HypothesisViolationExitsTwo) {
  const fs::path dir = scratch("hyp");
  json cfg = small_config();
  cfg["coefficients"]["beta"] = 1.3;
  const CliRun r = run(cfg, dir, {"certify"});
  EXPECT_EQ(r.code, exit_code::hypothesis);
  EXPECT_NE(r.err.find("H.3"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "certificate.json"));
}

TEST(Cli, ConfigErrorsExitOneNamingField) {
  const fs::path dir = scratch("config");
  json cfg = small_config();
  cfg["solver"]["stepsize"] = 0.1;
  CliRun r = run(cfg, dir, {"simulate"});
  EXPECT_EQ(r.code, exit_code::config);
  EXPECT_NE(r.err.find("solver.stepsize"), std::string::npos) << r.err;

  cfg = small_config();
  cfg["model"]["eigenvalues"] = "many";
  r = run(cfg, dir, {"certify"});
  EXPECT_EQ(r.code, exit_code::config);
  EXPECT_NE(r.err.find("model.eigenvalues"), std::string::npos) << r.err;

  cfg = small_config();
  cfg["solver"]["step"] = 0.3;
  r = run(cfg, dir, {"simulate"});
  EXPECT_EQ(r.code, exit_code::config);
  EXPECT_NE(r.err.find("solver"), std::string::npos) << r.err;

  std::ofstream(dir / "broken.json") << "{\"model\": ";
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "broken.json").string()}, out, err), exit_code::config);
  EXPECT_EQ(run_cli({"simulate", "--config", (dir / "missing.json").string()}, out, err), exit_code::config);
  EXPECT_EQ(run_cli({"simulate"}, out, err), exit_code::config);
  EXPECT_EQ(run_cli({"frobnicate"}, out, err), exit_code::config);
}

TEST(Cli, NeutralNonConvergenceExitsThree) {
  const fs::path dir = scratch("numerical");
  json cfg = small_config();
  cfg["coefficients"]["neutral_gain"] = 2.0;
  cfg["coefficients"]["delays"] = {{"r", 0.0}};
  cfg["model"]["eigenvalues"] = {1.0, 1.0};
  const CliRun r = run(cfg, dir, {"simulate"});
  EXPECT_EQ(r.code, exit_code::numerical) << r.err;
}

TEST(Cli, SimulateIsByteReproducible) {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  json cfg = small_config();
  cfg["outputs"] = {{"path_dump", true}};
  ASSERT_EQ(run(cfg, a, {"simulate"}).code, exit_code::ok);
  ASSERT_EQ(run(cfg, b, {"simulate", "--threads", "3"}).code, exit_code::ok);
  for (const char* f : {"moments.csv", "decay_fit.json", "path.csv"}) {
    const std::string x = slurp(a / "out" / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / "out" / f)) << f;
  }
}

TEST(Cli, OutputsCarryProvenance) {
  const fs::path dir = scratch("provenance");
  json cfg = small_config();
  ASSERT_EQ(run(cfg, dir, {"simulate", "--seed", "99"}).code, exit_code::ok);
  const std::string csv = slurp(dir / "out" / "moments.csv");
  const ExperimentConfig parsed = parse_config(cfg.dump());
  EXPECT_EQ(csv.rfind(std::string("# nsfde ") + version_string() + "\n# config_hash " + parsed.config_hash +
                          "\n# seed 99\nt,mean_sq,std_err,n_paths\n",
                      0),
            0u);
  EXPECT_EQ(parsed.config_hash.size(), 16u);
  const json fit = json::parse(slurp(dir / "out" / "decay_fit.json"));
  EXPECT_EQ(fit["seed"], 99);
  EXPECT_EQ(fit["config_hash"], parsed.config_hash);
  EXPECT_EQ(fit["n_paths"], 64);
}

TEST(Cli, GenNoiseWritesEnsemble) {
  const fs::path dir = scratch("noise");
  json cfg = small_config();
  cfg["monte_carlo"]["noise_paths"] = 3;
  ASSERT_EQ(run(cfg, dir, {"gen-noise"}).code, exit_code::ok);
  std::ifstream is(dir / "out" / "ensemble.csv");
  std::string line;
  std::size_t comments = 0, rows = 0;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0)
      ++comments;
    else if (line == "path_id,t,value")
      header = true;
    else
      ++rows;
  }
  EXPECT_EQ(comments, 4u);
  EXPECT_TRUE(header);
  EXPECT_EQ(rows, 3u * 17u);
}

TEST(Cli, SelfTestOnSemigroupPreset) {
  const fs::path dir = scratch("selftest");
  std::ostringstream out, err;
  const int code = run_cli({"self-test", "--config", std::string(NSFDE_SOURCE_DIR) + "/presets/semigroup_only.json",
                            "--out", dir.string()},
                           out, err);
  EXPECT_EQ(code, exit_code::ok) << out.str() << err.str();
  EXPECT_NE(out.str().find("PASS oracle m(1)"), std::string::npos) << out.str();
  EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
}

TEST(Cli, PresetsParse) {
  for (const char* name : {"semigroup_only", "frozen_drift", "fractional_ou", "jump_only"}) {
    const ExperimentConfig cfg = load_config(std::string(NSFDE_SOURCE_DIR) + "/presets/" + name + ".json");
    EXPECT_NO_THROW(cfg.problem.validate(cfg.solver.horizon)) << name;
    EXPECT_TRUE(cfg.oracle.has_value()) << name;
  }
}
