#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfde/mild_solver.h"

namespace nsfde {

/// Malformed experiment configuration; field() is the dotted JSON path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Reference value E||x(t)||^2 = mean_sq used by self-test.
struct OraclePoint {
  double t = 0.0;
  double mean_sq = 0.0;
};

struct OracleBlock {
  std::vector<OraclePoint> points;
  double n_std_err = 5.0;
  double rel_budget = 0.03;
  std::optional<double> decay_rate;  // expected a_hat
  double decay_rel_tol = 0.02;
};

struct ExperimentConfig {
  ExperimentConfig(Problem p, SolverConfig s) : problem(std::move(p)), solver(s) {}

  Problem problem;
  SolverConfig solver;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  std::size_t noise_paths = 0;  // gen-noise ensemble size, defaults to n_paths
  std::optional<double> target_rate;
  std::string output_directory = "results";
  bool path_dump = false;
  std::optional<OracleBlock> oracle;
  /// FNV-1a 64 of the canonical JSON text, as 16 hex digits.
  std::string config_hash;
};

/// Parses and schema-checks a JSON document. Throws ConfigError naming the
/// offending field. Hypotheses are not checked here.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

const char* version_string() noexcept;

}  // namespace nsfde
