#pragma once

#include <string>
#include <vector>

#include "nsfde/config.h"
#include "nsfde/mild_solver.h"

namespace nsfde {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast property checks: Gamma identity, scalar and Q-Wiener second-moment bounds, fBm isometry
/// and covariance, semigroup algebra, the worked certificate value.
std::vector<CheckResult> run_property_suite(unsigned threads = 1);

/// Compares a Monte Carlo table with the oracle block of a configuration.
std::vector<CheckResult> run_oracle_checks(const OracleBlock& oracle, const MomentTable& table);

}  // namespace nsfde
