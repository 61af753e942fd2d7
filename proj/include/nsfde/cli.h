#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsfde/config.h"
#include "nsfde/stability.h"

namespace nsfde {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int hypothesis = 2;
inline constexpr int numerical = 3;
inline constexpr int self_test_failed = 4;
}  // namespace exit_code

/// Metadata lines written at the top of every CSV output.
std::vector<std::string> output_header(const ExperimentConfig& cfg);

std::string certificate_json(const DecayCertificate& cert, const ExperimentConfig& cfg);
std::string decay_fit_json(const MomentTable& table, const ExperimentConfig& cfg);

/// `nsfde <simulate|certify|gen-noise|self-test> [--config f] [--out d] [--seed s] [--threads n]`.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsfde
