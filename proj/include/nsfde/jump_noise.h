#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nsfde/common.h"

namespace nsfde {

namespace marks {
struct Degenerate {
  double value = 0.0;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
};
/// z1 with probability p1, z2 otherwise.
struct TwoPoint {
  double z1 = 0.0;
  double p1 = 0.5;
  double z2 = 0.0;
};
}  // namespace marks

using MarkSampler = std::variant<marks::Degenerate, marks::Uniform, marks::Gaussian, marks::TwoPoint>;

/// Finite characteristic measure nu = total_intensity * (mark law) on U = R.
/// The catalog jump shape is zeta(z) = z.
struct MarkSpaceSpec {
  double total_intensity = 0.0;
  MarkSampler sampler = marks::Degenerate{0.0};

  void validate() const;
  /// \int zeta dnu.
  double first_moment_weight() const;
  /// \int zeta^2 dnu.
  double second_moment_weight() const;
  double draw(std::mt19937_64& rng) const;
};

double mark_mean(const MarkSampler& s);
double mark_second_moment(const MarkSampler& s);
std::string mark_kind(const MarkSampler& s);

struct JumpEvent {
  double time = 0.0;
  double mark = 0.0;
};

/// Atoms of the counting measure N on (0, T] x U, sorted by time.
struct JumpTrain {
  std::vector<JumpEvent> events;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return events.size(); }
};

/// Poisson(total_intensity * T) event count, uniform order statistics on (0, T],
/// i.i.d. marks.
JumpTrain sample_jump_train(const MarkSpaceSpec& spec, double horizon, std::uint64_t seed);

/// Superposition of two trains on the same horizon.
JumpTrain merge_trains(const JumpTrain& a, const JumpTrain& b);

/// sum_i w(t_i) c_i - sum_j w(t_j) rate(t_j) dt over the grid cells (left-point
/// compensator quadrature).
double compensated_sum(const JumpTrain& train, const std::function<double(double)>& weight,
                       std::span<const double> jump_coeff,
                       const std::function<double(double)>& compensator_rate, const TimeGrid& grid);

}  // namespace nsfde
