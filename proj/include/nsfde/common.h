#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsfde {

/// Invalid argument or evaluation outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (factorization breakdown, non-convergence).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
public:
  TimeGrid(double step, std::size_t n_steps);

  static TimeGrid uniform(double horizon, std::size_t n_steps);

  double step() const noexcept { return step_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
  double horizon() const noexcept { return step_ * static_cast<double>(n_steps_); }
  double node(std::size_t j) const noexcept { return step_ * static_cast<double>(j); }
  std::vector<double> nodes() const;

  bool operator==(const TimeGrid&) const = default;

private:
  double step_;
  std::size_t n_steps_;
};

/// Neumaier-compensated running sum; order of additions still matters for
/// bitwise results, so callers reduce in a fixed order.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean and standard error of the mean.
struct MeanEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

MeanEstimate estimate_mean(const std::vector<double>& samples);

/// Derives an independent 64-bit stream seed from a base seed and a tuple of
/// indices (splitmix64 chaining).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) noexcept;

/// Runs body(i) for i in [0, n) on up to `threads` worker threads using a
/// static block partition. threads <= 1 runs inline.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace nsfde
