#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsfde/common.h"
#include "nsfde/fractional_noise.h"

namespace nsfde {

/// Coefficients of an element of X in the eigenbasis {e_k} of -A.
class HilbertVector {
public:
  HilbertVector() = default;
  explicit HilbertVector(std::size_t n, double fill = 0.0) : c_(n, fill) {}
  explicit HilbertVector(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  std::size_t size() const noexcept { return c_.size(); }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }
  std::span<const double> coefficients() const noexcept { return c_; }
  std::span<double> coefficients() noexcept { return c_; }

  double norm_sq() const;
  double norm() const { return std::sqrt(norm_sq()); }

  bool operator==(const HilbertVector&) const = default;

private:
  std::vector<double> c_;
};

/// Diagonal generator A e_k = -mu_k e_k truncated to N modes.
class SpectralModel {
public:
  explicit SpectralModel(std::vector<double> eigenvalues);

  std::size_t dimension() const noexcept { return mu_.size(); }
  double eigenvalue(std::size_t k) const { return mu_.at(k); }
  double first_eigenvalue() const noexcept { return mu_.front(); }
  std::span<const double> eigenvalues() const noexcept { return mu_; }

private:
  std::vector<double> mu_;
};

/// Eigenvalues of the trace-class covariance Q of the Y-valued fBm.
class QCovariance {
public:
  explicit QCovariance(std::vector<double> eigenvalues);

  std::size_t size() const noexcept { return lambda_.size(); }
  double eigenvalue(std::size_t n) const { return n < lambda_.size() ? lambda_[n] : 0.0; }
  std::span<const double> eigenvalues() const noexcept { return lambda_; }
  /// Retained trace sum_n lambda_n; the truncation discards nothing beyond n_Q.
  double trace() const;
  double discarded_trace() const noexcept { return 0.0; }

private:
  std::vector<double> lambda_;
};

/// S(t) v = (e^{-mu_k t} v_k).
HilbertVector semigroup_apply(const SpectralModel& model, double t, const HilbertVector& v);

/// (-A)^alpha v = (mu_k^alpha v_k), alpha in [-1, 1].
HilbertVector fractional_power_apply(const SpectralModel& model, double alpha, const HilbertVector& v);

/// Operator norm of (-A)^alpha, max_k mu_k^alpha.
double fractional_power_norm(const SpectralModel& model, double alpha);

/// Smallest M with mu_k^{1-beta} e^{-mu_k t} <= M t^{-(1-beta)} e^{-lambda_choice t}
/// for all t > 0 and all modes; requires 0 < lambda_choice < mu_1.
double smoothing_constant(const SpectralModel& model, double beta, double lambda_choice);

/// One realization of the Q-fBm on a grid: increments of sqrt(lambda_n) beta_n^H
/// per retained mode n.
struct QfbmIncrements {
  TimeGrid grid;
  std::vector<std::vector<double>> per_mode;  // [mode][cell]

  std::size_t n_modes() const noexcept { return per_mode.size(); }
  double increment(std::size_t mode, std::size_t cell) const {
    return mode < per_mode.size() ? per_mode[mode][cell] : 0.0;
  }
  /// sqrt(lambda_n) beta_n^H(t_j).
  double value(std::size_t mode, std::size_t node) const;
};

/// Mode n draws from stream derive_seed(seed, n). Modes with lambda_n = 0 are
/// identically zero.
QfbmIncrements sample_qfbm(const SpectralModel& model, const QCovariance& q, const FbmSampler& sampler,
                           std::uint64_t seed);
QfbmIncrements sample_qfbm(const SpectralModel& model, const QCovariance& q, HurstParameter h,
                           const TimeGrid& grid, std::uint64_t seed);

/// Diagonal entries psi_n(t_j) of psi(t_j): Y -> X, one row per grid cell
/// (left node), one column per Q mode.
struct DiagonalSchedule {
  std::size_t n_cells = 0;
  std::size_t n_modes = 0;
  std::vector<double> entries;  // row-major [cell][mode]

  static DiagonalSchedule zeros(std::size_t n_cells, std::size_t n_modes) {
    return {n_cells, n_modes, std::vector<double>(n_cells * n_modes, 0.0)};
  }
  double at(std::size_t cell, std::size_t mode) const { return entries[cell * n_modes + mode]; }
  double& at(std::size_t cell, std::size_t mode) { return entries[cell * n_modes + mode]; }
};

struct Lemma2Check {
  double lhs = 0.0;       // MC estimate of E||int psi dB^H||^2
  double lhs_std_err = 0.0;
  double rhs = 0.0;       // 2H t^{2H-1} int ||psi||^2_{L_2^0}
  bool holds = false;
};

/// Checks the Q-Wiener-integral second-moment bound at t = grid horizon.
Lemma2Check lemma2_bound_check(const SpectralModel& model, const QCovariance& q,
                               const DiagonalSchedule& schedule, HurstParameter h,
                               const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                               unsigned threads = 1);

}  // namespace nsfde
