#include "nsfde/hilbert_spectral.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsfde {

double HilbertVector::norm_sq() const {
  CompensatedSum s;
  for (double x : c_) s.add(x * x);
  return s.value();
}

SpectralModel::SpectralModel(std::vector<double> eigenvalues) : mu_(std::move(eigenvalues)) {
  if (mu_.empty()) throw DomainError("spectral model needs at least one eigenvalue");
  for (std::size_t k = 0; k < mu_.size(); ++k) {
    if (!(mu_[k] > 0.0) || !std::isfinite(mu_[k]))
      throw DomainError("eigenvalues of -A must be positive and finite (0 in the resolvent set)");
    if (k > 0 && mu_[k] < mu_[k - 1]) throw DomainError("eigenvalues of -A must be nondecreasing");
  }
}

QCovariance::QCovariance(std::vector<double> eigenvalues) : lambda_(std::move(eigenvalues)) {
  for (double l : lambda_)
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("Q eigenvalues must be finite and nonnegative");
}

double QCovariance::trace() const {
  CompensatedSum s;
  for (double l : lambda_) s.add(l);
  return s.value();
}

namespace {
void require_dimension(const SpectralModel& model, const HilbertVector& v) {
  if (v.size() != model.dimension()) throw DomainError("vector length differs from model dimension");
}
}  // namespace

HilbertVector semigroup_apply(const SpectralModel& model, double t, const HilbertVector& v) {
  if (t < 0.0) throw DomainError("semigroup time must be nonnegative");
  require_dimension(model, v);
  HilbertVector out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::exp(-model.eigenvalue(k) * t) * v[k];
  return out;
}

HilbertVector fractional_power_apply(const SpectralModel& model, double alpha, const HilbertVector& v) {
  if (!(alpha >= -1.0 && alpha <= 1.0)) throw DomainError("fractional power exponent must lie in [-1, 1]");
  require_dimension(model, v);
  HilbertVector out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::pow(model.eigenvalue(k), alpha) * v[k];
  return out;
}

double fractional_power_norm(const SpectralModel& model, double alpha) {
  double best = 0.0;
  for (double mu : model.eigenvalues()) best = std::max(best, std::pow(mu, alpha));
  return best;
}

double smoothing_constant(const SpectralModel& model, double beta, double lambda_choice) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(lambda_choice > 0.0)) throw DomainError("lambda_choice must be positive");
  if (!(lambda_choice < model.first_eigenvalue()))
    throw DomainError("lambda_choice must be strictly below mu_1, otherwise the bound is infinite");
  const double alpha = 1.0 - beta;
  // max_t t^alpha e^{-(mu - lambda) t} is attained at t* = alpha / (mu - lambda).
  const double prefactor = std::pow(alpha / std::exp(1.0), alpha);
  double best = 0.0;
  for (double mu : model.eigenvalues())
    best = std::max(best, prefactor * std::pow(mu / (mu - lambda_choice), alpha));
  return best;
}

double QfbmIncrements::value(std::size_t mode, std::size_t node) const {
  if (mode >= per_mode.size()) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < node; ++j) acc += per_mode[mode][j];
  return acc;
}

QfbmIncrements sample_qfbm(const SpectralModel& model, const QCovariance& q, const FbmSampler& sampler,
                           std::uint64_t seed) {
  if (q.size() > model.dimension()) throw DomainError("Q has more modes than the spectral model");
  const std::size_t n = sampler.grid().n_steps();
  QfbmIncrements out{sampler.grid(), std::vector<std::vector<double>>(q.size(), std::vector<double>(n, 0.0))};
  for (std::size_t mode = 0; mode < q.size(); ++mode) {
    const double lambda = q.eigenvalue(mode);
    if (lambda == 0.0) continue;
    auto& inc = out.per_mode[mode];
    sampler.sample_increments(derive_seed(seed, mode), inc);
    const double scale = std::sqrt(lambda);
    for (double& x : inc) x *= scale;
  }
  return out;
}

QfbmIncrements sample_qfbm(const SpectralModel& model, const QCovariance& q, HurstParameter h,
                           const TimeGrid& grid, std::uint64_t seed) {
  const FbmSampler sampler(grid, h);
  return sample_qfbm(model, q, sampler, seed);
}

Lemma2Check lemma2_bound_check(const SpectralModel& model, const QCovariance& q,
                               const DiagonalSchedule& schedule, HurstParameter h,
                               const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                               unsigned threads) {
  if (n_paths < 2) throw DomainError("second-moment bound check needs at least two paths");
  if (schedule.n_cells != grid.n_steps() || schedule.n_modes != q.size() ||
      schedule.entries.size() != schedule.n_cells * schedule.n_modes)
    throw DomainError("schedule shape must be (grid cells) x (Q modes)");
  if (q.size() > model.dimension()) throw DomainError("Q has more modes than the spectral model");

  const double H = h.value();
  const double t = grid.horizon();
  CompensatedSum hs_integral;
  for (std::size_t j = 0; j < schedule.n_cells; ++j)
    for (std::size_t n = 0; n < schedule.n_modes; ++n) {
      const double d = schedule.at(j, n);
      hs_integral.add(q.eigenvalue(n) * d * d * grid.step());
    }

  Lemma2Check out;
  out.rhs = 2.0 * H * std::pow(t, 2.0 * H - 1.0) * hs_integral.value();

  const FbmSampler sampler(grid, h);
  std::vector<double> samples(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    const QfbmIncrements noise = sample_qfbm(model, q, sampler, derive_seed(seed, p));
    double norm_sq = 0.0;
    for (std::size_t n = 0; n < q.size(); ++n) {
      CompensatedSum integral;
      for (std::size_t j = 0; j < schedule.n_cells; ++j) integral.add(schedule.at(j, n) * noise.increment(n, j));
      const double v = integral.value();
      norm_sq += v * v;
    }
    samples[p] = norm_sq;
  });
  const MeanEstimate est = estimate_mean(samples);
  out.lhs = est.mean;
  out.lhs_std_err = est.std_err;
  out.holds = out.lhs <= out.rhs + 5.0 * out.lhs_std_err;
  return out;
}

}  // namespace nsfde
