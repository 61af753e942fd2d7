#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nsfde/common.h"

namespace nsfde {

/// Hurst index restricted to the long-memory regime 1/2 < H < 1.
class HurstParameter {
public:
  explicit HurstParameter(double h);
  double value() const noexcept { return h_; }

private:
  double h_;
};

/// Piecewise-constant function: values[j] on [edges[j], edges[j+1]).
struct StepFunction {
  std::vector<double> edges;
  std::vector<double> values;

  static StepFunction on_grid(const TimeGrid& grid, std::vector<double> values);
  /// 1 on every cell whose midpoint lies in [a, b], 0 elsewhere.
  static StepFunction indicator(const TimeGrid& grid, double a, double b);

  std::size_t n_cells() const noexcept { return values.size(); }
  double horizon() const { return edges.back(); }
  StepFunction abs() const;
  /// \int_0^T psi(s)^2 ds.
  double l2_norm_sq() const;
  void validate() const;
};

struct ScalarFbmPath {
  TimeGrid grid;
  std::vector<double> values;  // beta^H(t_j), j = 0..n
  std::uint64_t seed = 0;
};

/// R_H(s, t) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstParameter h);

/// c_H = sqrt(H(2H-1) / B(2-2H, H-1/2)).
double volterra_constant(HurstParameter h);

/// Molchan-Golosov kernel K_H(t, s); exactly zero for t <= s.
double volterra_kernel(double t, double s, HurstParameter h);

/// Exact Gaussian sampler for fBm increments on a fixed grid. The increment
/// covariance is Cholesky-factored once; paths are reproducible per stream
/// seed and independent of the batch they are drawn in.
class FbmSampler {
public:
  static constexpr double kPivotFloor = 1e-14;
  static constexpr std::size_t kDefaultMaxNodes = 4096;

  FbmSampler(const TimeGrid& grid, HurstParameter h, std::size_t max_nodes = kDefaultMaxNodes);

  const TimeGrid& grid() const noexcept { return grid_; }
  HurstParameter hurst() const noexcept { return hurst_; }
  /// Number of pivots that were raised to the floor during factorization.
  std::size_t floored_pivots() const noexcept { return floored_; }

  /// Writes grid.n_steps() increments for the given stream seed into out.
  void sample_increments(std::uint64_t stream_seed, std::span<double> out) const;
  ScalarFbmPath sample_path(std::uint64_t stream_seed) const;

private:
  TimeGrid grid_;
  HurstParameter hurst_;
  std::size_t floored_ = 0;
  // Lower factor stored column by column, column j holding rows j..n-1.
  std::vector<double> factor_;
  std::vector<std::size_t> column_offset_;
};

/// Increment covariance C_ij = Cov(beta^H(t_{i+1}) - beta^H(t_i), beta^H(t_{j+1}) - beta^H(t_j)),
/// row-major n x n.
std::vector<double> increment_covariance(const TimeGrid& grid, HurstParameter h);

/// n_paths exact fBm paths; path p uses stream derive_seed(seed, p).
std::vector<ScalarFbmPath> sample_fbm_paths(const TimeGrid& grid, HurstParameter h,
                                            std::size_t n_paths, std::uint64_t seed,
                                            unsigned threads = 1);

/// H(2H-1) \int\int psi(s) phi(t) |t-s|^{2H-2} ds dt for step functions on a
/// common partition, integrated exactly cell pair by cell pair.
double rkhs_scalar_product(const StepFunction& psi, const StepFunction& phi, HurstParameter h);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||psi||^2_{|H|} <= 2H T^{2H-1} \int psi^2.
BoundCheck lemma1_bound_check(const StepFunction& psi, HurstParameter h);

/// Left-point Riemann-Stieltjes sum sum_j psi(t_j) (beta(t_{j+1}) - beta(t_j)).
double wiener_integral_scalar(const StepFunction& psi, const ScalarFbmPath& path);

/// CSV `path_id,t,value`, times with 17 significant digits. Lines in
/// `comment_lines` are emitted first, each prefixed with "# ".
void write_ensemble_csv(std::ostream& os, const std::vector<ScalarFbmPath>& paths,
                        const std::vector<std::string>& comment_lines = {});

}  // namespace nsfde
