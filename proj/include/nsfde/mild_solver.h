#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsfde/coefficients.h"
#include "nsfde/common.h"
#include "nsfde/fractional_noise.h"
#include "nsfde/hilbert_spectral.h"
#include "nsfde/jump_noise.h"

namespace nsfde {

/// Deterministic initial segment phi on [-tau, 0]: either constant v or
/// e^{kappa t} v.
struct InitialDatum {
  enum class Shape { constant, exponential };

  Shape shape = Shape::constant;
  HilbertVector vector;
  double kappa = 0.0;

  static InitialDatum constant(HilbertVector v) { return {Shape::constant, std::move(v), 0.0}; }
  static InitialDatum exponential(double kappa, HilbertVector v) {
    return {Shape::exponential, std::move(v), kappa};
  }

  HilbertVector at(double t) const;
  /// E|phi|_D^2 = sup_{[-tau, 0]} ||phi(t)||^2 (exact, phi is deterministic).
  double sup_norm_sq(double tau) const;
};

enum class Scheme { stepper, picard };

struct SolverConfig {
  double step = 1e-2;
  double horizon = 1.0;
  double neutral_tol = 1e-12;
  int neutral_max_iter = 50;
  Scheme scheme = Scheme::stepper;
  int picard_max_iter = 50;
  double picard_tol = 1e-12;

  /// Throws DomainError unless step > 0 and horizon is a multiple of step.
  TimeGrid grid() const;
};

/// Everything that defines one equation instance.
struct Problem {
  SpectralModel model;
  QCovariance q;
  HurstParameter hurst;
  CoefficientSet coefficients;
  MarkSpaceSpec marks;
  InitialDatum initial;

  /// Dimension checks plus validate_hypotheses over [0, horizon].
  void validate(double horizon) const;
  bool has_fractional_noise() const;
};

/// Noise driving one path: Q-fBm increments on the solver grid plus a jump train.
struct NoiseRealization {
  QfbmIncrements fbm;
  JumpTrain jumps;
};

/// Draws the noise for one path. `sampler` may be null when the problem has no
/// fractional noise; otherwise it must live on cfg's grid.
NoiseRealization sample_noise(const Problem& problem, const SolverConfig& cfg, const FbmSampler* sampler,
                              std::uint64_t seed);

/// Cadlag solution on [-tau, T]. Nodes are the initial-segment nodes, the
/// solver grid nodes and the exact jump times, merged and sorted. Values are
/// right-continuous; left limits differ from values only at jump nodes.
struct HistoryPath {
  std::size_t dimension = 0;
  std::vector<double> times;
  std::vector<double> values;       // [node][mode]
  std::vector<double> left_limits;  // [node][mode]
  std::vector<long> event;          // jump event index at node, -1 if none
  std::vector<std::size_t> grid_nodes;  // node index of solver grid node j
  std::size_t zero_node = 0;            // node index of t = 0

  std::size_t n_nodes() const noexcept { return times.size(); }
  bool is_jump(std::size_t i) const { return event[i] >= 0; }
  HilbertVector value(std::size_t i) const;
  HilbertVector left_limit(std::size_t i) const;
  /// Largest node index with time <= s.
  std::size_t locate(double s) const;

  /// CSV `t,mode,value,is_left_limit`; at jump nodes the left limit row
  /// precedes the value row.
  void write_csv(std::ostream& os, const std::vector<std::string>& comment_lines = {}) const;
};

/// Exponential-Euler recursion of the mild formulation, node to node.
HistoryPath solve_path(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg);

/// One application of the fixed-point map Psi evaluated in anchored-at-zero
/// form, using `current` on the right-hand side. Returns a path on the same
/// node set.
HistoryPath picard_apply(const Problem& problem, const NoiseRealization& noise, const HistoryPath& current,
                         const SolverConfig& cfg);

/// max over nodes t >= 0 and modes of |a - b|, left limits included.
double sup_distance(const HistoryPath& a, const HistoryPath& b);

struct PicardRun {
  HistoryPath path;
  std::vector<double> distances;  // sup distance between successive iterates
  bool converged = false;
};

/// Iterates Psi from the constant extension x(t) = phi(0), t >= 0.
PicardRun picard_solve(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg,
                       std::optional<int> iterations = std::nullopt);

/// Solves with cfg.scheme.
HistoryPath solve(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg);

struct MomentTable {
  std::vector<double> t;
  std::vector<double> mean_sq;
  std::vector<double> std_err;
  std::size_t n_paths = 0;

  std::size_t size() const noexcept { return t.size(); }
  /// CSV `t,mean_sq,std_err,n_paths`.
  void write_csv(std::ostream& os, const std::vector<std::string>& comment_lines = {}) const;
};

/// E||x(t_j)||^2 on the solver grid from n_paths independent noise draws; path p
/// uses stream derive_seed(seed, p). Aggregation is in path order, so results do
/// not depend on `threads`.
MomentTable monte_carlo_moments(const Problem& problem, const SolverConfig& cfg, std::size_t n_paths,
                                std::uint64_t seed, unsigned threads = 1);

}  // namespace nsfde
