#include "nsfde/mild_solver.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nsfde {

HilbertVector InitialDatum::at(double t) const {
  if (shape == Shape::constant) return vector;
  HilbertVector out(vector.size());
  const double w = std::exp(kappa * t);
  for (std::size_t k = 0; k < vector.size(); ++k) out[k] = w * vector[k];
  return out;
}

double InitialDatum::sup_norm_sq(double tau) const {
  const double v = vector.norm_sq();
  if (shape == Shape::constant) return v;
  // e^{2 kappa t} on [-tau, 0] peaks at t = 0 for kappa >= 0, at t = -tau otherwise.
  return kappa >= 0.0 ? v : v * std::exp(-2.0 * kappa * tau);
}

TimeGrid SolverConfig::grid() const {
  if (!(step > 0.0) || !(horizon > 0.0)) throw DomainError("solver step and horizon must be positive");
  const double ratio = horizon / step;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw DomainError("solver horizon must be a multiple of the step");
  return TimeGrid(step, static_cast<std::size_t>(n));
}

void Problem::validate(double horizon) const {
  const std::size_t n = model.dimension();
  if (initial.vector.size() != n) throw DomainError("initial datum must have one coefficient per eigenmode");
  if (!(coefficients.delays.tau > 0.0)) throw DomainError("maximal delay tau must be positive");
  validate_hypotheses(model, q, coefficients, marks, horizon);
}

bool Problem::has_fractional_noise() const {
  if (coefficients.sigma0 == 0.0) return false;
  for (double l : q.eigenvalues())
    if (l > 0.0) return true;
  return false;
}

NoiseRealization sample_noise(const Problem& problem, const SolverConfig& cfg, const FbmSampler* sampler,
                              std::uint64_t seed) {
  const TimeGrid grid = cfg.grid();
  NoiseRealization noise{QfbmIncrements{grid, {}}, JumpTrain{{}, grid.horizon(), 0}};
  if (problem.has_fractional_noise()) {
    if (sampler == nullptr) throw DomainError("problem has fractional noise but no sampler was supplied");
    if (!(sampler->grid() == grid)) throw DomainError("fBm sampler grid differs from the solver grid");
    noise.fbm = sample_qfbm(problem.model, problem.q, *sampler, derive_seed(seed, 1));
  }
  noise.jumps = sample_jump_train(problem.marks, grid.horizon(), derive_seed(seed, 2));
  return noise;
}

HilbertVector HistoryPath::value(std::size_t i) const {
  return HilbertVector(std::vector<double>(values.begin() + i * dimension, values.begin() + (i + 1) * dimension));
}

HilbertVector HistoryPath::left_limit(std::size_t i) const {
  return HilbertVector(
      std::vector<double>(left_limits.begin() + i * dimension, left_limits.begin() + (i + 1) * dimension));
}

std::size_t HistoryPath::locate(double s) const {
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  if (it == times.begin()) throw DomainError("path lookup before the first node");
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

void HistoryPath::write_csv(std::ostream& os, const std::vector<std::string>& comment_lines) const {
  for (const auto& line : comment_lines) os << "# " << line << '\n';
  os << "t,mode,value,is_left_limit\n" << std::setprecision(17);
  for (std::size_t i = 0; i < n_nodes(); ++i)
    for (std::size_t k = 0; k < dimension; ++k) {
      if (is_jump(i)) os << times[i] << ',' << k << ',' << left_limits[i * dimension + k] << ",1\n";
      os << times[i] << ',' << k << ',' << values[i * dimension + k] << ",0\n";
    }
}

namespace {

/// Node layout shared by the stepper and the fixed-point map.
HistoryPath make_skeleton(const Problem& problem, const TimeGrid& grid, const JumpTrain& jumps) {
  const std::size_t dim = problem.model.dimension();
  const double tau = problem.coefficients.delays.tau;
  const double dt = grid.step();
  HistoryPath p;
  p.dimension = dim;

  p.times.push_back(-tau);
  const auto m = static_cast<long>(std::ceil(tau / dt - 1e-9));
  for (long k = -m + 1; k < 0; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t > -tau) p.times.push_back(t);
  }
  p.times.push_back(0.0);
  p.zero_node = p.times.size() - 1;
  p.event.assign(p.times.size(), -1);

  p.grid_nodes.resize(grid.n_nodes());
  p.grid_nodes[0] = p.zero_node;
  std::size_t e = 0;
  const auto& ev = jumps.events;
  for (std::size_t j = 1; j <= grid.n_steps(); ++j) {
    const double t = grid.node(j);
    while (e < ev.size() && ev[e].time < t) {
      if (ev[e].time > 0.0) {
        p.times.push_back(ev[e].time);
        p.event.push_back(static_cast<long>(e));
      }
      ++e;
    }
    p.times.push_back(t);
    p.event.push_back(-1);
    if (e < ev.size() && ev[e].time == t) p.event.back() = static_cast<long>(e++);
    p.grid_nodes[j] = p.times.size() - 1;
  }
  p.values.assign(p.times.size() * dim, 0.0);
  p.left_limits.assign(p.times.size() * dim, 0.0);
  for (std::size_t i = 0; i <= p.zero_node; ++i) {
    const HilbertVector phi = problem.initial.at(p.times[i]);
    std::copy(phi.coefficients().begin(), phi.coefficients().end(), p.values.begin() + i * dim);
    std::copy(phi.coefficients().begin(), phi.coefficients().end(), p.left_limits.begin() + i * dim);
  }
  return p;
}

/// Delayed-state lookups with piecewise-constant, right-continuous
/// interpolation between nodes; times <= 0 read the initial datum exactly.
class PathLookup {
public:
  PathLookup(const HistoryPath& path, const InitialDatum& initial, double tau)
      : path_(path), initial_(initial), tau_(tau) {}

  HilbertVector value_at(double s) const {
    if (s <= 0.0) return initial_.at(clamp_history(s));
    return path_.value(path_.locate(s));
  }

  HilbertVector left_limit_at(double s) const {
    if (s <= 0.0) return initial_.at(clamp_history(s));
    const std::size_t i = path_.locate(s);
    return path_.times[i] == s ? path_.left_limit(i) : path_.value(i);
  }

private:
  double clamp_history(double s) const {
    if (s < -tau_ * (1.0 + 1e-12) - 1e-300) {
      std::ostringstream msg;
      msg << "delay lookup at t = " << s << " lies before -tau = " << -tau_;
      throw DomainError(msg.str());
    }
    return std::max(s, -tau_);
  }

  const HistoryPath& path_;
  const InitialDatum& initial_;
  double tau_;
};

struct ModeWeights {
  double decay;  // e^{-mu delta}
  double phi1;   // (1 - e^{-mu delta}) / mu
};

inline ModeWeights weights(double mu, double delta) {
  const double one_minus = -std::expm1(-mu * delta);
  return {1.0 - one_minus, one_minus / mu};
}

void check_noise_grid(const NoiseRealization& noise, const TimeGrid& grid) {
  if (noise.fbm.n_modes() > 0 && !(noise.fbm.grid == grid))
    throw DomainError("noise realization was generated on a different grid");
  for (const auto& m : noise.fbm.per_mode)
    if (m.size() != grid.n_steps()) throw DomainError("noise realization has the wrong number of cells");
}

/// Per-node explicit terms shared by both solution routes: neutral value g,
/// drift f and jump compensator rate, all evaluated at node time u.
struct NodeTerms {
  HilbertVector g;
  HilbertVector f;
  HilbertVector comp;
};

NodeTerms node_terms(const Problem& problem, const PathLookup& look, double u) {
  const auto& c = problem.coefficients;
  const auto& d = c.delays;
  NodeTerms out;
  out.g = c.neutral(problem.model, u, look.value_at(u - evaluate_delay(d, DelayRole::r, u)));
  out.f = c.drift(u, look.value_at(u - evaluate_delay(d, DelayRole::rho, u)));
  const double mean_rate = c.jump_gain * problem.marks.first_moment_weight();
  out.comp = HilbertVector(problem.model.dimension());
  if (mean_rate != 0.0) {
    const HilbertVector xs = look.value_at(u - evaluate_delay(d, DelayRole::theta, u));
    for (std::size_t k = 0; k < xs.size(); ++k) out.comp[k] = mean_rate * xs[k];
  }
  return out;
}

/// Grid cell whose right end is node `i`, or -1.
std::vector<long> cell_ending_at(const HistoryPath& p) {
  std::vector<long> out(p.n_nodes(), -1);
  for (std::size_t j = 1; j < p.grid_nodes.size(); ++j) out[p.grid_nodes[j]] = static_cast<long>(j - 1);
  return out;
}

}  // namespace

HistoryPath solve_path(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg) {
  const TimeGrid grid = cfg.grid();
  check_noise_grid(noise, grid);
  const auto& model = problem.model;
  const auto& coeffs = problem.coefficients;
  const auto& delays = coeffs.delays;
  const std::size_t dim = model.dimension();

  HistoryPath path = make_skeleton(problem, grid, noise.jumps);
  const PathLookup look(path, problem.initial, delays.tau);
  const std::vector<long> cell_end = cell_ending_at(path);
  const double dt = grid.step();

  std::vector<double> grid_decay(dim);
  for (std::size_t k = 0; k < dim; ++k) grid_decay[k] = std::exp(-model.eigenvalue(k) * dt);

  // x = Y - g(u, x(u - r(u))). Explicit unless the delayed time is the node
  // itself (r(u) = 0), in which case it is solved by fixed-point iteration.
  const auto resolve_neutral = [&](const HilbertVector& y, std::size_t node, bool left) -> HilbertVector {
    const double u = path.times[node];
    const double s = u - evaluate_delay(delays, DelayRole::r, u);
    HilbertVector x(dim);
    if (s < u) {
      const HilbertVector arg = left ? look.left_limit_at(s) : look.value_at(s);
      const HilbertVector g = coeffs.neutral(model, u, arg);
      for (std::size_t k = 0; k < dim; ++k) x[k] = y[k] - g[k];
      return x;
    }
    x = y;
    for (int it = 0; it < cfg.neutral_max_iter; ++it) {
      const HilbertVector g = coeffs.neutral(model, u, x);
      double change = 0.0;
      double scale = 1.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double next = y[k] - g[k];
        change = std::max(change, std::abs(next - x[k]));
        scale = std::max(scale, std::abs(next));
        x[k] = next;
      }
      if (change <= cfg.neutral_tol * scale) return x;
    }
    std::ostringstream msg;
    msg << "neutral fixed-point iteration did not converge at t = " << u << " (node " << node << ")";
    throw SolverError(msg.str());
  };

  for (std::size_t i = path.zero_node; i + 1 < path.n_nodes(); ++i) {
    const double u = path.times[i];
    const double delta = path.times[i + 1] - u;
    const NodeTerms terms = node_terms(problem, look, u);

    HilbertVector y(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const double mu = model.eigenvalue(k);
      const ModeWeights w = weights(mu, delta);
      const double x = path.values[i * dim + k];
      const double g = terms.g[k];
      // transport of x + g, the -\int A S g ds term, then drift and compensator
      y[k] = w.decay * (x + g) + g * (1.0 - w.decay) + (terms.f[k] - terms.comp[k]) * w.phi1;
    }
    if (const long cell = cell_end[i + 1]; cell >= 0) {
      const double t_left = grid.node(static_cast<std::size_t>(cell));
      for (std::size_t k = 0; k < dim; ++k)
        y[k] += grid_decay[k] * coeffs.diffusion(t_left, k) * noise.fbm.increment(k, static_cast<std::size_t>(cell));
    }

    const std::size_t next = i + 1;
    if (path.is_jump(next)) {
      const HilbertVector before = resolve_neutral(y, next, true);
      std::copy(before.coefficients().begin(), before.coefficients().end(), path.left_limits.begin() + next * dim);
      const JumpEvent& ev = noise.jumps.events[static_cast<std::size_t>(path.event[next])];
      const double s = ev.time - evaluate_delay(delays, DelayRole::theta, ev.time);
      const HilbertVector h = coeffs.jump(ev.time, look.left_limit_at(s), ev.mark);
      for (std::size_t k = 0; k < dim; ++k) y[k] += h[k];
    }
    const HilbertVector x = resolve_neutral(y, next, false);
    std::copy(x.coefficients().begin(), x.coefficients().end(), path.values.begin() + next * dim);
    if (!path.is_jump(next))
      std::copy(x.coefficients().begin(), x.coefficients().end(), path.left_limits.begin() + next * dim);
  }
  return path;
}

HistoryPath picard_apply(const Problem& problem, const NoiseRealization& noise, const HistoryPath& current,
                         const SolverConfig& cfg) {
  const TimeGrid grid = cfg.grid();
  check_noise_grid(noise, grid);
  const auto& model = problem.model;
  const auto& coeffs = problem.coefficients;
  const auto& delays = coeffs.delays;
  const std::size_t dim = model.dimension();
  if (current.dimension != dim || current.grid_nodes.size() != grid.n_nodes())
    throw DomainError("current path does not match the problem and grid");

  HistoryPath out = make_skeleton(problem, grid, noise.jumps);
  if (out.times != current.times) throw DomainError("current path node set differs from the noise realization");
  const PathLookup look(current, problem.initial, delays.tau);
  const std::size_t z = out.zero_node;
  const std::size_t n_nodes = out.n_nodes();
  const double dt = grid.step();

  // Explicit terms at every node t >= 0, all read from `current`.
  std::vector<NodeTerms> terms;
  terms.reserve(n_nodes - z);
  for (std::size_t i = z; i < n_nodes; ++i) terms.push_back(node_terms(problem, look, out.times[i]));

  std::vector<HilbertVector> jumps(n_nodes);
  std::vector<HilbertVector> g_left(n_nodes);
  for (std::size_t i = z + 1; i < n_nodes; ++i) {
    if (!out.is_jump(i)) continue;
    const JumpEvent& ev = noise.jumps.events[static_cast<std::size_t>(out.event[i])];
    const double s = ev.time - evaluate_delay(delays, DelayRole::theta, ev.time);
    jumps[i] = coeffs.jump(ev.time, look.left_limit_at(s), ev.mark);
    const double u = out.times[i];
    g_left[i] = coeffs.neutral(model, u, look.left_limit_at(u - evaluate_delay(delays, DelayRole::r, u)));
  }

  const HilbertVector phi0 = problem.initial.at(0.0);
  const HilbertVector& g0 = terms[0].g;

  for (std::size_t q = z + 1; q < n_nodes; ++q) {
    const double t = out.times[q];
    for (std::size_t k = 0; k < dim; ++k) {
      const double mu = model.eigenvalue(k);
      CompensatedSum acc;
      acc.add(std::exp(-mu * t) * (phi0[k] + g0[k]));
      for (std::size_t i = z; i < q; ++i) {
        const NodeTerms& nt = terms[i - z];
        const double delta = out.times[i + 1] - out.times[i];
        const double transport = std::exp(-mu * (t - out.times[i + 1]));
        const double one_minus = -std::expm1(-mu * delta);
        acc.add(transport * one_minus * (nt.g[k] + (nt.f[k] - nt.comp[k]) / mu));
      }
      for (std::size_t j = 0; j < grid.n_steps() && grid.node(j + 1) <= t; ++j)
        acc.add(std::exp(-mu * (t - grid.node(j + 1))) * std::exp(-mu * dt) * coeffs.diffusion(grid.node(j), k) *
                noise.fbm.increment(k, j));
      CompensatedSum before_jump_here = acc;
      for (std::size_t i = z + 1; i <= q; ++i) {
        if (!out.is_jump(i)) continue;
        const double contrib = std::exp(-mu * (t - out.times[i])) * jumps[i][k];
        acc.add(contrib);
        if (i < q) before_jump_here.add(contrib);
      }
      out.values[q * dim + k] = acc.value() - terms[q - z].g[k];
      out.left_limits[q * dim + k] =
          out.is_jump(q) ? before_jump_here.value() - g_left[q][k] : out.values[q * dim + k];
    }
  }
  return out;
}

double sup_distance(const HistoryPath& a, const HistoryPath& b) {
  if (a.times != b.times || a.dimension != b.dimension) throw DomainError("paths live on different node sets");
  double d = 0.0;
  for (std::size_t i = a.zero_node * a.dimension; i < a.values.size(); ++i) {
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
    d = std::max(d, std::abs(a.left_limits[i] - b.left_limits[i]));
  }
  return d;
}

PicardRun picard_solve(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg,
                       std::optional<int> iterations) {
  const TimeGrid grid = cfg.grid();
  PicardRun run;
  run.path = make_skeleton(problem, grid, noise.jumps);
  const std::size_t dim = problem.model.dimension();
  const HilbertVector phi0 = problem.initial.at(0.0);
  for (std::size_t i = run.path.zero_node + 1; i < run.path.n_nodes(); ++i)
    for (std::size_t k = 0; k < dim; ++k) {
      run.path.values[i * dim + k] = phi0[k];
      run.path.left_limits[i * dim + k] = phi0[k];
    }
  const int max_iter = iterations.value_or(cfg.picard_max_iter);
  for (int it = 0; it < max_iter; ++it) {
    HistoryPath next = picard_apply(problem, noise, run.path, cfg);
    const double d = sup_distance(next, run.path);
    run.distances.push_back(d);
    run.path = std::move(next);
    if (!iterations && d <= cfg.picard_tol) {
      run.converged = true;
      break;
    }
  }
  if (iterations) run.converged = !run.distances.empty() && run.distances.back() <= cfg.picard_tol;
  return run;
}

HistoryPath solve(const Problem& problem, const NoiseRealization& noise, const SolverConfig& cfg) {
  if (cfg.scheme == Scheme::stepper) return solve_path(problem, noise, cfg);
  PicardRun run = picard_solve(problem, noise, cfg);
  if (!run.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach tolerance " << cfg.picard_tol << " in " << cfg.picard_max_iter
        << " iterations";
    throw SolverError(msg.str());
  }
  return std::move(run.path);
}

void MomentTable::write_csv(std::ostream& os, const std::vector<std::string>& comment_lines) const {
  for (const auto& line : comment_lines) os << "# " << line << '\n';
  os << "t,mean_sq,std_err,n_paths\n" << std::setprecision(17);
  for (std::size_t j = 0; j < t.size(); ++j)
    os << t[j] << ',' << mean_sq[j] << ',' << std_err[j] << ',' << n_paths << '\n';
}

MomentTable monte_carlo_moments(const Problem& problem, const SolverConfig& cfg, std::size_t n_paths,
                                std::uint64_t seed, unsigned threads) {
  if (n_paths < 2) throw DomainError("Monte Carlo needs at least two paths");
  const TimeGrid grid = cfg.grid();
  std::optional<FbmSampler> sampler;
  if (problem.has_fractional_noise()) sampler.emplace(grid, problem.hurst);
  const FbmSampler* sampler_ptr = sampler ? &*sampler : nullptr;

  const std::size_t n_nodes = grid.n_nodes();
  constexpr std::size_t kBlock = 256;
  std::vector<double> block(kBlock * n_nodes);
  // Shifted sums (shift = first path's value) keep the variance exact for
  // deterministic problems.
  std::vector<double> shift(n_nodes, 0.0);
  std::vector<CompensatedSum> sum(n_nodes), sum_sq(n_nodes);

  for (std::size_t start = 0; start < n_paths; start += kBlock) {
    const std::size_t count = std::min(kBlock, n_paths - start);
    parallel_for(count, threads, [&](std::size_t b) {
      const std::size_t p = start + b;
      const NoiseRealization noise = sample_noise(problem, cfg, sampler_ptr, derive_seed(seed, p));
      const HistoryPath path = solve(problem, noise, cfg);
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const std::size_t node = path.grid_nodes[j];
        double s = 0.0;
        for (std::size_t k = 0; k < path.dimension; ++k) {
          const double v = path.values[node * path.dimension + k];
          s += v * v;
        }
        block[b * n_nodes + j] = s;
      }
    });
    if (start == 0)
      for (std::size_t j = 0; j < n_nodes; ++j) shift[j] = block[j];
    for (std::size_t b = 0; b < count; ++b)
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const double d = block[b * n_nodes + j] - shift[j];
        sum[j].add(d);
        sum_sq[j].add(d * d);
      }
  }

  MomentTable table;
  table.n_paths = n_paths;
  const double n = static_cast<double>(n_paths);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    const double s1 = sum[j].value();
    const double s2 = sum_sq[j].value();
    const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
    table.t.push_back(grid.node(j));
    table.mean_sq.push_back(shift[j] + s1 / n);
    table.std_err.push_back(std::sqrt(var / n));
  }
  return table;
}

}  // namespace nsfde
