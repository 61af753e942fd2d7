#include "nsfde/fractional_noise.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "nsfde/quadrature.h"

namespace nsfde {

HurstParameter::HurstParameter(double h) : h_(h) {
  if (!(h > 0.5 && h < 1.0)) {
    std::ostringstream msg;
    msg << "Hurst parameter must satisfy 1/2 < H < 1, got " << h;
    throw DomainError(msg.str());
  }
}

StepFunction StepFunction::on_grid(const TimeGrid& grid, std::vector<double> values) {
  if (values.size() != grid.n_steps()) throw DomainError("step function needs one value per grid cell");
  StepFunction f{grid.nodes(), std::move(values)};
  return f;
}

StepFunction StepFunction::indicator(const TimeGrid& grid, double a, double b) {
  std::vector<double> v(grid.n_steps(), 0.0);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double mid = 0.5 * (grid.node(j) + grid.node(j + 1));
    if (mid >= a && mid <= b) v[j] = 1.0;
  }
  return on_grid(grid, std::move(v));
}

StepFunction StepFunction::abs() const {
  StepFunction out = *this;
  for (double& v : out.values) v = std::abs(v);
  return out;
}

double StepFunction::l2_norm_sq() const {
  CompensatedSum s;
  for (std::size_t j = 0; j < values.size(); ++j) s.add(values[j] * values[j] * (edges[j + 1] - edges[j]));
  return s.value();
}

void StepFunction::validate() const {
  if (values.empty() || edges.size() != values.size() + 1)
    throw DomainError("step function needs n cells and n+1 edges");
  if (edges.front() != 0.0) throw DomainError("step function must start at t = 0");
  for (std::size_t j = 0; j + 1 < edges.size(); ++j)
    if (!(edges[j + 1] > edges[j])) throw DomainError("step function edges must be strictly increasing");
}

double fbm_covariance(double s, double t, HurstParameter h) {
  if (s < 0.0 || t < 0.0) throw DomainError("fBm covariance requires nonnegative times");
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double volterra_constant(HurstParameter h) {
  const double H = h.value();
  const double a = 2.0 - 2.0 * H;
  const double b = H - 0.5;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::sqrt(H * (2.0 * H - 1.0) * std::exp(-log_beta));
}

double volterra_kernel(double t, double s, HurstParameter h) {
  if (!(s > 0.0)) throw DomainError("Volterra kernel K_H(t, s) requires s > 0");
  if (t <= s) return 0.0;
  const double p = h.value() - 0.5;
  // u = s + v^{1/p} maps (u-s)^{p-1} du to dv/p, leaving a smooth integrand.
  const auto integrand = [s, p](double v) { return std::pow(s + std::pow(v, 1.0 / p), p); };
  const double upper = std::pow(t - s, p);
  const auto r = quad::gauss_kronrod(integrand, 0.0, upper, 1e-14);
  return volterra_constant(h) * std::pow(s, -p) * r.value / p;
}

std::vector<double> increment_covariance(const TimeGrid& grid, HurstParameter h) {
  const std::size_t n = grid.n_steps();
  const double two_h = 2.0 * h.value();
  const double dt = grid.step();
  // Stationary increments: C_ij depends on |i-j| only.
  std::vector<double> lag(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    lag[k] = 0.5 * std::pow(dt, two_h) *
             (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + std::pow(std::abs(kk - 1.0), two_h));
  }
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = lag[i > j ? i - j : j - i];
  return c;
}

FbmSampler::FbmSampler(const TimeGrid& grid, HurstParameter h, std::size_t max_nodes)
    : grid_(grid), hurst_(h) {
  const std::size_t n = grid.n_steps();
  if (grid.n_nodes() > max_nodes) {
    std::ostringstream msg;
    msg << "grid has " << grid.n_nodes() << " nodes, sampler cap is " << max_nodes;
    throw DomainError(msg.str());
  }
  std::vector<double> l = increment_covariance(grid, h);
  const double variance_scale = l[0];

  // In-place row-oriented Cholesky on the lower triangle of l.
  for (std::size_t i = 0; i < n; ++i) {
    double* row_i = &l[i * n];
    for (std::size_t j = 0; j <= i; ++j) {
      const double* row_j = &l[j * n];
      double s = row_i[j];
      for (std::size_t k = 0; k < j; ++k) s -= row_i[k] * row_j[k];
      if (j < i) {
        row_i[j] = s / row_j[j];
        continue;
      }
      if (s < kPivotFloor) {
        if (s < -1e-8 * variance_scale) {
          std::ostringstream msg;
          msg << "fBm increment covariance is not positive semidefinite: pivot " << i << " = " << s;
          throw NumericalError(msg.str());
        }
        s = kPivotFloor;
        ++floored_;
      }
      row_i[i] = std::sqrt(s);
    }
  }

  column_offset_.resize(n);
  factor_.resize(n * (n + 1) / 2);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < n; ++j) {
    column_offset_[j] = offset;
    for (std::size_t i = j; i < n; ++i) factor_[offset++] = l[i * n + j];
  }
}

void FbmSampler::sample_increments(std::uint64_t stream_seed, std::span<double> out) const {
  const std::size_t n = grid_.n_steps();
  if (out.size() != n) throw DomainError("increment buffer size must equal the number of grid steps");
  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double z = normal(rng);
    const double* col = &factor_[column_offset_[j]];
    double* dst = out.data() + j;
    const std::size_t len = n - j;
    for (std::size_t i = 0; i < len; ++i) dst[i] += z * col[i];
  }
}

ScalarFbmPath FbmSampler::sample_path(std::uint64_t stream_seed) const {
  ScalarFbmPath path{grid_, std::vector<double>(grid_.n_nodes(), 0.0), stream_seed};
  std::vector<double> inc(grid_.n_steps());
  sample_increments(stream_seed, inc);
  double acc = 0.0;
  for (std::size_t j = 0; j < inc.size(); ++j) {
    acc += inc[j];
    path.values[j + 1] = acc;
  }
  return path;
}

std::vector<ScalarFbmPath> sample_fbm_paths(const TimeGrid& grid, HurstParameter h,
                                            std::size_t n_paths, std::uint64_t seed,
                                            unsigned threads) {
  if (n_paths < 1) throw DomainError("n_paths must be at least 1");
  const FbmSampler sampler(grid, h);
  std::vector<ScalarFbmPath> paths(n_paths, ScalarFbmPath{grid, {}, 0});
  parallel_for(n_paths, threads, [&](std::size_t p) { paths[p] = sampler.sample_path(derive_seed(seed, p)); });
  return paths;
}

namespace {
void require_same_partition(const StepFunction& a, const StepFunction& b) {
  a.validate();
  b.validate();
  if (a.edges != b.edges) throw DomainError("step functions must share the same partition");
}
}  // namespace

double rkhs_scalar_product(const StepFunction& psi, const StepFunction& phi, HurstParameter h) {
  require_same_partition(psi, phi);
  const std::size_t n = psi.n_cells();
  const double two_h = 2.0 * h.value();
  const auto& e = psi.edges;
  // |e_i - e_j|^{2H} for every edge pair; H(2H-1)|x|^{2H-2} has second
  // antiderivative |x|^{2H}/2, so each cell pair costs four table lookups.
  std::vector<double> pw((n + 1) * (n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) pw[i * (n + 1) + j] = std::pow(std::abs(e[i] - e[j]), two_h);
  const auto P = [&](std::size_t i, std::size_t j) { return pw[i * (n + 1) + j]; };

  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    if (phi.values[i] == 0.0 && psi.values[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = psi.values[i] * phi.values[j];
      if (w == 0.0) continue;
      // cell i = [a, b), cell j = [c, d)
      const double cell = 0.5 * (P(i + 1, j) - P(i, j) - P(i + 1, j + 1) + P(i, j + 1));
      total.add(w * cell);
    }
  }
  return total.value();
}

BoundCheck lemma1_bound_check(const StepFunction& psi, HurstParameter h) {
  psi.validate();
  const StepFunction a = psi.abs();
  const double H = h.value();
  BoundCheck out;
  out.lhs = rkhs_scalar_product(a, a, h);
  out.rhs = 2.0 * H * std::pow(psi.horizon(), 2.0 * H - 1.0) * psi.l2_norm_sq();
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

double wiener_integral_scalar(const StepFunction& psi, const ScalarFbmPath& path) {
  psi.validate();
  const TimeGrid& g = path.grid;
  if (psi.n_cells() != g.n_steps()) throw DomainError("integrand and path grids differ");
  const double tol = 1e-12 * g.horizon();
  for (std::size_t j = 0; j < psi.edges.size(); ++j)
    if (std::abs(psi.edges[j] - g.node(j)) > tol) throw DomainError("integrand and path grids differ");
  CompensatedSum s;
  for (std::size_t j = 0; j < psi.n_cells(); ++j) s.add(psi.values[j] * (path.values[j + 1] - path.values[j]));
  return s.value();
}

void write_ensemble_csv(std::ostream& os, const std::vector<ScalarFbmPath>& paths,
                        const std::vector<std::string>& comment_lines) {
  for (const auto& line : comment_lines) os << "# " << line << '\n';
  os << "path_id,t,value\n";
  os << std::setprecision(17);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    for (std::size_t j = 0; j < path.values.size(); ++j)
      os << p << ',' << path.grid.node(j) << ',' << path.values[j] << '\n';
  }
}

}  // namespace nsfde
