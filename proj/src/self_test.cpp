#include "nsfde/self_test.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nsfde/fractional_noise.h"
#include "nsfde/hilbert_spectral.h"
#include "nsfde/stability.h"

namespace nsfde {

namespace {

std::string fmt(const char* label, double value) {
  std::ostringstream os;
  os.precision(6);
  os << label << '=' << value;
  return os.str();
}

CheckResult gamma_grid() {
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i)
    for (double c : {0.5, 1.0, 2.0, 10.0}) worst = std::max(worst, gamma_identity_check(0.1 * i, c).rel_err);
  return {"gamma-identity", worst <= 1e-8, fmt("max_rel_err", worst)};
}

CheckResult wiener_bound() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  bool ok = true;
  double worst_ratio = 0.0;
  for (double h : {0.55, 0.7, 0.9}) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> v(grid.n_steps());
      for (double& x : v) x = n01(rng);
      const BoundCheck b = lemma1_bound_check(StepFunction::on_grid(grid, v), HurstParameter(h));
      ok = ok && b.holds;
      worst_ratio = std::max(worst_ratio, b.lhs / b.rhs);
    }
  }
  return {"wiener-moment-bound", ok, fmt("max_lhs_over_rhs", worst_ratio)};
}

CheckResult isometry() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 32);
  const HurstParameter h(0.7);
  double worst = 0.0;
  for (std::size_t i = 1; i <= grid.n_steps(); i += 5)
    for (std::size_t j = 1; j <= grid.n_steps(); j += 7) {
      const double s = grid.node(i), t = grid.node(j);
      const double ip = rkhs_scalar_product(StepFunction::indicator(grid, 0.0, s), StepFunction::indicator(grid, 0.0, t), h);
      worst = std::max(worst, std::abs(ip - fbm_covariance(s, t, h)));
    }
  return {"rkhs-isometry", worst <= 1e-12, fmt("max_abs_err", worst)};
}

CheckResult fbm_variance(unsigned threads) {
  const TimeGrid grid = TimeGrid::uniform(1.0, 32);
  const HurstParameter h(0.75);
  const auto paths = sample_fbm_paths(grid, h, 4000, 20240101, threads);
  std::vector<double> sq;
  sq.reserve(paths.size());
  for (const auto& p : paths) sq.push_back(p.values.back() * p.values.back());
  const MeanEstimate e = estimate_mean(sq);
  const bool ok = std::abs(e.mean - 1.0) <= 5.0 * e.std_err;
  return {"fbm-variance", ok, fmt("var_B1", e.mean) + " " + fmt("se", e.std_err)};
}

CheckResult q_wiener_bound(unsigned threads) {
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  const SpectralModel model({1.0, 4.0});
  const QCovariance q({1.0, 0.25});
  DiagonalSchedule psi = DiagonalSchedule::zeros(grid.n_steps(), 2);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    psi.at(j, 0) = 1.0 + grid.node(j);
    psi.at(j, 1) = std::cos(3.0 * grid.node(j));
  }
  const Lemma2Check c = lemma2_bound_check(model, q, psi, HurstParameter(0.7), grid, 2000, 77, threads);
  return {"q-wiener-moment-bound", c.holds, fmt("lhs", c.lhs) + " " + fmt("rhs", c.rhs)};
}

CheckResult semigroup_algebra() {
  const SpectralModel model({0.5, 1.0, 3.0, 10.0});
  const HilbertVector v(std::vector<double>{1.0, -2.0, 0.5, 3.0});
  double worst = 0.0;
  const auto diff = [&](const HilbertVector& a, const HilbertVector& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
      worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(b[k])));
  };
  diff(semigroup_apply(model, 0.0, v), v);
  diff(semigroup_apply(model, 0.3, semigroup_apply(model, 0.7, v)), semigroup_apply(model, 1.0, v));
  diff(fractional_power_apply(model, 0.4, fractional_power_apply(model, -0.4, v)), v);
  return {"semigroup-algebra", worst <= 1e-12, fmt("max_rel_err", worst)};
}

CheckResult worked_certificate() {
  HypothesisConstants c;
  c.K1 = c.K2 = c.K3 = 0.01;
  c.beta = 0.5;
  c.norm_inv_beta = 1.0;
  const SemigroupBounds b{1.0, 1.0, 1.0, 1.0};
  const double theta = contraction_constant(c, b).theta;
  const double expected = 0.1 + 0.04 * std::numbers::pi;
  return {"certificate-worked", std::abs(theta - expected) <= 1e-10, fmt("theta", theta)};
}

}  // namespace

std::vector<CheckResult> run_property_suite(unsigned threads) {
  return {gamma_grid(),           wiener_bound(),      isometry(),         fbm_variance(threads),
          q_wiener_bound(threads), semigroup_algebra(), worked_certificate()};
}

std::vector<CheckResult> run_oracle_checks(const OracleBlock& oracle, const MomentTable& table) {
  std::vector<CheckResult> out;
  for (const auto& p : oracle.points) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < table.size(); ++j)
      if (std::abs(table.t[j] - p.t) < std::abs(table.t[best] - p.t)) best = j;
    std::ostringstream name;
    name << "oracle m(" << p.t << ")";
    if (table.size() == 0 || std::abs(table.t[best] - p.t) > 1e-9 * std::max(1.0, p.t)) {
      out.push_back({name.str(), false, "time is not a grid node"});
      continue;
    }
    const double m = table.mean_sq[best];
    const double se = table.std_err[best];
    const double tol = oracle.n_std_err * se + oracle.rel_budget * std::abs(p.mean_sq);
    out.push_back({name.str(), std::abs(m - p.mean_sq) <= tol,
                   fmt("estimate", m) + " " + fmt("oracle", p.mean_sq) + " " + fmt("tolerance", tol)});
  }
  if (oracle.decay_rate) {
    try {
      const DecayFit fit = fit_decay_rate(table);
      const double rel = std::abs(fit.a_hat - *oracle.decay_rate) / std::abs(*oracle.decay_rate);
      out.push_back({"oracle decay rate", rel <= oracle.decay_rel_tol,
                     fmt("a_hat", fit.a_hat) + " " + fmt("expected", *oracle.decay_rate)});
    } catch (const InsufficientDataError& e) {
      out.push_back({"oracle decay rate", false, e.what()});
    }
  }
  return out;
}

}  // namespace nsfde
