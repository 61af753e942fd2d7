#include "nsfde/coefficients.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsfde/quadrature.h"

namespace nsfde {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }
}  // namespace

double neutral_gain_at(const NeutralGain& gain, double t) {
  return std::visit(overloaded{[](const gains::Constant& g) { return g.value; },
                               [t](const gains::Affine& g) { return g.c0 + g.c1 * t; },
                               [t](const gains::Step& g) { return t < g.at ? g.before : g.after; }},
                    gain);
}

double neutral_gain_sup(const NeutralGain& gain, double horizon) {
  return std::visit(
      overloaded{[](const gains::Constant& g) { return std::abs(g.value); },
                 [horizon](const gains::Affine& g) {
                   return std::max(std::abs(g.c0), std::abs(g.c0 + g.c1 * horizon));
                 },
                 [horizon](const gains::Step& g) {
                   return g.at > horizon ? std::abs(g.before)
                                         : (g.at <= 0.0 ? std::abs(g.after)
                                                        : std::max(std::abs(g.before), std::abs(g.after)));
                 }},
      gain);
}

bool neutral_gain_is_constant(const NeutralGain& gain) {
  return std::visit(overloaded{[](const gains::Constant&) { return true; },
                               [](const gains::Affine& g) { return g.c1 == 0.0; },
                               [](const gains::Step& g) { return g.before == g.after; }},
                    gain);
}

const Delay& DelaySet::get(DelayRole role) const {
  switch (role) {
    case DelayRole::r:
      return r;
    case DelayRole::rho:
      return rho;
    case DelayRole::theta:
      return theta;
  }
  return r;
}

double evaluate_delay(const DelaySet& delays, DelayRole role, double t) {
  const Delay& d = delays.get(role);
  const double raw = d.is_constant() ? d.d0 : d.d0 + d.d1 * std::sin(d.omega * t);
  return std::clamp(raw, 0.0, delays.tau);
}

HilbertVector CoefficientSet::drift(double /*t*/, const HilbertVector& x) const {
  HilbertVector out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (k < drift_gains.size() ? drift_gains[k] : 0.0) * x[k];
  return out;
}

HilbertVector CoefficientSet::neutral(const SpectralModel& model, double t, const HilbertVector& x) const {
  const double c = neutral_gain_at(neutral_gain, t);
  HilbertVector out(x.size());
  if (c == 0.0) return out;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = c * std::pow(model.eigenvalue(k), -beta) * x[k];
  return out;
}

double CoefficientSet::diffusion(double t, std::size_t mode) const {
  if (sigma0 == 0.0) return 0.0;
  const double d = diffusion_diag.empty() ? 1.0 : (mode < diffusion_diag.size() ? diffusion_diag[mode] : 0.0);
  return sigma0 * std::exp(-sigma_decay * t) * d;
}

double CoefficientSet::diffusion_hs_norm_sq(const QCovariance& q, double t) const {
  CompensatedSum s;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double d = diffusion(t, n);
    s.add(q.eigenvalue(n) * d * d);
  }
  return s.value();
}

HilbertVector CoefficientSet::jump(double /*t*/, const HilbertVector& x, double mark) const {
  HilbertVector out(x.size());
  const double c = jump_gain * mark;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = c * x[k];
  return out;
}

HypothesisConstants derive_constants(const CoefficientSet& set, const SpectralModel& model,
                                     const MarkSpaceSpec& marks, double horizon) {
  if (!(set.beta > 0.0 && set.beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  HypothesisConstants c;
  for (double gain : set.drift_gains) c.K1 = std::max(c.K1, gain * gain);
  const double cg = neutral_gain_sup(set.neutral_gain, horizon);
  c.K2 = cg * cg;
  c.K3 = set.jump_gain * set.jump_gain * marks.second_moment_weight();
  c.beta = set.beta;
  c.norm_inv_beta = fractional_power_norm(model, -set.beta);
  c.gamma_sigma = set.sigma_decay;
  return c;
}

H5Check check_h5(const CoefficientSet& set, const QCovariance& q, double horizon, double gamma_probe) {
  if (!(gamma_probe > 0.0)) throw DomainError("gamma probe must be positive");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  H5Check out;
  if (set.sigma0 == 0.0) {
    out.finite = true;
    return out;
  }
  const auto integrand = [&](double s) {
    return std::exp(2.0 * gamma_probe * s) * set.diffusion_hs_norm_sq(q, s);
  };
  out.integral = quad::gauss_kronrod(integrand, 0.0, horizon, 1e-13).value;
  out.finite = std::isfinite(out.integral);
  return out;
}

double check_h4_continuity(const CoefficientSet& set, const TimeGrid& grid) {
  double gap = 0.0;
  for (std::size_t j = 0; j < grid.n_steps(); ++j)
    gap = std::max(gap, std::abs(neutral_gain_at(set.neutral_gain, grid.node(j + 1)) -
                                 neutral_gain_at(set.neutral_gain, grid.node(j))));
  return gap;
}

void validate_hypotheses(const SpectralModel& model, const QCovariance& q, const CoefficientSet& set,
                         const MarkSpaceSpec& marks, double horizon) {
  const auto fail = [](const char* h, const std::string& msg) { throw HypothesisError(h, msg); };

  if (!(model.first_eigenvalue() > 0.0)) fail("H.1", "0 must lie in the resolvent set of A (mu_1 > 0)");

  if (set.drift_gains.size() != model.dimension())
    fail("H.2", "drift_gains must have one entry per eigenmode");
  for (double g : set.drift_gains)
    if (!finite(g)) fail("H.2", "drift gains must be finite");

  if (!(set.beta > 0.0 && set.beta < 1.0)) {
    std::ostringstream msg;
    msg << "beta must lie in (0, 1), got " << set.beta;
    fail("H.3", msg.str());
  }
  if (!finite(neutral_gain_sup(set.neutral_gain, horizon))) fail("H.3", "neutral gain must be finite");

  if (const auto* step = std::get_if<gains::Step>(&set.neutral_gain))
    if (step->before != step->after && step->at > 0.0 && step->at <= horizon)
      fail("H.4", "(-A)^beta g jumps in time, so it is not continuous in quadratic mean");

  if (q.size() > model.dimension()) fail("H.5", "Q has more modes than the spectral model");
  if (!finite(set.sigma0) || !finite(set.sigma_decay)) fail("H.5", "sigma0 and sigma_decay must be finite");
  if (!set.diffusion_diag.empty() && set.diffusion_diag.size() != q.size())
    fail("H.5", "diffusion_diag must have one entry per Q mode");
  for (double d : set.diffusion_diag)
    if (!finite(d)) fail("H.5", "diffusion_diag entries must be finite");

  try {
    marks.validate();
  } catch (const DomainError& e) {
    fail("H.6", e.what());
  }
  if (!finite(set.jump_gain)) fail("H.6", "jump gain must be finite");
  if (!finite(set.jump_gain * set.jump_gain * marks.second_moment_weight()))
    fail("H.6", "jump Lipschitz constant K3 must be finite");
}

}  // namespace nsfde
