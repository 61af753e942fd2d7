#include "nsfde/stability.h"

#include <algorithm>
#include <cmath>

#include "nsfde/quadrature.h"

namespace nsfde {

SemigroupBounds diagonal_bounds(const SpectralModel& model, double beta) {
  SemigroupBounds b;
  b.M = 1.0;
  b.lambda = model.first_eigenvalue();
  b.lambda_choice = b.lambda * (1.0 - kLambdaChoiceGap);
  b.M_smoothing = smoothing_constant(model, beta, b.lambda_choice);
  return b;
}

DecayCertificate contraction_constant(const HypothesisConstants& c, const SemigroupBounds& bounds) {
  if (!(bounds.lambda > 0.0)) throw DomainError("certificate needs lambda > 0");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw DomainError("certificate needs beta in (0, 1)");
  DecayCertificate cert;
  cert.constants = c;
  cert.bounds = bounds;
  const double M2 = bounds.M * bounds.M;
  const double lam = bounds.lambda;
  const double g = std::tgamma(c.beta);
  auto& p = cert.components;
  p.neutral_static = c.K2 * c.norm_inv_beta * c.norm_inv_beta;
  p.neutral_convolution = c.K2 * bounds.M_smoothing * bounds.M_smoothing * std::pow(lam, -2.0 * c.beta) * g * g;
  p.drift = c.K1 * M2 / (lam * lam);
  p.jump = M2 * c.K3 / (2.0 * lam);
  cert.theta = 4.0 * (p.neutral_static + p.neutral_convolution + p.drift + p.jump);
  cert.passes = cert.theta < 1.0;
  cert.admissible_rate_sup = lam;
  return cert;
}

DecayCertificate certify(const Problem& problem, double horizon, std::optional<double> target_rate) {
  problem.validate(horizon);
  const auto& set = problem.coefficients;
  const HypothesisConstants c = derive_constants(set, problem.model, problem.marks, horizon);
  DecayCertificate cert = contraction_constant(c, diagonal_bounds(problem.model, set.beta));

  const double lam = cert.bounds.lambda;
  const bool diffusion = problem.has_fractional_noise();
  if (!diffusion)
    cert.gamma_branch = "no-diffusion";
  else if (c.gamma_sigma < lam)
    cert.gamma_branch = "gamma<lambda";
  else if (c.gamma_sigma > lam)
    cert.gamma_branch = "gamma>lambda";
  else
    cert.gamma_branch = "gamma=lambda-untreated";

  if (target_rate) {
    if (!(*target_rate > 0.0)) throw DomainError("target decay rate must be positive");
    double cap = std::min(2.0 * cert.bounds.lambda_choice, *target_rate);
    if (diffusion) cap = std::min(cap, 2.0 * c.gamma_sigma);
    cert.predicted_rate_cap = cap;
  }
  return cert;
}

DecayFit fit_decay_rate(const MomentTable& table) {
  std::vector<double> ts, ys;
  for (std::size_t j = 0; j < table.size(); ++j) {
    const double m = table.mean_sq[j];
    if (m > 0.0 && std::isfinite(m) && m > 10.0 * table.std_err[j]) {
      ts.push_back(table.t[j]);
      ys.push_back(std::log(m));
    }
  }
  if (ts.size() < 5)
    throw InsufficientDataError("decay fit needs at least 5 nodes with m(t) > 10 standard errors, found " +
                                std::to_string(ts.size()));
  const double n = static_cast<double>(ts.size());
  CompensatedSum st, sy;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st.add(ts[i]);
    sy.add(ys[i]);
  }
  const double tbar = st.value() / n;
  const double ybar = sy.value() / n;
  CompensatedSum stt, sty, syy;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dt = ts[i] - tbar;
    const double dy = ys[i] - ybar;
    stt.add(dt * dt);
    sty.add(dt * dy);
    syy.add(dy * dy);
  }
  if (!(stt.value() > 0.0)) throw InsufficientDataError("decay fit needs distinct times");
  const double slope = sty.value() / stt.value();
  const double intercept = ybar - slope * tbar;

  CompensatedSum ssr;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ssr.add(r * r);
  }
  DecayFit fit;
  fit.a_hat = -slope;
  fit.M_star_hat = std::exp(intercept);
  const double sst = syy.value();
  fit.r_squared = sst > 0.0 ? 1.0 - ssr.value() / sst : 1.0;
  fit.t_lo = ts.front();
  fit.t_hi = ts.back();
  fit.n_used = ts.size();
  return fit;
}

GammaIdentity gamma_identity_check(double alpha, double c) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(c > 0.0)) throw DomainError("c must be positive");
  // u = c t, then u = w^{1/alpha}: \int_0^inf u^{alpha-1} e^{-u} du = alpha^{-1} \int_0^inf exp(-w^{1/alpha}) dw.
  // The tail beyond u = 80 is below 1e-34.
  constexpr double kUMax = 80.0;
  const double w_max = std::pow(kUMax, alpha);
  const auto f = [alpha](double w) { return std::exp(-std::pow(w, 1.0 / alpha)); };
  const double w_knee = std::min(1.0, w_max);
  double integral = quad::gauss_kronrod(f, 0.0, w_knee, 1e-14).value;
  if (w_max > w_knee) integral += quad::gauss_kronrod(f, w_knee, w_max, 1e-14).value;
  integral /= alpha;

  GammaIdentity out;
  out.lhs = std::pow(c, -alpha);
  out.rhs = std::pow(c, -alpha) * integral / std::tgamma(alpha);
  out.rel_err = std::abs(out.rhs - out.lhs) / std::abs(out.lhs);
  return out;
}

bool initial_decay_check(const InitialDatum& phi, double tau, double M0, double a) {
  if (!(a > 0.0) || !(M0 > 0.0)) throw DomainError("initial decay check needs a > 0 and M0 > 0");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  constexpr int kProbe = 1000;
  const double sup = phi.sup_norm_sq(tau);
  for (int i = 0; i < kProbe; ++i) {
    const double t = -tau + tau * static_cast<double>(i) / (kProbe - 1);
    const double lhs = phi.at(t).norm_sq();
    const double rhs = M0 * sup * std::exp(-a * t);
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace nsfde
