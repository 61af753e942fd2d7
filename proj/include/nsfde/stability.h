#pragma once

#include <optional>
#include <string>

#include "nsfde/coefficients.h"
#include "nsfde/hilbert_spectral.h"
#include "nsfde/mild_solver.h"

namespace nsfde {

/// ||S(t)|| <= M e^{-lambda t} and ||(-A)^{1-beta} S(t)|| <= M_smoothing t^{beta-1} e^{-lambda_choice t}.
struct SemigroupBounds {
  double M = 1.0;
  double lambda = 1.0;
  double M_smoothing = 0.0;
  double lambda_choice = 0.0;
};

/// Relative gap below mu_1 used for lambda_choice.
inline constexpr double kLambdaChoiceGap = 1e-6;

/// M = 1, lambda = mu_1, M_smoothing from smoothing_constant at mu_1 (1 - gap).
SemigroupBounds diagonal_bounds(const SpectralModel& model, double beta);

struct CertificateComponents {
  double neutral_static = 0.0;       // K2 ||(-A)^{-beta}||^2
  double neutral_convolution = 0.0;  // K2 M_{1-beta}^2 lambda^{-2 beta} Gamma(beta)^2
  double drift = 0.0;                // K1 M^2 lambda^{-2}
  double jump = 0.0;                 // M^2 K3 / (2 lambda)
};

struct DecayCertificate {
  double theta = 0.0;
  bool passes = false;
  CertificateComponents components;
  HypothesisConstants constants;
  SemigroupBounds bounds;
  /// Decay rates a are admissible in (0, admissible_rate_sup).
  double admissible_rate_sup = 0.0;
  /// min(2 lambda_choice, 2 gamma_sigma, a); heuristic, absent without a target rate.
  std::optional<double> predicted_rate_cap;
  /// "no-diffusion", "gamma<lambda", "gamma>lambda" or "gamma=lambda-untreated".
  std::string gamma_branch;
};

/// Throws DomainError for lambda <= 0 or beta outside (0, 1).
DecayCertificate contraction_constant(const HypothesisConstants& c, const SemigroupBounds& bounds);

/// Certificate of a validated problem over [0, horizon]. target_rate is the
/// decay rate a from the initial-datum condition, if one is given.
DecayCertificate certify(const Problem& problem, double horizon, std::optional<double> target_rate = std::nullopt);

struct DecayFit {
  double a_hat = 0.0;
  double M_star_hat = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t n_used = 0;
};

/// Least squares on log m(t_j) over nodes with m > 10 std_err (and m > 0).
/// Throws InsufficientDataError with fewer than 5 such nodes.
DecayFit fit_decay_rate(const MomentTable& table);

struct GammaIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

/// c^{-alpha} against Gamma(alpha)^{-1} \int_0^inf t^{alpha-1} e^{-ct} dt.
GammaIdentity gamma_identity_check(double alpha, double c);

/// ||phi(t)||^2 <= M0 sup||phi||^2 e^{-a t} on 1000 equispaced points of [-tau, 0].
bool initial_decay_check(const InitialDatum& phi, double tau, double M0, double a);

}  // namespace nsfde
