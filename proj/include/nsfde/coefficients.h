#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nsfde/common.h"
#include "nsfde/hilbert_spectral.h"
#include "nsfde/jump_noise.h"

namespace nsfde {

/// A hypothesis (H.1)-(H.6) does not hold for a configuration.
class HypothesisError : public std::runtime_error {
public:
  HypothesisError(std::string hypothesis, const std::string& message)
      : std::runtime_error(hypothesis + ": " + message), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
  std::string hypothesis_;
};

namespace gains {
struct Constant {
  double value = 0.0;
};
/// c0 + c1 t
struct Affine {
  double c0 = 0.0;
  double c1 = 0.0;
};
/// before for t < at, after for t >= at.
struct Step {
  double before = 0.0;
  double after = 0.0;
  double at = 0.0;
};
}  // namespace gains

/// Scalar c_g(t) in g(t, x) = c_g(t) (-A)^{-beta} x.
using NeutralGain = std::variant<gains::Constant, gains::Affine, gains::Step>;

double neutral_gain_at(const NeutralGain& gain, double t);
/// sup_{t in [0, horizon]} |c_g(t)|.
double neutral_gain_sup(const NeutralGain& gain, double horizon);
bool neutral_gain_is_constant(const NeutralGain& gain);

/// Delay d(t) = d0 + d1 sin(omega t), clipped to [0, tau]. d1 = 0 gives a
/// constant delay.
struct Delay {
  double d0 = 0.0;
  double d1 = 0.0;
  double omega = 0.0;

  static Delay constant(double d) { return {d, 0.0, 0.0}; }
  static Delay sinusoidal(double d0, double d1, double omega) { return {d0, d1, omega}; }
  bool is_constant() const noexcept { return d1 == 0.0 || omega == 0.0; }
};

enum class DelayRole { r, rho, theta };

struct DelaySet {
  Delay r;      // neutral term
  Delay rho;    // drift
  Delay theta;  // jump coefficient
  double tau = 1.0;

  const Delay& get(DelayRole role) const;
};

/// Clipped delay value in [0, tau].
double evaluate_delay(const DelaySet& delays, DelayRole role, double t);

/// Linear diagonal coefficient catalog:
///   f(t, x)    = diag(drift_gains) x
///   g(t, x)    = c_g(t) (-A)^{-beta} x
///   sigma(t)   = sigma0 e^{-sigma_decay t} diag(diffusion_diag)
///   h(t, x, z) = jump_gain * z * x
struct CoefficientSet {
  std::vector<double> drift_gains;
  NeutralGain neutral_gain = gains::Constant{0.0};
  double beta = 0.5;
  double sigma0 = 0.0;
  double sigma_decay = 0.0;
  std::vector<double> diffusion_diag;  // empty means identity
  double jump_gain = 0.0;
  DelaySet delays;

  HilbertVector drift(double t, const HilbertVector& x) const;
  HilbertVector neutral(const SpectralModel& model, double t, const HilbertVector& x) const;
  /// Diagonal entry of sigma(t) on mode n.
  double diffusion(double t, std::size_t mode) const;
  /// ||sigma(t)||^2_{L_2^0} = sum_n lambda_n sigma_n(t)^2.
  double diffusion_hs_norm_sq(const QCovariance& q, double t) const;
  HilbertVector jump(double t, const HilbertVector& x, double mark) const;
};

struct HypothesisConstants {
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double beta = 0.5;
  double norm_inv_beta = 1.0;  // ||(-A)^{-beta}||
  double gamma_sigma = 0.0;
};

/// Analytic squared Lipschitz constants of the catalog. A time-varying neutral
/// gain uses its supremum over [0, horizon].
HypothesisConstants derive_constants(const CoefficientSet& set, const SpectralModel& model,
                                     const MarkSpaceSpec& marks, double horizon = 0.0);

struct H5Check {
  double integral = 0.0;
  bool finite = false;
};

/// \int_0^T e^{2 gamma s} ||sigma(s)||^2_{L_2^0} ds.
H5Check check_h5(const CoefficientSet& set, const QCovariance& q, double horizon, double gamma_probe);

/// max_j |c_g(t_{j+1}) - c_g(t_j)|, the largest change of (-A)^beta g(., x) over
/// one grid step for unit x.
double check_h4_continuity(const CoefficientSet& set, const TimeGrid& grid);

/// Throws HypothesisError naming the first violated hypothesis.
void validate_hypotheses(const SpectralModel& model, const QCovariance& q, const CoefficientSet& set,
                         const MarkSpaceSpec& marks, double horizon);

}  // namespace nsfde
