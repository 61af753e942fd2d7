#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsfde/hilbert_spectral.h"

using namespace nsfde;

namespace {
HilbertVector vec(std::vector<double> v) { return HilbertVector(std::move(v)); }
}  // namespace

TEST(SpectralModel, Validation) {
  EXPECT_THROW(SpectralModel({}), DomainError);
  EXPECT_THROW(SpectralModel({0.0, 1.0}), DomainError);
  EXPECT_THROW(SpectralModel({2.0, 1.0}), DomainError);
  EXPECT_NO_THROW(SpectralModel({1.0, 1.0, 3.0}));
  EXPECT_THROW(QCovariance({1.0, -0.1}), DomainError);
  EXPECT_DOUBLE_EQ(QCovariance({1.0, 0.5, 0.25}).trace(), 1.75);
  EXPECT_EQ(QCovariance({1.0}).discarded_trace(), 0.0);
}

TEST(Semigroup, Examples) {
  const SpectralModel m({1.0, 2.0});
  const HilbertVector v = vec({1.0, 1.0});
  EXPECT_EQ(semigroup_apply(m, 0.0, v), v);
  const HilbertVector r = semigroup_apply(m, std::log(2.0), v);
  EXPECT_NEAR(r[0], 0.5, 1e-15);
  EXPECT_NEAR(r[1], 0.25, 1e-15);
  EXPECT_THROW(semigroup_apply(m, -0.1, v), DomainError);
}

TEST(Semigroup, LawsOnRandomVectors) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const SpectralModel m({0.3, 1.0, 2.5, 7.0, 20.0});
  for (int rep = 0; rep < 50; ++rep) {
    HilbertVector v(5);
    for (std::size_t k = 0; k < 5; ++k) v[k] = n01(rng);
    const double t = u(rng), s = u(rng);
    const HilbertVector a = semigroup_apply(m, t, semigroup_apply(m, s, v));
    const HilbertVector b = semigroup_apply(m, t + s, v);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-14 * std::max(1.0, std::abs(b[k])));
    EXPECT_LE(semigroup_apply(m, t, v).norm(), std::exp(-0.3 * t) * v.norm() * (1 + 1e-15));
    const double alpha = u(rng) / 3.0 - 0.5;
    const HilbertVector c = fractional_power_apply(m, alpha, semigroup_apply(m, t, v));
    const HilbertVector d = semigroup_apply(m, t, fractional_power_apply(m, alpha, v));
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(c[k], d[k], 1e-14 * std::max(1.0, std::abs(d[k])));
  }
  // Equality at the first mode.
  const HilbertVector e1 = vec({1.0, 0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(semigroup_apply(m, 1.3, e1).norm(), std::exp(-0.3 * 1.3));
}

TEST(FractionalPower, Examples) {
  const SpectralModel m({0.5, 2.0, 8.0});
  const HilbertVector v = vec({1.0, -2.0, 3.0});
  EXPECT_EQ(fractional_power_apply(m, 0.0, v), v);
  const HilbertVector a1 = fractional_power_apply(m, 1.0, v);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(a1[k], m.eigenvalue(k) * v[k]);
  EXPECT_DOUBLE_EQ(fractional_power_norm(m, -0.4), std::pow(0.5, -0.4));
  EXPECT_DOUBLE_EQ(fractional_power_norm(m, 0.4), std::pow(8.0, 0.4));
  EXPECT_THROW(fractional_power_apply(m, 1.5, v), DomainError);
  const HilbertVector comp = fractional_power_apply(m, 0.3, fractional_power_apply(m, 0.4, v));
  const HilbertVector direct = fractional_power_apply(m, 0.7, v);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(comp[k], direct[k], 1e-14 * std::abs(direct[k]));
  const HilbertVector inv = fractional_power_apply(m, -0.6, fractional_power_apply(m, 0.6, v));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(inv[k], v[k], 1e-14 * std::abs(v[k]));
}

TEST(SmoothingConstant, WorkedExampleAgainstGridMaximum) {
  const SpectralModel m({1.0});
  const double M = smoothing_constant(m, 0.5, 0.5);
  EXPECT_NEAR(M, std::sqrt(1.0 / std::exp(1.0)), 1e-15);
  EXPECT_NEAR(M, 0.60653, 1e-5);
  // sup_t t^{1/2} e^{-t/2} mu^{1/2} on a fine grid
  double best = 0.0;
  for (int i = 1; i <= 200000; ++i) {
    const double t = i * 1e-4;
    best = std::max(best, std::sqrt(t) * std::exp(-0.5 * t));
  }
  EXPECT_NEAR(M, best, 1e-8);
}

TEST(SmoothingConstant, LimitsAndErrors) {
  const SpectralModel m({1.0, 3.0});
  EXPECT_NEAR(smoothing_constant(m, 1.0 - 1e-9, 0.5), 1.0, 1e-6);
  EXPECT_THROW(smoothing_constant(m, 0.5, 1.0), DomainError);
  EXPECT_THROW(smoothing_constant(m, 0.5, 1.5), DomainError);
  EXPECT_THROW(smoothing_constant(m, 0.0, 0.5), DomainError);
  EXPECT_THROW(smoothing_constant(m, 1.0, 0.5), DomainError);
}

TEST(SmoothingConstant, InequalitySweep) {
  std::mt19937_64 rng(3);
  const SpectralModel m({0.7, 1.5, 4.0, 12.0});
  for (double beta : {0.2, 0.5, 0.8}) {
    const double lc = 0.5;
    const double M = smoothing_constant(m, beta, lc);
    std::uniform_real_distribution<double> ut(1e-3, 20.0);
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      const std::size_t k = rng() % 4;
      const double mu = m.eigenvalue(k);
      const double lhs = std::pow(mu, 1.0 - beta) * std::exp(-mu * t);
      EXPECT_LE(lhs, M * std::pow(t, beta - 1.0) * std::exp(-lc * t) * (1 + 1e-12));
    }
  }
}

TEST(SampleQfbm, DegenerateQ) {
  const SpectralModel m({1.0, 2.0, 3.0});
  const QCovariance q({1.0, 0.0, 0.0});
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  const QfbmIncrements inc = sample_qfbm(m, q, HurstParameter(0.7), g, 5);
  ASSERT_EQ(inc.n_modes(), 3u);
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_EQ(inc.increment(1, j), 0.0);
    EXPECT_EQ(inc.increment(2, j), 0.0);
    EXPECT_EQ(inc.increment(7, j), 0.0);
  }
  // Mode 0 is the scalar fBm of stream derive_seed(5, 0).
  const FbmSampler s(g, HurstParameter(0.7));
  const ScalarFbmPath p = s.sample_path(derive_seed(5, 0));
  for (std::size_t j = 0; j <= 16; ++j) EXPECT_NEAR(inc.value(0, j), p.values[j], 1e-14);
  EXPECT_THROW(sample_qfbm(SpectralModel({1.0}), QCovariance({1.0, 1.0}), HurstParameter(0.7), g, 1), DomainError);
}

TEST(SampleQfbm, SecondMomentAndIndependence) {
  const SpectralModel m({1.0, 2.0});
  const QCovariance q({1.0, 0.5});
  const TimeGrid g = TimeGrid::uniform(1.0, 32);
  const double H = 0.7;
  const FbmSampler s(g, HurstParameter(H));
  std::vector<double> sq, cross;
  for (std::size_t p = 0; p < 20000; ++p) {
    const QfbmIncrements inc = sample_qfbm(m, q, s, derive_seed(31, p));
    const double a = inc.value(0, 32), b = inc.value(1, 32);
    sq.push_back(a * a + b * b);
    cross.push_back(a * b);
  }
  const MeanEstimate e = estimate_mean(sq);
  EXPECT_LE(std::abs(e.mean - 1.5), 5.0 * e.std_err);
  const MeanEstimate c = estimate_mean(cross);
  EXPECT_LE(std::abs(c.mean), 5.0 * c.std_err);
}

TEST(QWienerBound, Examples) {
  const TimeGrid g = TimeGrid::uniform(1.0, 32);
  const SpectralModel m({1.0});
  const QCovariance q({1.0});
  const Lemma2Check zero = lemma2_bound_check(m, q, DiagonalSchedule::zeros(32, 1), HurstParameter(0.7), g, 100, 1);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  EXPECT_TRUE(zero.holds);

  DiagonalSchedule id = DiagonalSchedule::zeros(32, 1);
  for (double& e : id.entries) e = 1.0;
  const Lemma2Check c = lemma2_bound_check(m, q, id, HurstParameter(0.7), g, 20000, 2);
  EXPECT_NEAR(c.rhs, 1.4, 1e-14);
  EXPECT_LE(std::abs(c.lhs - 1.0), 5.0 * c.lhs_std_err);
  EXPECT_TRUE(c.holds);
}

TEST(QWienerBound, RandomScheduleMatchesIsometryOracle) {
  const double H = 0.8;
  const TimeGrid g = TimeGrid::uniform(1.0, 64);
  const SpectralModel m({1.0, 3.0});
  const QCovariance q({1.0, 0.3});
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  DiagonalSchedule psi = DiagonalSchedule::zeros(64, 2);
  for (double& e : psi.entries) e = n01(rng);
  const Lemma2Check c = lemma2_bound_check(m, q, psi, HurstParameter(H), g, 20000, 12);
  EXPECT_TRUE(c.holds);
  double oracle = 0.0;
  for (std::size_t n = 0; n < 2; ++n) {
    std::vector<double> col(64);
    for (std::size_t j = 0; j < 64; ++j) col[j] = psi.at(j, n);
    const StepFunction f = StepFunction::on_grid(g, col);
    oracle += q.eigenvalue(n) * rkhs_scalar_product(f, f, HurstParameter(H));
  }
  EXPECT_LE(std::abs(c.lhs - oracle), 5.0 * c.lhs_std_err);
  EXPECT_LE(oracle, c.rhs);
}
