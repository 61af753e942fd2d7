#include "nsfde/jump_noise.h"

#include <algorithm>
#include <cmath>

namespace nsfde {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

double mark_mean(const MarkSampler& s) {
  return std::visit(overloaded{[](const marks::Degenerate& m) { return m.value; },
                               [](const marks::Uniform& m) { return 0.5 * (m.lo + m.hi); },
                               [](const marks::Gaussian& m) { return m.mean; },
                               [](const marks::TwoPoint& m) { return m.p1 * m.z1 + (1.0 - m.p1) * m.z2; }},
                    s);
}

double mark_second_moment(const MarkSampler& s) {
  return std::visit(
      overloaded{[](const marks::Degenerate& m) { return m.value * m.value; },
                 [](const marks::Uniform& m) { return (m.lo * m.lo + m.lo * m.hi + m.hi * m.hi) / 3.0; },
                 [](const marks::Gaussian& m) { return m.mean * m.mean + m.sd * m.sd; },
                 [](const marks::TwoPoint& m) { return m.p1 * m.z1 * m.z1 + (1.0 - m.p1) * m.z2 * m.z2; }},
      s);
}

std::string mark_kind(const MarkSampler& s) {
  return std::visit(overloaded{[](const marks::Degenerate&) { return std::string("degenerate"); },
                               [](const marks::Uniform&) { return std::string("uniform"); },
                               [](const marks::Gaussian&) { return std::string("gaussian"); },
                               [](const marks::TwoPoint&) { return std::string("two_point"); }},
                    s);
}

void MarkSpaceSpec::validate() const {
  if (!(total_intensity >= 0.0) || !std::isfinite(total_intensity))
    throw DomainError("jump intensity nu(U) must be finite and nonnegative");
  std::visit(overloaded{[](const marks::Degenerate&) {},
                        [](const marks::Uniform& m) {
                          if (!(m.hi > m.lo)) throw DomainError("uniform marks need lo < hi");
                        },
                        [](const marks::Gaussian& m) {
                          if (!(m.sd >= 0.0)) throw DomainError("gaussian marks need sd >= 0");
                        },
                        [](const marks::TwoPoint& m) {
                          if (!(m.p1 >= 0.0 && m.p1 <= 1.0)) throw DomainError("two-point marks need p1 in [0, 1]");
                        }},
             sampler);
}

double MarkSpaceSpec::first_moment_weight() const { return total_intensity * mark_mean(sampler); }

double MarkSpaceSpec::second_moment_weight() const { return total_intensity * mark_second_moment(sampler); }

double MarkSpaceSpec::draw(std::mt19937_64& rng) const {
  return std::visit(overloaded{[](const marks::Degenerate& m) { return m.value; },
                               [&rng](const marks::Uniform& m) {
                                 return std::uniform_real_distribution<double>(m.lo, m.hi)(rng);
                               },
                               [&rng](const marks::Gaussian& m) {
                                 return std::normal_distribution<double>(m.mean, m.sd)(rng);
                               },
                               [&rng](const marks::TwoPoint& m) {
                                 return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < m.p1 ? m.z1 : m.z2;
                               }},
                    sampler);
}

JumpTrain sample_jump_train(const MarkSpaceSpec& spec, double horizon, std::uint64_t seed) {
  spec.validate();
  if (!(horizon > 0.0)) throw DomainError("jump train horizon must be positive");
  JumpTrain train{{}, horizon, seed};
  if (spec.total_intensity == 0.0) return train;

  std::mt19937_64 rng(seed);
  const auto count = std::poisson_distribution<long long>(spec.total_intensity * horizon)(rng);
  std::uniform_real_distribution<double> unif(0.0, horizon);
  std::vector<double> times(static_cast<std::size_t>(count));
  // T - U with U uniform on [0, T) is uniform on (0, T].
  for (double& t : times) t = horizon - unif(rng);
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) times[i] = std::nextafter(times[i - 1], horizon + 1.0);
  train.events.reserve(times.size());
  for (double t : times) train.events.push_back({std::min(t, horizon), spec.draw(rng)});
  return train;
}

JumpTrain merge_trains(const JumpTrain& a, const JumpTrain& b) {
  if (a.horizon != b.horizon) throw DomainError("merged trains must share a horizon");
  JumpTrain out{{}, a.horizon, derive_seed(a.seed, b.seed)};
  out.events.reserve(a.size() + b.size());
  std::merge(a.events.begin(), a.events.end(), b.events.begin(), b.events.end(), std::back_inserter(out.events),
             [](const JumpEvent& l, const JumpEvent& r) { return l.time < r.time; });
  return out;
}

double compensated_sum(const JumpTrain& train, const std::function<double(double)>& weight,
                       std::span<const double> jump_coeff,
                       const std::function<double(double)>& compensator_rate, const TimeGrid& grid) {
  if (jump_coeff.size() != train.size()) throw DomainError("need one jump coefficient per event");
  CompensatedSum s;
  for (std::size_t i = 0; i < train.size(); ++i) s.add(weight(train.events[i].time) * jump_coeff[i]);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const double t = grid.node(j);
    s.add(-weight(t) * compensator_rate(t) * grid.step());
  }
  return s.value();
}

}  // namespace nsfde
