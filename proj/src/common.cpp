#include "nsfde/common.h"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace nsfde {

TimeGrid::TimeGrid(double step, std::size_t n_steps) : step_(step), n_steps_(n_steps) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("time grid step must be positive");
  if (n_steps < 1) throw DomainError("time grid needs at least one step");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("time grid needs at least one step");
  return TimeGrid(horizon / static_cast<double>(n_steps), n_steps);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(n_nodes());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = node(j);
  return out;
}

MeanEstimate estimate_mean(const std::vector<double>& samples) {
  MeanEstimate est;
  est.n = samples.size();
  if (samples.empty()) return est;
  CompensatedSum s;
  for (double x : samples) s.add(x);
  est.mean = s.value() / static_cast<double>(est.n);
  if (est.n < 2) return est;
  CompensatedSum ss;
  for (double x : samples) {
    const double d = x - est.mean;
    ss.add(d * d);
  }
  const double var = ss.value() / static_cast<double>(est.n - 1);
  est.std_err = std::sqrt(var / static_cast<double>(est.n));
  return est;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) noexcept {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632BE59BD9B4E019ULL));
  h = splitmix64(h ^ (c + 0x85157AF5ULL));
  return h;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nsfde
