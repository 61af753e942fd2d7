#pragma once

#include <cstddef>
#include <functional>

namespace nsfde::quad {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod rule on a finite interval.
/// Bisects the interval with the largest error estimate until the summed
/// estimate falls below max(abs_tol, rel_tol*|value|) or max_intervals is hit.
QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-13, double abs_tol = 0.0,
                         std::size_t max_intervals = 2000);

}  // namespace nsfde::quad
