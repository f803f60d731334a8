#pragma once

#include <cstddef>
#include <functional>

namespace overmeasure {

inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr std::size_t kDefaultMaxEvaluations = 1'000'000;

struct QuadratureOptions {
  double rel_tol = kDefaultRelTol;
  // Accept once the error estimate drops below this, whatever the relative
  // error. Zero means purely relative.
  double abs_tol = 0.0;
  std::size_t max_evaluations = kDefaultMaxEvaluations;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature: the interval with the
/// largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol·|I|). Throws ConvergenceError when the evaluation
/// budget runs out and a domain error when f returns a non-finite value.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lo, double hi,
                                    const QuadratureOptions& options = {});

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = kDefaultRelTol);

}  // namespace overmeasure
