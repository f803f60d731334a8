#include "overmeasure/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "overmeasure/error.hpp"

namespace overmeasure {

namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
constexpr double kLogTailCut = -8.0;
constexpr int kMillsTerms = 120;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw_domain(std::string(what) + ": argument must be finite, got " +
                 std::to_string(x));
  }
}

// ln(Q(t)/φ(t)) for t >= 8 from the Laplace continued fraction
//   Q(t)/φ(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))),
// evaluated bottom-up. 120 levels is far past convergence for t >= 8.
double log_mills_ratio(double t) {
  double f = t;
  for (int k = kMillsTerms; k >= 1; --k) f = t + k / f;
  return -std::log(f);
}

// Acklam's rational approximation; relative error ~1e-9, refined below.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// p <= 0.5. Newton on ln Φ(x) = ln p keeps every quantity representable
// down to subnormal p.
double quantile_lower(double p) {
  const double log_p = std::log(p);
  double x = acklam_lower(p);
  for (int i = 0; i < 3; ++i) {
    const double log_cdf = log_std_normal_cdf(x);
    const double log_pdf = -0.5 * x * x - kLogSqrt2Pi;
    const double step = (log_cdf - log_p) / std::exp(log_pdf - log_cdf);
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw_domain("probability must lie in [0, 1], got " + std::to_string(value));
  }
}

double std_normal_pdf(double x) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

Probability std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return Probability(0.5 * std::erfc(-x * kInvSqrt2));
}

Probability std_normal_sf(double x) {
  require_finite(x, "std_normal_sf");
  return Probability(0.5 * std::erfc(x * kInvSqrt2));
}

double log_std_normal_cdf(double x) {
  require_finite(x, "log_std_normal_cdf");
  if (x >= 0.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  if (x >= kLogTailCut) return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  const double t = -x;
  return -0.5 * t * t - kLogSqrt2Pi + log_mills_ratio(t);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw_domain("std_normal_quantile: p must lie in (0, 1), got " +
                 std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return quantile_lower(p);
  return -quantile_lower(1.0 - p);
}

double log_cdf_power(double x, std::uint64_t n) {
  if (n == 0) throw_domain("log_cdf_power: n must be at least 1");
  return static_cast<double>(n) * log_std_normal_cdf(x);
}

}  // namespace overmeasure
