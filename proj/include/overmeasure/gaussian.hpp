#pragma once

#include <cstdint>

namespace overmeasure {

/// A probability in [0, 1]. Construction validates the range; reading it
/// back is implicit so arithmetic stays readable.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Φ(x). Absolute error below 1e-14 everywhere; throws a domain error on
/// non-finite input.
Probability std_normal_cdf(double x);

/// 1 - Φ(x), accurate in relative terms for large positive x.
Probability std_normal_sf(double x);

/// ln Φ(x). For x < -8 the value comes from the continued fraction of the
/// Mills ratio, so it stays finite long after Φ(x) itself underflows.
double log_std_normal_cdf(double x);

/// Inverse of Φ on (0, 1).
double std_normal_quantile(double p);

/// n·ln Φ(x), i.e. the log-probability that n independent standard normal
/// draws all land at or below x.
double log_cdf_power(double x, std::uint64_t n);

}  // namespace overmeasure
