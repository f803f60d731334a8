#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "overmeasure/gaussian.hpp"

namespace overmeasure {

inline constexpr double kDefaultCalibrationTol = 1e-4;

/// True danger threshold q0 and tolerated future-exceedance probability p0.
/// Measurements are taken to be mean-centred by the caller.
class SafetySpec {
 public:
  SafetySpec(double q0, double p0);

  double q0() const noexcept { return q0_; }
  Probability p0() const noexcept { return p0_; }

  friend bool operator==(const SafetySpec&, const SafetySpec&) = default;

 private:
  double q0_;
  Probability p0_;
};

enum class PriorKind { log_uniform, point };

/// Uncertainty over the measurement scale σ. A point prior means σ is
/// known, which makes conditioning on the sample maximum uninformative.
class SigmaPrior {
 public:
  static SigmaPrior log_uniform(double sigma_lo, double sigma_hi);
  static SigmaPrior point(double sigma);
  /// log-uniform on [q0/100, 10·q0].
  static SigmaPrior default_for(double q0);

  PriorKind kind() const noexcept { return kind_; }
  double sigma_lo() const noexcept { return lo_; }
  double sigma_hi() const noexcept { return hi_; }

  friend bool operator==(const SigmaPrior&, const SigmaPrior&) = default;

 private:
  SigmaPrior(PriorKind kind, double lo, double hi);

  PriorKind kind_;
  double lo_;
  double hi_;
};

struct ScheduleEntry {
  std::uint64_t n_prime = 0;
  double threshold = 0.0;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// A published standard: the required count, its test threshold, and the
/// thresholds t(n') for larger counts. The first schedule entry is the
/// required count itself.
class StandardRule {
 public:
  /// Validates ordering: n' strictly increasing, t non-decreasing, all
  /// thresholds finite.
  explicit StandardRule(std::vector<ScheduleEntry> schedule);

  /// The naive rule: one threshold for any count >= n.
  static StandardRule fixed(std::uint64_t n_required, double threshold);

  std::uint64_t n_required() const noexcept { return schedule_.front().n_prime; }
  double threshold() const noexcept { return schedule_.front().threshold; }
  std::span<const ScheduleEntry> schedule() const noexcept { return schedule_; }

  /// Index of the entry with the largest n'' <= n; throws an
  /// insufficient-data error when n < n_required.
  std::size_t entry_index_for(std::uint64_t n) const;

  friend bool operator==(const StandardRule&, const StandardRule&) = default;

 private:
  std::vector<ScheduleEntry> schedule_;
};

struct CalibrationResult {
  double threshold = 0.0;
  Probability achieved;
  std::uint32_t iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool capped = false;
  // Largest feasible threshold before the q0 cap; +inf when the
  // exceedance never reaches p0.
  double uncapped_threshold = std::numeric_limits<double>::infinity();
};

/// 1/(n+1): chance that one more exchangeable continuous draw beats the
/// maximum of n earlier ones.
Probability next_exceeds_max_probability(std::uint64_t n);

/// 1 - Φ(q0/σ).
Probability marginal_exceedance(const SafetySpec& spec, double sigma);

/// Posterior-predictive probability that the next draw exceeds q0 given
/// that all n observed draws stayed at or below `threshold`:
///
///   N/D,  D = ∫ Φ(t/σ)^n dπ(σ),  N = ∫ (1 - Φ(q0/σ)) Φ(t/σ)^n dπ(σ),
///
/// integrated over ln σ. A point prior reduces this to the marginal
/// exceedance. Throws `infeasible_conditioning` when D underflows.
Probability conditional_exceedance(const SafetySpec& spec, double threshold,
                                   std::uint64_t n, const SigmaPrior& prior);

/// Largest threshold whose conditional exceedance stays at or below p0,
/// found by bisection. See calibration.cpp for the bracketing strategy.
CalibrationResult calibrate_threshold(const SafetySpec& spec, std::uint64_t n,
                                      const SigmaPrior& prior,
                                      bool cap_at_q0 = true,
                                      double tol = kDefaultCalibrationTol);

/// Calibrates every count in `n_list` (strictly increasing). Errors carry
/// the failing n' in their message.
StandardRule threshold_schedule(const SafetySpec& spec, const SigmaPrior& prior,
                                std::span<const std::uint64_t> n_list,
                                bool cap_at_q0 = true,
                                double tol = kDefaultCalibrationTol);

/// Φ(t/σ)^n: chance that a system with true scale σ passes n measurements.
Probability acceptance_probability(double sigma_true, double threshold,
                                   std::uint64_t n);

struct ComplianceDecision {
  bool safe = false;
  std::size_t entry_index = 0;
  ScheduleEntry applied;
  double observed_max = 0.0;
};

ComplianceDecision evaluate_compliance(const StandardRule& rule,
                                       std::span<const double> measurements);

}  // namespace overmeasure
