#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "overmeasure/calibration.hpp"
#include "overmeasure/gaussian.hpp"
#include "overmeasure/monte_carlo.hpp"
#include "overmeasure/random.hpp"

namespace overmeasure {

struct SimulationReport {
  Probability estimate;
  // sqrt(p(1-p)/m) where m is the number of runs the estimate is taken
  // over: `trials` for plain frequencies, `accepted_runs` for conditional
  // ones.
  double standard_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t accepted_runs = 0;
};

enum class DesignMode {
  // Measurements are N(0, sigma_true²) draws.
  fixed_sigma,
  // The designer moves the design level until the max of the first
  // n_required draws touches t(n_required); sigma_true is the scatter.
  minimal_effort,
};

enum class RuleKind {
  fixed_threshold,  // t(n_required) for every count
  schedule,         // t(n') from the rule's schedule
};

struct DesignScenario {
  DesignMode mode = DesignMode::fixed_sigma;
  double sigma_true = 1.0;
  StandardRule rule;
  std::uint64_t n_performed = 0;
  std::uint64_t trials = 0;
  SeededStream stream;
};

/// Frequency with which one further draw exceeds the threshold after a
/// minimal-effort designer has tuned the design so that the largest of n
/// draws sits exactly on it. Tuning the level only leaves the ordering of
/// the n+1 draws, so the threshold drops out and the expectation is 1/(n+1).
SimulationReport simulate_minimal_effort(std::uint64_t n, std::uint64_t trials,
                                         SeededStream stream, unsigned workers = 0);

/// Rejection frequency of a standard applied to n_performed measurements.
SimulationReport simulate_compliance(const DesignScenario& scenario, RuleKind rule_kind,
                                     unsigned workers = 0);

struct ParadoxRow {
  std::uint64_t n_prime = 0;
  SimulationReport rejection_fixed;
  SimulationReport rejection_schedule;
};

/// One fixed/schedule pair per count. Row i uses stream_index + i for both
/// regimes, so the two columns share draws and schedule <= fixed holds run
/// by run.
std::vector<ParadoxRow> paradox_curve(double sigma_true, const StandardRule& rule,
                                      std::span<const std::uint64_t> n_list,
                                      std::uint64_t trials, SeededStream stream,
                                      unsigned workers = 0);

/// Rejection-sampling estimate of conditional_exceedance: draw σ from the
/// prior, draw n measurements, keep the run if all stay <= threshold, then
/// record whether one more draw exceeds q0. accepted_runs counts kept runs.
SimulationReport simulate_conditional_exceedance(const SafetySpec& spec,
                                                 const SigmaPrior& prior,
                                                 double threshold, std::uint64_t n,
                                                 std::uint64_t trials,
                                                 SeededStream stream,
                                                 unsigned workers = 0);

enum class ExpectedMaxMethod { gamma_prefactor, exact, monte_carlo };

struct ExpectedMax {
  double value = 0.0;
  double standard_error = 0.0;  // zero for the analytic methods
};

inline constexpr double kEulerGammaFourDigits = 0.5772;

/// Mean of the maximum of n N(0, σ²) draws.
///  - gamma_prefactor: kEulerGammaFourDigits·sqrt(2 ln n)·σ; needs n >= 2.
///  - exact: σ·∫ x·n·φ(x)·Φ(x)^(n-1) dx by adaptive quadrature.
///  - monte_carlo: mean of per-trial maxima with its standard error.
ExpectedMax expected_max(std::uint64_t n, double sigma, ExpectedMaxMethod method,
                         std::uint64_t trials = 100'000, SeededStream stream = {},
                         unsigned workers = 0);

/// Σ_{k<=n} 1/k - ln n with compensated summation.
double euler_gamma_partial(std::uint64_t n);

}  // namespace overmeasure
