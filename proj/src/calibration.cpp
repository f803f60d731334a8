#include "overmeasure/calibration.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <string>

#include "overmeasure/error.hpp"
#include "overmeasure/quadrature.hpp"

namespace overmeasure {

namespace {

constexpr double kThresholdResolution = 1e-9;  // relative to q0
constexpr double kScanFloor = 1e-6;            // relative to q0
constexpr int kMaxDoublings = 64;
constexpr int kMaxBisections = 200;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void require_positive(double x, const char* what) {
  if (!(std::isfinite(x) && x > 0.0)) {
    throw_domain(std::string(what) + " must be positive and finite, got " + fmt(x));
  }
}

}  // namespace

SafetySpec::SafetySpec(double q0, double p0) : q0_(q0), p0_() {
  require_positive(q0, "q0");
  if (!(p0 > 0.0 && p0 < 0.5)) {
    throw_domain("p0 must lie in (0, 0.5), got " + fmt(p0));
  }
  p0_ = Probability(p0);
}

SigmaPrior::SigmaPrior(PriorKind kind, double lo, double hi)
    : kind_(kind), lo_(lo), hi_(hi) {}

SigmaPrior SigmaPrior::log_uniform(double sigma_lo, double sigma_hi) {
  require_positive(sigma_lo, "sigma_lo");
  require_positive(sigma_hi, "sigma_hi");
  if (!(sigma_lo < sigma_hi)) {
    throw_domain("log-uniform prior needs sigma_lo < sigma_hi, got [" +
                 fmt(sigma_lo) + ", " + fmt(sigma_hi) + "]");
  }
  return SigmaPrior(PriorKind::log_uniform, sigma_lo, sigma_hi);
}

SigmaPrior SigmaPrior::point(double sigma) {
  require_positive(sigma, "sigma");
  return SigmaPrior(PriorKind::point, sigma, sigma);
}

SigmaPrior SigmaPrior::default_for(double q0) {
  require_positive(q0, "q0");
  return log_uniform(q0 / 100.0, 10.0 * q0);
}

StandardRule::StandardRule(std::vector<ScheduleEntry> schedule)
    : schedule_(std::move(schedule)) {
  if (schedule_.empty()) throw_domain("standard rule needs at least one entry");
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    const ScheduleEntry& e = schedule_[i];
    if (e.n_prime == 0) throw_domain("schedule counts must be positive");
    if (!std::isfinite(e.threshold)) {
      throw_domain("schedule threshold for n'=" + std::to_string(e.n_prime) +
                   " is not finite");
    }
    if (i == 0) continue;
    const ScheduleEntry& prev = schedule_[i - 1];
    if (e.n_prime <= prev.n_prime) {
      throw_domain("schedule counts must be strictly increasing (n'=" +
                   std::to_string(e.n_prime) + " after " +
                   std::to_string(prev.n_prime) + ")");
    }
    if (e.threshold < prev.threshold) {
      throw_domain("schedule thresholds must be non-decreasing (t(" +
                   std::to_string(e.n_prime) + ")=" + fmt(e.threshold) +
                   " < t(" + std::to_string(prev.n_prime) + ")=" +
                   fmt(prev.threshold) + ")");
    }
  }
}

StandardRule StandardRule::fixed(std::uint64_t n_required, double threshold) {
  return StandardRule({{n_required, threshold}});
}

std::size_t StandardRule::entry_index_for(std::uint64_t n) const {
  if (n < n_required()) {
    throw Error(ErrorCode::insufficient_data,
                std::to_string(n) + " measurements given, the rule requires at least " +
                    std::to_string(n_required()));
  }
  const auto it = std::upper_bound(
      schedule_.begin(), schedule_.end(), n,
      [](std::uint64_t value, const ScheduleEntry& e) { return value < e.n_prime; });
  return static_cast<std::size_t>(std::distance(schedule_.begin(), it)) - 1;
}

Probability next_exceeds_max_probability(std::uint64_t n) {
  if (n == 0) throw_domain("next_exceeds_max_probability: n must be at least 1");
  return Probability(1.0 / (static_cast<double>(n) + 1.0));
}

Probability marginal_exceedance(const SafetySpec& spec, double sigma) {
  require_positive(sigma, "sigma");
  return std_normal_sf(spec.q0() / sigma);
}

Probability conditional_exceedance(const SafetySpec& spec, double threshold,
                                   std::uint64_t n, const SigmaPrior& prior) {
  if (!std::isfinite(threshold)) throw_domain("threshold must be finite");
  if (n == 0) throw_domain("conditional_exceedance: n must be at least 1");
  if (prior.kind() == PriorKind::point) {
    return marginal_exceedance(spec, prior.sigma_lo());
  }

  const double a = std::log(prior.sigma_lo());
  const double b = std::log(prior.sigma_hi());
  const auto log_weight = [&](double u) {
    return log_cdf_power(threshold * std::exp(-u), n);
  };
  // Φ(t/σ) is monotone in σ, so the largest weight sits at an endpoint.
  const double shift = std::max(log_weight(a), log_weight(b));

  QuadratureOptions options;
  options.rel_tol = kDefaultRelTol;
  const double denominator =
      integrate_adaptive([&](double u) { return std::exp(log_weight(u) - shift); },
                         a, b, options)
          .value;
  const double log_evidence = shift + std::log(denominator / (b - a));
  if (!(denominator > 0.0) || log_evidence < std::log(DBL_MIN)) {
    throw Error(ErrorCode::infeasible_conditioning,
                "P(max of " + std::to_string(n) + " draws <= " + fmt(threshold) +
                    ") is below the floating-point floor under the prior "
                    "(log-probability " + fmt(log_evidence) + ")");
  }
  const double numerator =
      integrate_adaptive(
          [&](double u) {
            const double weight = std::exp(log_weight(u) - shift);
            return weight == 0.0 ? 0.0
                                 : std_normal_sf(spec.q0() * std::exp(-u)) * weight;
          },
          a, b, options)
          .value;
  return Probability(std::clamp(numerator / denominator, 0.0, 1.0));
}

// The threshold map is increasing only above a small-t region: as t -> 0+
// every σ gives Φ(t/σ)^n -> 2^-n, the posterior falls back to the prior and
// the exceedance climbs back to the prior mean. So the lower bracket is found
// by scanning down from q0 rather than assumed at the floor.
CalibrationResult calibrate_threshold(const SafetySpec& spec, std::uint64_t n,
                                      const SigmaPrior& prior, bool cap_at_q0,
                                      double tol) {
  if (n == 0) throw_domain("calibrate_threshold: n must be at least 1");
  if (!(tol > 0.0 && tol < 1.0)) throw_domain("tol must lie in (0, 1), got " + fmt(tol));

  const double q0 = spec.q0();
  const double p0 = spec.p0();
  const auto ce = [&](double t) {
    return conditional_exceedance(spec, t, n, prior).value();
  };

  if (prior.kind() == PriorKind::point) {
    const double m = marginal_exceedance(spec, prior.sigma_lo());
    if (m > p0) {
      throw Error(ErrorCode::infeasible,
                  "known sigma=" + fmt(prior.sigma_lo()) + " gives exceedance " +
                      fmt(m) + " > p0=" + fmt(p0) +
                      "; no test threshold can change it");
    }
    if (!cap_at_q0) {
      throw Error(ErrorCode::solver,
                  "with a known sigma the exceedance never reaches p0, so there is "
                  "no finite largest threshold; enable cap_at_q0");
    }
    CalibrationResult r;
    r.threshold = q0;
    r.achieved = Probability(m);
    r.bracket_lo = q0;
    r.bracket_hi = std::numeric_limits<double>::infinity();
    r.capped = true;
    return r;
  }

  double lo = 0.0;
  double hi = 0.0;
  double ce_lo = 0.0;
  const double ce_q0 = ce(q0);
  bool unbounded = false;

  if (ce_q0 <= p0) {
    lo = q0;
    ce_lo = ce_q0;
    int k = 0;
    for (; k < kMaxDoublings; ++k) {
      const double candidate = 2.0 * lo;
      const double c = ce(candidate);
      if (c > p0) {
        hi = candidate;
        break;
      }
      lo = candidate;
      ce_lo = c;
    }
    if (k == kMaxDoublings) {
      if (!cap_at_q0) {
        throw Error(ErrorCode::solver,
                    "bracket expansion failed: conditional exceedance is still <= p0 at t=" +
                        fmt(lo) + " (n=" + std::to_string(n) + ")");
      }
      unbounded = true;
    }
  } else {
    hi = q0;
    bool found = false;
    try {
      for (double t = 0.5 * q0; t >= kScanFloor * q0; t *= 0.5) {
        const double c = ce(t);
        if (c <= p0) {
          lo = t;
          ce_lo = c;
          found = true;
          break;
        }
        hi = t;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::infeasible_conditioning) throw;
    }
    if (!found) {
      throw Error(ErrorCode::infeasible,
                  "conditional exceedance exceeds p0=" + fmt(p0) +
                      " at every threshold in [" + fmt(kScanFloor * q0) + ", " +
                      fmt(q0) + "] for n=" + std::to_string(n) +
                      "; the prior upper bound sigma_hi=" + fmt(prior.sigma_hi()) +
                      " leaves too much mass on large scales for this n");
    }
  }

  CalibrationResult r;
  if (!unbounded) {
    const double resolution = kThresholdResolution * q0;
    std::uint32_t iterations = 0;
    while (hi - lo > resolution && p0 - ce_lo > tol) {
      if (iterations == kMaxBisections) {
        throw Error(ErrorCode::solver, "bisection did not terminate");
      }
      ++iterations;
      const double mid = 0.5 * (lo + hi);
      const double c = ce(mid);
      if (c <= p0) {
        lo = mid;
        ce_lo = c;
      } else {
        hi = mid;
      }
    }
    r.iterations = iterations;
    r.uncapped_threshold = lo;
  } else {
    hi = std::numeric_limits<double>::infinity();
  }

  if (cap_at_q0 && r.uncapped_threshold > q0) {
    r.threshold = q0;
    r.achieved = Probability(ce_q0);
    r.bracket_lo = q0;
    r.bracket_hi = hi;
    r.capped = true;
  } else {
    r.threshold = lo;
    r.achieved = Probability(ce_lo);
    r.bracket_lo = lo;
    r.bracket_hi = hi;
  }
  return r;
}

StandardRule threshold_schedule(const SafetySpec& spec, const SigmaPrior& prior,
                                std::span<const std::uint64_t> n_list,
                                bool cap_at_q0, double tol) {
  if (n_list.empty()) throw_domain("threshold_schedule: n_list is empty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw_domain("threshold_schedule: n_list must be strictly increasing");
    }
  }
  std::vector<ScheduleEntry> entries;
  entries.reserve(n_list.size());
  for (const std::uint64_t n_prime : n_list) {
    const std::string where = "n'=" + std::to_string(n_prime) + ": ";
    try {
      entries.push_back(
          {n_prime, calibrate_threshold(spec, n_prime, prior, cap_at_q0, tol).threshold});
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(where + e.what(), e.best_estimate(), e.error_bound());
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
    if (entries.size() > 1 && entries.back().threshold < entries[entries.size() - 2].threshold) {
      throw Error(ErrorCode::solver,
                  where + "calibrated threshold decreased relative to the previous count");
    }
  }
  return StandardRule(std::move(entries));
}

Probability acceptance_probability(double sigma_true, double threshold,
                                   std::uint64_t n) {
  require_positive(sigma_true, "sigma_true");
  if (!std::isfinite(threshold)) throw_domain("threshold must be finite");
  if (n == 0) throw_domain("acceptance_probability: n must be at least 1");
  return Probability(std::exp(log_cdf_power(threshold / sigma_true, n)));
}

ComplianceDecision evaluate_compliance(const StandardRule& rule,
                                       std::span<const double> measurements) {
  if (measurements.empty()) {
    throw Error(ErrorCode::insufficient_data, "no measurements given");
  }
  double observed_max = -std::numeric_limits<double>::infinity();
  for (const double x : measurements) {
    if (!std::isfinite(x)) throw_domain("measurements must be finite");
    observed_max = std::max(observed_max, x);
  }
  ComplianceDecision d;
  d.entry_index = rule.entry_index_for(measurements.size());
  d.applied = rule.schedule()[d.entry_index];
  d.observed_max = observed_max;
  d.safe = observed_max <= d.applied.threshold;
  return d;
}

}  // namespace overmeasure
