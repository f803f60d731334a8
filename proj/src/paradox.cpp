#include "overmeasure/paradox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "overmeasure/error.hpp"
#include "overmeasure/quadrature.hpp"

namespace overmeasure {

namespace {

SimulationReport binomial_report(const CountTally& tally, std::uint64_t trials) {
  SimulationReport r;
  r.trials = trials;
  r.accepted_runs = tally.trials;
  if (tally.trials == 0) {
    r.standard_error = std::numeric_limits<double>::infinity();
    return r;
  }
  const double p = static_cast<double>(tally.hits) / static_cast<double>(tally.trials);
  r.estimate = Probability(p);
  r.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(tally.trials));
  return r;
}

void require_trials(std::uint64_t trials) {
  if (trials == 0) throw_domain("trials must be at least 1");
}

double max_of(NormalGenerator& gen, std::uint64_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n; ++i) m = std::max(m, gen.normal());
  return m;
}

// True if any of `count` fresh draws exceeds `level`; stops at the first.
bool any_exceeds(NormalGenerator& gen, std::uint64_t count, double level) {
  for (std::uint64_t i = 0; i < count; ++i) {
    if (gen.normal() > level) return true;
  }
  return false;
}

}  // namespace

SimulationReport simulate_minimal_effort(std::uint64_t n, std::uint64_t trials,
                                         SeededStream stream, unsigned workers) {
  if (n == 0) throw_domain("simulate_minimal_effort: n must be at least 1");
  require_trials(trials);
  const auto tally = run_partitioned<CountTally>(
      trials, {stream, workers}, [n](NormalGenerator& gen, std::uint64_t count) {
        CountTally t{0, count};
        for (std::uint64_t i = 0; i < count; ++i) {
          const double sample_max = max_of(gen, n);
          if (gen.normal() > sample_max) ++t.hits;
        }
        return t;
      });
  return binomial_report(tally, trials);
}

SimulationReport simulate_compliance(const DesignScenario& scenario, RuleKind rule_kind,
                                     unsigned workers) {
  const StandardRule& rule = scenario.rule;
  const std::uint64_t n_req = rule.n_required();
  const std::uint64_t n_perf = scenario.n_performed;
  if (!(std::isfinite(scenario.sigma_true) && scenario.sigma_true > 0.0)) {
    throw_domain("sigma_true must be positive and finite");
  }
  require_trials(scenario.trials);
  if (n_perf < n_req) {
    throw Error(ErrorCode::configuration,
                "schedule has no entry for n'=" + std::to_string(n_perf) +
                    " (first entry is n=" + std::to_string(n_req) + ")");
  }
  const double applied = rule_kind == RuleKind::fixed_threshold
                             ? rule.threshold()
                             : rule.schedule()[rule.entry_index_for(n_perf)].threshold;
  const double sigma = scenario.sigma_true;

  CountTally tally;
  if (scenario.mode == DesignMode::fixed_sigma) {
    const double level = applied / sigma;
    tally = run_partitioned<CountTally>(
        scenario.trials, {scenario.stream, workers},
        [&](NormalGenerator& gen, std::uint64_t count) {
          CountTally t{0, count};
          for (std::uint64_t i = 0; i < count; ++i) {
            if (any_exceeds(gen, n_perf, level)) ++t.hits;
          }
          return t;
        });
  } else {
    // Level set so the first n_req draws peak exactly at t(n_req); the extra
    // draws fail if they clear that peak by more than the schedule's slack.
    const double slack = (applied - rule.threshold()) / sigma;
    tally = run_partitioned<CountTally>(
        scenario.trials, {scenario.stream, workers},
        [&](NormalGenerator& gen, std::uint64_t count) {
          CountTally t{0, count};
          for (std::uint64_t i = 0; i < count; ++i) {
            const double peak = max_of(gen, n_req);
            if (any_exceeds(gen, n_perf - n_req, peak + slack)) ++t.hits;
          }
          return t;
        });
  }
  return binomial_report(tally, scenario.trials);
}

std::vector<ParadoxRow> paradox_curve(double sigma_true, const StandardRule& rule,
                                      std::span<const std::uint64_t> n_list,
                                      std::uint64_t trials, SeededStream stream,
                                      unsigned workers) {
  std::vector<ParadoxRow> rows;
  rows.reserve(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    DesignScenario scenario{DesignMode::fixed_sigma, sigma_true, rule, n_list[i], trials,
                            {stream.seed, stream.stream_index + i}};
    rows.push_back({n_list[i], simulate_compliance(scenario, RuleKind::fixed_threshold, workers),
                    simulate_compliance(scenario, RuleKind::schedule, workers)});
  }
  return rows;
}

SimulationReport simulate_conditional_exceedance(const SafetySpec& spec,
                                                 const SigmaPrior& prior,
                                                 double threshold, std::uint64_t n,
                                                 std::uint64_t trials,
                                                 SeededStream stream,
                                                 unsigned workers) {
  if (n == 0) throw_domain("simulate_conditional_exceedance: n must be at least 1");
  if (!std::isfinite(threshold)) throw_domain("threshold must be finite");
  require_trials(trials);
  const bool is_point = prior.kind() == PriorKind::point;
  const double log_lo = std::log(prior.sigma_lo());
  const double log_span = std::log(prior.sigma_hi()) - log_lo;
  const double q0 = spec.q0();

  const auto tally = run_partitioned<CountTally>(
      trials, {stream, workers}, [&](NormalGenerator& gen, std::uint64_t count) {
        CountTally kept;
        for (std::uint64_t i = 0; i < count; ++i) {
          const double sigma =
              is_point ? prior.sigma_lo() : std::exp(log_lo + log_span * gen.uniform());
          if (any_exceeds(gen, n, threshold / sigma)) continue;
          ++kept.trials;
          if (gen.normal() > q0 / sigma) ++kept.hits;
        }
        return kept;
      });
  return binomial_report(tally, trials);
}

ExpectedMax expected_max(std::uint64_t n, double sigma, ExpectedMaxMethod method,
                         std::uint64_t trials, SeededStream stream, unsigned workers) {
  if (n == 0) throw_domain("expected_max: n must be at least 1");
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw_domain("expected_max: sigma must be positive and finite");
  }
  const double dn = static_cast<double>(n);

  switch (method) {
    case ExpectedMaxMethod::gamma_prefactor:
      if (n < 2) throw_domain("gamma_prefactor expected_max needs n >= 2 (ln n > 0)");
      return {kEulerGammaFourDigits * std::sqrt(2.0 * std::log(dn)) * sigma, 0.0};

    case ExpectedMaxMethod::exact: {
      // Density of the max is n·φ(x)·Φ(x)^(n-1); the two halves are
      // integrated separately so that n = 1 cancels cleanly.
      const double log_n = std::log(dn);
      const auto integrand = [&](double x) {
        if (x == 0.0) return 0.0;
        const double log_mag = std::log(std::abs(x)) + log_n - 0.5 * x * x - kLogSqrt2Pi +
                               (n > 1 ? log_cdf_power(x, n - 1) : 0.0);
        return std::copysign(std::exp(log_mag), x);
      };
      const double reach = 12.0 + std::sqrt(2.0 * log_n);
      QuadratureOptions options;
      options.abs_tol = 1e-15;
      const double lower = integrate_adaptive(integrand, -reach, 0.0, options).value;
      const double upper = integrate_adaptive(integrand, 0.0, reach, options).value;
      return {sigma * (lower + upper), 0.0};
    }

    case ExpectedMaxMethod::monte_carlo: {
      require_trials(trials);
      const auto tally = run_partitioned<MomentTally>(
          trials, {stream, workers}, [n](NormalGenerator& gen, std::uint64_t count) {
            MomentTally t;
            for (std::uint64_t i = 0; i < count; ++i) t.add(max_of(gen, n));
            return t;
          });
      const double m = static_cast<double>(tally.count);
      const double mean = tally.sum.value() / m;
      const double var =
          m > 1 ? std::max(0.0, (tally.sum_sq.value() - m * mean * mean) / (m - 1.0)) : 0.0;
      return {sigma * mean, sigma * std::sqrt(var / m)};
    }
  }
  throw_domain("expected_max: unknown method");
}

double euler_gamma_partial(std::uint64_t n) {
  if (n == 0) throw_domain("euler_gamma_partial: n must be at least 1");
  CompensatedSum harmonic;
  for (std::uint64_t k = n; k >= 1; --k) harmonic.add(1.0 / static_cast<double>(k));
  return harmonic.value() - std::log(static_cast<double>(n));
}

}  // namespace overmeasure
