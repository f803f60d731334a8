#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "overmeasure/calibration.hpp"
#include "overmeasure/error.hpp"
#include "overmeasure/gaussian.hpp"
#include "overmeasure/job.hpp"
#include "overmeasure/overmeasure.h"
#include "overmeasure/paradox.hpp"
#include "overmeasure/random.hpp"

struct om_rule {
  overmeasure::StandardRule rule;
};

struct om_job {
  overmeasure::JobSpec job;
};

namespace {

using namespace overmeasure;

thread_local std::string g_last_error;

om_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return OM_ERR_DOMAIN;
    case ErrorCode::convergence: return OM_ERR_CONVERGENCE;
    case ErrorCode::infeasible: return OM_ERR_INFEASIBLE;
    case ErrorCode::infeasible_conditioning: return OM_ERR_INFEASIBLE_CONDITIONING;
    case ErrorCode::solver: return OM_ERR_SOLVER;
    case ErrorCode::configuration: return OM_ERR_CONFIGURATION;
    case ErrorCode::insufficient_data: return OM_ERR_INSUFFICIENT_DATA;
    case ErrorCode::parse: return OM_ERR_PARSE;
    case ErrorCode::io: return OM_ERR_IO;
  }
  return OM_ERR_INTERNAL;
}

om_status fail(om_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
om_status guarded(Body&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return OM_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OM_ERR_INTERNAL, "unknown error");
  }
}

std::optional<om_status> first_null(std::initializer_list<std::pair<const void*, const char*>> ptrs) {
  for (const auto& [p, name] : ptrs) {
    if (p == nullptr) return fail(OM_ERR_NULL_ARGUMENT, std::string(name) + " is NULL");
  }
  return std::nullopt;
}

#define OM_REQUIRE(...)                                          \
  do {                                                           \
    if (auto bad = first_null({__VA_ARGS__})) return *bad;      \
  } while (0)
#define OM_ARG(p) std::pair<const void*, const char*>{p, #p}

SafetySpec to_spec(const om_safety_spec& s) { return SafetySpec(s.q0, s.p0); }

SigmaPrior to_prior(const om_sigma_prior& p) {
  switch (p.kind) {
    case OM_PRIOR_LOG_UNIFORM: return SigmaPrior::log_uniform(p.sigma_lo, p.sigma_hi);
    case OM_PRIOR_POINT:
      if (p.sigma_lo != p.sigma_hi) throw_domain("point prior needs sigma_lo == sigma_hi");
      return SigmaPrior::point(p.sigma_lo);
  }
  throw_domain("unknown prior kind");
}

om_sigma_prior from_prior(const SigmaPrior& p) {
  return {p.kind() == PriorKind::point ? OM_PRIOR_POINT : OM_PRIOR_LOG_UNIFORM, p.sigma_lo(),
          p.sigma_hi()};
}

SeededStream to_stream(const om_stream& s) { return {s.seed, s.stream_index}; }

om_simulation_report from_report(const SimulationReport& r) {
  return {r.estimate.value(), r.standard_error, r.trials, r.accepted_runs};
}

std::span<const std::uint64_t> counts(const uint64_t* data, size_t count) {
  return {reinterpret_cast<const std::uint64_t*>(data), count};
}

}  // namespace

extern "C" {

const char* om_version(void) { return "0.1.0"; }

const char* om_status_name(om_status status) {
  switch (status) {
    case OM_OK: return "ok";
    case OM_ERR_DOMAIN: return "domain";
    case OM_ERR_CONVERGENCE: return "convergence";
    case OM_ERR_INFEASIBLE: return "infeasible";
    case OM_ERR_INFEASIBLE_CONDITIONING: return "infeasible_conditioning";
    case OM_ERR_SOLVER: return "solver";
    case OM_ERR_CONFIGURATION: return "configuration";
    case OM_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case OM_ERR_PARSE: return "parse";
    case OM_ERR_IO: return "io";
    case OM_ERR_NULL_ARGUMENT: return "null_argument";
    case OM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* om_last_error(void) { return g_last_error.c_str(); }

om_status om_std_normal_cdf(double x, double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = std_normal_cdf(x); });
}

om_status om_std_normal_quantile(double p, double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = std_normal_quantile(p); });
}

om_status om_log_cdf_power(double x, uint64_t n, double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = log_cdf_power(x, n); });
}

om_status om_next_exceeds_max_probability(uint64_t n, double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = next_exceeds_max_probability(n); });
}

om_status om_marginal_exceedance(const om_safety_spec* spec, double sigma, double* out) {
  OM_REQUIRE(OM_ARG(spec), OM_ARG(out));
  return guarded([&] { *out = marginal_exceedance(to_spec(*spec), sigma); });
}

om_status om_conditional_exceedance(const om_safety_spec* spec, double threshold,
                                    uint64_t n, const om_sigma_prior* prior, double* out) {
  OM_REQUIRE(OM_ARG(spec), OM_ARG(prior), OM_ARG(out));
  return guarded([&] {
    *out = conditional_exceedance(to_spec(*spec), threshold, n, to_prior(*prior));
  });
}

om_status om_calibrate_threshold(const om_safety_spec* spec, uint64_t n,
                                 const om_sigma_prior* prior, int cap_at_q0, double tol,
                                 om_calibration_result* out) {
  OM_REQUIRE(OM_ARG(spec), OM_ARG(prior), OM_ARG(out));
  return guarded([&] {
    const CalibrationResult r =
        calibrate_threshold(to_spec(*spec), n, to_prior(*prior), cap_at_q0 != 0, tol);
    *out = {r.threshold,  r.achieved.value(), r.iterations,          r.bracket_lo,
            r.bracket_hi, r.capped ? 1 : 0,   r.uncapped_threshold};
  });
}

om_status om_threshold_schedule(const om_safety_spec* spec, const om_sigma_prior* prior,
                                const uint64_t* n_list, size_t count, int cap_at_q0,
                                double tol, om_rule** out) {
  OM_REQUIRE(OM_ARG(spec), OM_ARG(prior), OM_ARG(n_list), OM_ARG(out));
  return guarded([&] {
    *out = new om_rule{threshold_schedule(to_spec(*spec), to_prior(*prior),
                                          counts(n_list, count), cap_at_q0 != 0, tol)};
  });
}

om_status om_acceptance_probability(double sigma_true, double threshold, uint64_t n,
                                    double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = acceptance_probability(sigma_true, threshold, n); });
}

om_status om_rule_create(const uint64_t* n_primes, const double* thresholds, size_t count,
                         om_rule** out) {
  OM_REQUIRE(OM_ARG(n_primes), OM_ARG(thresholds), OM_ARG(out));
  return guarded([&] {
    std::vector<ScheduleEntry> entries(count);
    for (size_t i = 0; i < count; ++i) entries[i] = {n_primes[i], thresholds[i]};
    *out = new om_rule{StandardRule(std::move(entries))};
  });
}

void om_rule_destroy(om_rule* rule) { delete rule; }

size_t om_rule_size(const om_rule* rule) {
  return rule ? rule->rule.schedule().size() : 0;
}

om_status om_rule_entry(const om_rule* rule, size_t index, uint64_t* n_prime,
                        double* threshold) {
  OM_REQUIRE(OM_ARG(rule), OM_ARG(n_prime), OM_ARG(threshold));
  const auto schedule = rule->rule.schedule();
  if (index >= schedule.size()) {
    return fail(OM_ERR_DOMAIN, "rule entry index " + std::to_string(index) + " out of range");
  }
  *n_prime = schedule[index].n_prime;
  *threshold = schedule[index].threshold;
  g_last_error.clear();
  return OM_OK;
}

om_status om_evaluate_compliance(const om_rule* rule, const double* measurements,
                                 size_t count, om_compliance* out) {
  OM_REQUIRE(OM_ARG(rule), OM_ARG(out));
  if (count > 0) OM_REQUIRE(OM_ARG(measurements));
  return guarded([&] {
    const ComplianceDecision d =
        evaluate_compliance(rule->rule, std::span<const double>(measurements, count));
    *out = {d.safe ? 1 : 0, d.entry_index, d.applied.n_prime, d.applied.threshold,
            d.observed_max};
  });
}

om_status om_sample_standard_normal(const om_stream* stream, double* out, size_t count) {
  OM_REQUIRE(OM_ARG(stream), OM_ARG(out));
  return guarded([&] {
    const std::vector<double> draws = sample_standard_normal(to_stream(*stream), count);
    std::memcpy(out, draws.data(), count * sizeof(double));
  });
}

om_status om_simulate_minimal_effort(uint64_t n, uint64_t trials, const om_stream* stream,
                                     om_simulation_report* out) {
  OM_REQUIRE(OM_ARG(stream), OM_ARG(out));
  return guarded([&] {
    *out = from_report(
        simulate_minimal_effort(n, trials, to_stream(*stream), stream->workers));
  });
}

om_status om_simulate_compliance(const om_rule* rule, om_design_mode mode, double sigma_true,
                                 uint64_t n_performed, om_rule_kind rule_kind,
                                 uint64_t trials, const om_stream* stream,
                                 om_simulation_report* out) {
  OM_REQUIRE(OM_ARG(rule), OM_ARG(stream), OM_ARG(out));
  return guarded([&] {
    const DesignScenario scenario{
        mode == OM_DESIGN_MINIMAL_EFFORT ? DesignMode::minimal_effort : DesignMode::fixed_sigma,
        sigma_true, rule->rule, n_performed, trials, to_stream(*stream)};
    *out = from_report(simulate_compliance(
        scenario, rule_kind == OM_RULE_SCHEDULE ? RuleKind::schedule : RuleKind::fixed_threshold,
        stream->workers));
  });
}

om_status om_paradox_curve(double sigma_true, const om_rule* rule, const uint64_t* n_list,
                           size_t count, uint64_t trials, const om_stream* stream,
                           om_paradox_row* rows) {
  OM_REQUIRE(OM_ARG(rule), OM_ARG(n_list), OM_ARG(stream), OM_ARG(rows));
  return guarded([&] {
    const auto curve = paradox_curve(sigma_true, rule->rule, counts(n_list, count), trials,
                                     to_stream(*stream), stream->workers);
    for (size_t i = 0; i < curve.size(); ++i) {
      rows[i] = {curve[i].n_prime, from_report(curve[i].rejection_fixed),
                 from_report(curve[i].rejection_schedule)};
    }
  });
}

om_status om_simulate_conditional_exceedance(const om_safety_spec* spec,
                                             const om_sigma_prior* prior, double threshold,
                                             uint64_t n, uint64_t trials,
                                             const om_stream* stream,
                                             om_simulation_report* out) {
  OM_REQUIRE(OM_ARG(spec), OM_ARG(prior), OM_ARG(stream), OM_ARG(out));
  return guarded([&] {
    *out = from_report(simulate_conditional_exceedance(to_spec(*spec), to_prior(*prior),
                                                       threshold, n, trials,
                                                       to_stream(*stream), stream->workers));
  });
}

om_status om_expected_max(uint64_t n, double sigma, om_expected_max_method method,
                          uint64_t trials, const om_stream* stream, double* value,
                          double* standard_error) {
  OM_REQUIRE(OM_ARG(value));
  if (method == OM_EXPECTED_MAX_MONTE_CARLO) OM_REQUIRE(OM_ARG(stream));
  return guarded([&] {
    ExpectedMax r;
    switch (method) {
      case OM_EXPECTED_MAX_GAMMA_PREFACTOR:
        r = expected_max(n, sigma, ExpectedMaxMethod::gamma_prefactor);
        break;
      case OM_EXPECTED_MAX_EXACT:
        r = expected_max(n, sigma, ExpectedMaxMethod::exact);
        break;
      case OM_EXPECTED_MAX_MONTE_CARLO:
        r = expected_max(n, sigma, ExpectedMaxMethod::monte_carlo, trials,
                         to_stream(*stream), stream->workers);
        break;
      default:
        throw_domain("unknown expected_max method");
    }
    *value = r.value;
    if (standard_error) *standard_error = r.standard_error;
  });
}

om_status om_euler_gamma_partial(uint64_t n, double* out) {
  OM_REQUIRE(OM_ARG(out));
  return guarded([&] { *out = euler_gamma_partial(n); });
}

om_status om_job_parse(const char* text, om_job** out) {
  OM_REQUIRE(OM_ARG(text), OM_ARG(out));
  return guarded([&] { *out = new om_job{parse_job(text)}; });
}

om_status om_job_load(const char* path, om_job** out) {
  OM_REQUIRE(OM_ARG(path), OM_ARG(out));
  return guarded([&] { *out = new om_job{load_job(path)}; });
}

void om_job_destroy(om_job* job) { delete job; }

om_status om_job_serialize(const om_job* job, char** out) {
  OM_REQUIRE(OM_ARG(job), OM_ARG(out));
  return guarded([&] {
    const std::string text = serialize_job(job->job);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

void om_string_free(char* s) { delete[] s; }

om_status om_job_spec(const om_job* job, om_safety_spec* out) {
  OM_REQUIRE(OM_ARG(job), OM_ARG(out));
  *out = {job->job.spec.q0(), job->job.spec.p0().value()};
  return OM_OK;
}

om_status om_job_prior(const om_job* job, om_sigma_prior* out) {
  OM_REQUIRE(OM_ARG(job), OM_ARG(out));
  *out = from_prior(job->job.prior);
  return OM_OK;
}

uint64_t om_job_n_required(const om_job* job) { return job ? job->job.n_required : 0; }

const uint64_t* om_job_n_list(const om_job* job, size_t* count) {
  if (!job) {
    if (count) *count = 0;
    return nullptr;
  }
  if (count) *count = job->job.n_list.size();
  return reinterpret_cast<const uint64_t*>(job->job.n_list.data());
}

int om_job_cap_at_q0(const om_job* job) { return job && job->job.cap_at_q0 ? 1 : 0; }
double om_job_tol(const om_job* job) {
  return job ? job->job.tol : std::numeric_limits<double>::quiet_NaN();
}
uint64_t om_job_trials(const om_job* job) { return job ? job->job.trials : 0; }
uint64_t om_job_seed(const om_job* job) { return job ? job->job.seed : 0; }

om_status om_job_set_trials(om_job* job, uint64_t trials) {
  OM_REQUIRE(OM_ARG(job));
  if (trials == 0) return fail(OM_ERR_DOMAIN, "trials must be at least 1");
  job->job.trials = trials;
  return OM_OK;
}

void om_job_set_seed(om_job* job, uint64_t seed) {
  if (job) job->job.seed = seed;
}

}  // extern "C"
