#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "overmeasure/overmeasure.h"

namespace {

const om_safety_spec kSpec{1.0, 0.01};
const om_sigma_prior kPrior{OM_PRIOR_LOG_UNIFORM, 0.01, 10.0};

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(om_status_name(OM_OK)) == "ok");
  CHECK(std::string(om_status_name(OM_ERR_INFEASIBLE_CONDITIONING)) == "infeasible_conditioning");
  CHECK(std::string(om_status_name(static_cast<om_status>(99))) == "unknown");
  CHECK(std::string(om_version()) == "0.1.0");

  double out = 123.0;
  CHECK(om_std_normal_quantile(1.5, &out) == OM_ERR_DOMAIN);
  CHECK(out == 123.0);  // untouched on failure
  CHECK(std::string(om_last_error()).find("quantile") != std::string::npos);
  CHECK(om_std_normal_cdf(0.0, nullptr) == OM_ERR_NULL_ARGUMENT);
  CHECK(std::string(om_last_error()).find("NULL") != std::string::npos);
}

TEST_CASE("gaussian entry points") {
  double v = 0.0;
  REQUIRE(om_std_normal_cdf(1.0, &v) == OM_OK);
  CHECK(v == doctest::Approx(0.84134474606854294859).epsilon(1e-14));
  REQUIRE(om_std_normal_quantile(0.975, &v) == OM_OK);
  CHECK(v == doctest::Approx(1.9599639845400542355).epsilon(1e-14));
  REQUIRE(om_log_cdf_power(2.0, 40, &v) == OM_OK);
  CHECK(v == doctest::Approx(-0.92051637315853953861).epsilon(1e-13));
}

TEST_CASE("calibration entry points") {
  double v = 0.0;
  REQUIRE(om_conditional_exceedance(&kSpec, 1.0, 40, &kPrior, &v) == OM_OK);
  CHECK(v == doctest::Approx(0.00128630490676937).epsilon(1e-9));
  REQUIRE(om_marginal_exceedance(&kSpec, 1.0, &v) == OM_OK);
  CHECK(v == doctest::Approx(0.15865525393145705).epsilon(1e-13));
  REQUIRE(om_next_exceeds_max_probability(40, &v) == OM_OK);
  CHECK(v == doctest::Approx(1.0 / 41.0));
  REQUIRE(om_acceptance_probability(1.0, 3.2, 40, &v) == OM_OK);
  CHECK(v == doctest::Approx(0.97287958097461643273).epsilon(1e-13));

  om_calibration_result r{};
  REQUIRE(om_calibrate_threshold(&kSpec, 40, &kPrior, 0, 1e-12, &r) == OM_OK);
  CHECK(r.threshold == doctest::Approx(1.79974197173).epsilon(1e-8));
  CHECK(r.capped == 0);
  REQUIRE(om_calibrate_threshold(&kSpec, 40, &kPrior, 1, 1e-4, &r) == OM_OK);
  CHECK(r.capped == 1);
  CHECK(r.threshold == 1.0);

  const om_sigma_prior point_bad{OM_PRIOR_POINT, 1.0, 1.0};
  CHECK(om_calibrate_threshold(&kSpec, 40, &point_bad, 1, 1e-4, &r) == OM_ERR_INFEASIBLE);
  const om_sigma_prior point_mismatch{OM_PRIOR_POINT, 1.0, 2.0};
  CHECK(om_calibrate_threshold(&kSpec, 40, &point_mismatch, 1, 1e-4, &r) == OM_ERR_DOMAIN);
  const om_sigma_prior bad_kind{static_cast<om_prior_kind>(7), 1.0, 2.0};
  CHECK(om_calibrate_threshold(&kSpec, 40, &bad_kind, 1, 1e-4, &r) == OM_ERR_DOMAIN);
  CHECK(om_conditional_exceedance(&kSpec, -50.0, 1000000, &kPrior, &v) ==
        OM_ERR_INFEASIBLE_CONDITIONING);
}

TEST_CASE("rule handles") {
  const uint64_t ns[] = {40, 80, 160};
  om_rule* rule = nullptr;
  REQUIRE(om_threshold_schedule(&kSpec, &kPrior, ns, 3, 0, 1e-4, &rule) == OM_OK);
  REQUIRE(rule != nullptr);
  CHECK(om_rule_size(rule) == 3);
  uint64_t n = 0;
  double t = 0.0, prev = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    REQUIRE(om_rule_entry(rule, i, &n, &t) == OM_OK);
    CHECK(n == ns[i]);
    CHECK(t >= prev);
    prev = t;
  }
  CHECK(om_rule_entry(rule, 3, &n, &t) == OM_ERR_DOMAIN);

  const double safe_run[] = {0.1, 0.5, 1.0, -0.3, 0.2};
  om_compliance c{};
  CHECK(om_evaluate_compliance(rule, safe_run, 5, &c) == OM_ERR_INSUFFICIENT_DATA);
  std::vector<double> many(100, 0.5);
  many[17] = 1.9;
  REQUIRE(om_evaluate_compliance(rule, many.data(), many.size(), &c) == OM_OK);
  CHECK(c.entry_index == 1);
  CHECK(c.applied_n_prime == 80);
  CHECK(c.observed_max == 1.9);
  CHECK(c.safe == (1.9 <= c.applied_threshold));
  om_rule_destroy(rule);
  om_rule_destroy(nullptr);

  const uint64_t bad_n[] = {10, 5};
  const double bad_t[] = {1.0, 2.0};
  rule = nullptr;
  CHECK(om_rule_create(bad_n, bad_t, 2, &rule) == OM_ERR_DOMAIN);
  CHECK(rule == nullptr);
  CHECK(om_rule_size(nullptr) == 0);

  const uint64_t one[] = {40};
  CHECK(om_threshold_schedule(&kSpec, &kPrior, one, 0, 1, 1e-4, &rule) == OM_ERR_DOMAIN);
}

TEST_CASE("Monte Carlo entry points are deterministic across workers") {
  om_stream s1{11, 0, 1};
  om_stream s4{11, 0, 4};
  om_simulation_report a{}, b{};
  REQUIRE(om_simulate_minimal_effort(40, 20000, &s1, &a) == OM_OK);
  REQUIRE(om_simulate_minimal_effort(40, 20000, &s4, &b) == OM_OK);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  CHECK(a.trials == 20000);

  double draws[8];
  REQUIRE(om_sample_standard_normal(&s1, draws, 8) == OM_OK);
  double again[8];
  REQUIRE(om_sample_standard_normal(&s4, again, 8) == OM_OK);
  CHECK(std::memcmp(draws, again, sizeof draws) == 0);
  CHECK(om_sample_standard_normal(&s1, draws, 0) == OM_ERR_DOMAIN);

  REQUIRE(om_simulate_conditional_exceedance(&kSpec, &kPrior, 1.5, 20, 10000, &s1, &a) == OM_OK);
  CHECK(a.accepted_runs > 0);

  double value = 0.0, se = -1.0;
  REQUIRE(om_expected_max(2, 1.0, OM_EXPECTED_MAX_EXACT, 0, nullptr, &value, &se) == OM_OK);
  CHECK(value == doctest::Approx(0.56418958354775628695).epsilon(1e-12));
  CHECK(se == 0.0);
  CHECK(om_expected_max(2, 1.0, OM_EXPECTED_MAX_MONTE_CARLO, 100, nullptr, &value, nullptr) ==
        OM_ERR_NULL_ARGUMENT);
  REQUIRE(om_expected_max(10, 1.0, OM_EXPECTED_MAX_MONTE_CARLO, 1000, &s1, &value, nullptr) ==
          OM_OK);
  CHECK(om_expected_max(10, 1.0, static_cast<om_expected_max_method>(9), 0, nullptr, &value,
                        nullptr) == OM_ERR_DOMAIN);
  REQUIRE(om_euler_gamma_partial(1000000, &value) == OM_OK);
  CHECK(value == doctest::Approx(0.57721616490144952727).epsilon(1e-12));
}

TEST_CASE("compliance simulations and paradox rows") {
  const uint64_t ns[] = {10, 40};
  const double ts[] = {1.5, 2.0};
  om_rule* rule = nullptr;
  REQUIRE(om_rule_create(ns, ts, 2, &rule) == OM_OK);
  om_stream s{3, 0, 0};
  om_simulation_report r{};
  REQUIRE(om_simulate_compliance(rule, OM_DESIGN_FIXED_SIGMA, 0.7, 40, OM_RULE_SCHEDULE, 20000,
                                 &s, &r) == OM_OK);
  double accept = 0.0;
  REQUIRE(om_acceptance_probability(0.7, 2.0, 40, &accept) == OM_OK);
  CHECK(std::abs(r.estimate - (1.0 - accept)) <= 4.0 * r.standard_error);
  CHECK(om_simulate_compliance(rule, OM_DESIGN_MINIMAL_EFFORT, 0.7, 5, OM_RULE_SCHEDULE, 100, &s,
                               &r) == OM_ERR_CONFIGURATION);

  om_paradox_row rows[2];
  REQUIRE(om_paradox_curve(0.7, rule, ns, 2, 5000, &s, rows) == OM_OK);
  CHECK(rows[0].n_prime == 10);
  CHECK(rows[1].n_prime == 40);
  CHECK(rows[1].rejection_fixed.estimate > rows[1].rejection_schedule.estimate);
  om_rule_destroy(rule);
}

TEST_CASE("job handles") {
  om_job* job = nullptr;
  CHECK(om_job_parse("{\"q0\": 1, \"oops\": 2}", &job) == OM_ERR_PARSE);
  CHECK(job == nullptr);
  CHECK(om_job_load("/nonexistent.json", &job) == OM_ERR_IO);
  CHECK(om_job_parse("{\"q0\": -1}", &job) == OM_ERR_DOMAIN);

  REQUIRE(om_job_parse("{\"q0\": 2, \"n\": 5, \"seed\": 77}", &job) == OM_OK);
  om_safety_spec spec{};
  REQUIRE(om_job_spec(job, &spec) == OM_OK);
  CHECK(spec.q0 == 2.0);
  CHECK(spec.p0 == 0.01);
  om_sigma_prior prior{};
  REQUIRE(om_job_prior(job, &prior) == OM_OK);
  CHECK(prior.kind == OM_PRIOR_LOG_UNIFORM);
  CHECK(prior.sigma_lo == doctest::Approx(0.02));
  CHECK(om_job_n_required(job) == 5);
  size_t count = 0;
  const uint64_t* list = om_job_n_list(job, &count);
  REQUIRE(count == 5);
  CHECK(list[4] == 80);
  CHECK(om_job_cap_at_q0(job) == 1);
  CHECK(om_job_tol(job) == 1e-4);
  CHECK(om_job_trials(job) == 100000);
  CHECK(om_job_seed(job) == 77);

  om_job_set_seed(job, 5);
  CHECK(om_job_set_trials(job, 0) == OM_ERR_DOMAIN);
  REQUIRE(om_job_set_trials(job, 42) == OM_OK);

  char* text = nullptr;
  REQUIRE(om_job_serialize(job, &text) == OM_OK);
  om_job* back = nullptr;
  REQUIRE(om_job_parse(text, &back) == OM_OK);
  CHECK(om_job_seed(back) == 5);
  CHECK(om_job_trials(back) == 42);
  char* text2 = nullptr;
  REQUIRE(om_job_serialize(back, &text2) == OM_OK);
  CHECK(std::string(text) == std::string(text2));
  om_string_free(text);
  om_string_free(text2);
  om_job_destroy(back);
  om_job_destroy(job);
  om_job_destroy(nullptr);
}
