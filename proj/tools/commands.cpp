#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "overmeasure/overmeasure.h"

namespace overmeasure::cli {

namespace {

// Carries an exit status out of a command body.
class CommandError : public std::runtime_error {
 public:
  CommandError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

int exit_status_for(om_status s) {
  switch (s) {
    case OM_OK:
      return kExitOk;
    case OM_ERR_INFEASIBLE:
    case OM_ERR_INFEASIBLE_CONDITIONING:
      return kExitInfeasible;
    default:
      return kExitInputError;
  }
}

void check(om_status s) {
  if (s != OM_OK) {
    throw CommandError(exit_status_for(s),
                       std::string(om_status_name(s)) + ": " + om_last_error());
  }
}

[[noreturn]] void input_error(const std::string& message) {
  throw CommandError(kExitInputError, message);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct JobDeleter {
  void operator()(om_job* j) const { om_job_destroy(j); }
};
struct RuleDeleter {
  void operator()(om_rule* r) const { om_rule_destroy(r); }
};
using JobPtr = std::unique_ptr<om_job, JobDeleter>;
using RulePtr = std::unique_ptr<om_rule, RuleDeleter>;

struct Options {
  std::string job_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out_path;
  std::string method = "all";
  std::string mode = "minimal_effort";
  std::string schedule_path;
  std::optional<double> sigma_true;
  std::uint64_t n = 0;
  double sigma = 1.0;
  unsigned workers = 0;
};

JobPtr load_job(const Options& o) {
  if (o.job_path.empty()) input_error("--job is required");
  om_job* raw = nullptr;
  check(om_job_load(o.job_path.c_str(), &raw));
  JobPtr job(raw);
  if (o.seed) om_job_set_seed(job.get(), *o.seed);
  if (o.trials) check(om_job_set_trials(job.get(), *o.trials));
  return job;
}

om_stream stream_for(const om_job* job, std::uint64_t index, unsigned workers) {
  return {om_job_seed(job), index, workers};
}

std::vector<std::uint64_t> n_list_of(const om_job* job) {
  std::size_t count = 0;
  const std::uint64_t* list = om_job_n_list(job, &count);
  return {list, list + count};
}

RulePtr schedule_for(const om_job* job) {
  om_safety_spec spec;
  om_sigma_prior prior;
  check(om_job_spec(job, &spec));
  check(om_job_prior(job, &prior));
  const auto list = n_list_of(job);
  om_rule* raw = nullptr;
  check(om_threshold_schedule(&spec, &prior, list.data(), list.size(), om_job_cap_at_q0(job),
                              om_job_tol(job), &raw));
  return RulePtr(raw);
}

void cmd_calibrate(const Options& o, std::ostream& out) {
  const JobPtr job = load_job(o);
  om_safety_spec spec;
  om_sigma_prior prior;
  check(om_job_spec(job.get(), &spec));
  check(om_job_prior(job.get(), &prior));
  om_calibration_result r;
  check(om_calibrate_threshold(&spec, om_job_n_required(job.get()), &prior,
                               om_job_cap_at_q0(job.get()), om_job_tol(job.get()), &r));
  out << "n,threshold,achieved,capped,iterations,bracket_lo,bracket_hi,uncapped_threshold\n"
      << om_job_n_required(job.get()) << ',' << num(r.threshold) << ',' << num(r.achieved)
      << ',' << (r.capped ? "true" : "false") << ',' << r.iterations << ','
      << num(r.bracket_lo) << ',' << num(r.bracket_hi) << ',' << num(r.uncapped_threshold)
      << '\n';
}

void cmd_schedule(const Options& o, std::ostream& out) {
  const JobPtr job = load_job(o);
  const RulePtr rule = schedule_for(job.get());
  out << "n_prime,t\n";
  for (std::size_t i = 0; i < om_rule_size(rule.get()); ++i) {
    std::uint64_t n_prime = 0;
    double t = 0.0;
    check(om_rule_entry(rule.get(), i, &n_prime, &t));
    out << n_prime << ',' << num(t) << '\n';
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_cell(const std::string& cell, std::size_t line_no) {
  std::istringstream in(cell);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    input_error("schedule line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
  }
  return value;
}

struct ScheduleRows {
  std::vector<std::uint64_t> n_primes;
  std::vector<double> thresholds;
};

// Reads the `n_prime,t` table written by `schedule`; extra columns are ignored.
ScheduleRows read_schedule(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&] {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) input_error("schedule is empty");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "n_prime" || header[1] != "t") {
    input_error("schedule header must start with 'n_prime,t'");
  }
  ScheduleRows rows;
  while (next_line()) {
    const auto cells = split_csv(line);
    if (cells.size() < 2) {
      input_error("schedule line " + std::to_string(line_no) + ": expected n_prime,t");
    }
    const auto n_prime = parse_cell<std::uint64_t>(cells[0], line_no);
    const auto t = parse_cell<double>(cells[1], line_no);
    if (!rows.n_primes.empty() && n_prime <= rows.n_primes.back()) {
      input_error("schedule line " + std::to_string(line_no) +
                  ": n_prime must be strictly increasing");
    }
    rows.n_primes.push_back(n_prime);
    rows.thresholds.push_back(t);
  }
  if (rows.n_primes.empty()) input_error("schedule has no rows");
  return rows;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const JobPtr job = load_job(o);
  if (o.schedule_path.empty()) input_error("--schedule is required");
  ScheduleRows rows;
  if (o.schedule_path == "-") {
    rows = read_schedule(std::cin);
  } else {
    std::ifstream file(o.schedule_path);
    if (!file) input_error("cannot open schedule '" + o.schedule_path + "'");
    rows = read_schedule(file);
  }
  // Validates ordering and finiteness the same way the library does.
  om_rule* raw = nullptr;
  check(om_rule_create(rows.n_primes.data(), rows.thresholds.data(), rows.n_primes.size(),
                       &raw));
  const RulePtr rule(raw);

  om_safety_spec spec;
  om_sigma_prior prior;
  check(om_job_spec(job.get(), &spec));
  check(om_job_prior(job.get(), &prior));

  bool all_pass = true;
  out << "n_prime,t,estimate,standard_error,kept_runs,pass\n";
  for (std::size_t i = 0; i < rows.n_primes.size(); ++i) {
    const om_stream stream = stream_for(job.get(), kVerifyStreamBase + i, o.workers);
    om_simulation_report r;
    check(om_simulate_conditional_exceedance(&spec, &prior, rows.thresholds[i],
                                             rows.n_primes[i], om_job_trials(job.get()),
                                             &stream, &r));
    const bool pass = r.accepted_runs > 0 && r.estimate - 4.0 * r.standard_error <= spec.p0;
    all_pass = all_pass && pass;
    out << rows.n_primes[i] << ',' << num(rows.thresholds[i]) << ',' << num(r.estimate) << ','
        << num(r.standard_error) << ',' << r.accepted_runs << ',' << (pass ? "true" : "false")
        << '\n';
  }
  return all_pass ? kExitOk : kExitVerificationFailed;
}

void simulate_minimal_effort(const Options& o, const om_job* job, std::ostream& out) {
  out << "n,estimate,standard_error,expected\n";
  const auto list = n_list_of(job);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const om_stream stream = stream_for(job, kMinimalEffortStreamBase + i, o.workers);
    om_simulation_report r;
    check(om_simulate_minimal_effort(list[i], om_job_trials(job), &stream, &r));
    double expected = 0.0;
    check(om_next_exceeds_max_probability(list[i], &expected));
    out << list[i] << ',' << num(r.estimate) << ',' << num(r.standard_error) << ','
        << num(expected) << '\n';
  }
}

void simulate_paradox(const Options& o, const om_job* job, std::ostream& out,
                      std::ostream& err) {
  const RulePtr rule = schedule_for(job);
  std::uint64_t n_req = 0;
  double t_req = 0.0;
  check(om_rule_entry(rule.get(), 0, &n_req, &t_req));

  double sigma_true = 0.0;
  if (o.sigma_true) {
    sigma_true = *o.sigma_true;
  } else {
    // Φ(t/σ)^n_req = target  ⇔  t/σ = Φ⁻¹(target^(1/n_req))
    double z = 0.0;
    check(om_std_normal_quantile(
        std::pow(kParadoxTargetAcceptance, 1.0 / static_cast<double>(n_req)), &z));
    sigma_true = t_req / z;
    err << "sigma_true=" << num(sigma_true) << " (fixed-rule acceptance "
        << num(kParadoxTargetAcceptance) << " at n=" << n_req << ")\n";
  }

  const auto list = n_list_of(job);
  std::vector<om_paradox_row> rows(list.size());
  const om_stream stream = stream_for(job, kParadoxStreamBase, o.workers);
  check(om_paradox_curve(sigma_true, rule.get(), list.data(), list.size(), om_job_trials(job),
                         &stream, rows.data()));

  out << "n_prime,rejection_fixed,se_fixed,rejection_schedule,se_schedule,"
         "expected_fixed,expected_schedule\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::uint64_t n_prime = 0;
    double t = 0.0;
    check(om_rule_entry(rule.get(), i, &n_prime, &t));
    double accept_fixed = 0.0;
    double accept_schedule = 0.0;
    check(om_acceptance_probability(sigma_true, t_req, n_prime, &accept_fixed));
    check(om_acceptance_probability(sigma_true, t, n_prime, &accept_schedule));
    const om_paradox_row& r = rows[i];
    out << r.n_prime << ',' << num(r.rejection_fixed.estimate) << ','
        << num(r.rejection_fixed.standard_error) << ',' << num(r.rejection_schedule.estimate)
        << ',' << num(r.rejection_schedule.standard_error) << ',' << num(1.0 - accept_fixed)
        << ',' << num(1.0 - accept_schedule) << '\n';
  }
}

void cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const JobPtr job = load_job(o);
  if (o.mode == "minimal_effort") {
    simulate_minimal_effort(o, job.get(), out);
  } else if (o.mode == "paradox") {
    simulate_paradox(o, job.get(), out, err);
  } else {
    input_error("unknown --mode '" + o.mode + "' (expected minimal_effort or paradox)");
  }
}

void cmd_expected_max(const Options& o, std::ostream& out) {
  if (o.n == 0) input_error("--n must be at least 1");
  // Monte Carlo draws follow the job when one is given, else the job defaults.
  std::uint64_t seed = 0;
  std::uint64_t trials = 100000;
  if (!o.job_path.empty()) {
    const JobPtr job = load_job(o);
    seed = om_job_seed(job.get());
    trials = om_job_trials(job.get());
  } else {
    if (o.seed) seed = *o.seed;
    if (o.trials) trials = *o.trials;
  }
  const om_stream stream{seed, kExpectedMaxStream, o.workers};

  auto value_of = [&](om_expected_max_method m, double* se) {
    double v = 0.0;
    check(om_expected_max(o.n, o.sigma, m, trials, &stream, &v, se));
    return v;
  };

  if (o.method == "gamma_prefactor") {
    out << num(value_of(OM_EXPECTED_MAX_GAMMA_PREFACTOR, nullptr)) << '\n';
  } else if (o.method == "exact") {
    out << num(value_of(OM_EXPECTED_MAX_EXACT, nullptr)) << '\n';
  } else if (o.method == "monte_carlo") {
    double se = 0.0;
    const double v = value_of(OM_EXPECTED_MAX_MONTE_CARLO, &se);
    out << num(v) << ',' << num(se) << '\n';
  } else if (o.method == "all") {
    const double prefactor = value_of(OM_EXPECTED_MAX_GAMMA_PREFACTOR, nullptr);
    const double exact = value_of(OM_EXPECTED_MAX_EXACT, nullptr);
    double se = 0.0;
    const double mc = value_of(OM_EXPECTED_MAX_MONTE_CARLO, &se);
    out << "gamma_prefactor=" << num(prefactor) << ",exact=" << num(exact)
        << ",monte_carlo=" << num(mc) << ",monte_carlo_se=" << num(se)
        << ",exact_over_prefactor=" << num(exact / prefactor)
        << ",prefactor_minus_exact=" << num(prefactor - exact) << '\n';
  } else {
    input_error("unknown --method '" + o.method +
                "' (expected gamma_prefactor, exact, monte_carlo or all)");
  }
}

void add_job_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--job", o.job_path, "Job file (JSON)");
  cmd->add_option("--seed", o.seed, "Override the job seed");
  cmd->add_option("--trials", o.trials, "Override the job trial count");
  cmd->add_option("--out", o.out_path, "Write the table here instead of stdout");
  cmd->add_option("--workers", o.workers, "Monte Carlo threads (0 = all cores)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold calibration for repeated-measurement safety standards",
               "overmeasure"};
  app.require_subcommand(1);
  Options o;

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate t(n) for the job's n");
  add_job_flags(calibrate, o);

  auto* schedule = app.add_subcommand("schedule", "Emit t(n') for every n' in n_list");
  add_job_flags(schedule, o);

  auto* verify =
      app.add_subcommand("verify", "Monte Carlo check of a schedule against p0");
  add_job_flags(verify, o);
  verify->add_option("--schedule", o.schedule_path, "Schedule CSV ('-' for stdin)")
      ->required();

  auto* simulate = app.add_subcommand("simulate", "Minimal-effort or paradox simulation");
  add_job_flags(simulate, o);
  simulate->add_option("--mode", o.mode, "minimal_effort or paradox");
  simulate->add_option("--sigma-true", o.sigma_true,
                       "True sigma for paradox mode (default: 90% acceptance at n)");

  auto* expected = app.add_subcommand("expected-max", "Expected maximum of n draws");
  add_job_flags(expected, o);
  expected->add_option("--n", o.n, "Number of draws")->required();
  expected->add_option("--sigma", o.sigma, "Standard deviation");
  expected->add_option("--method", o.method,
                       "gamma_prefactor, exact, monte_carlo or all");

  // CLI11 parses in reverse order from a vector of arguments.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  std::ofstream file;
  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot open '" << o.out_path << "' for writing\n";
      return kExitInputError;
    }
  }
  std::ostream& sink = o.out_path.empty() ? out : file;

  try {
    int status = kExitOk;
    if (*calibrate) {
      cmd_calibrate(o, sink);
    } else if (*schedule) {
      cmd_schedule(o, sink);
    } else if (*verify) {
      status = cmd_verify(o, sink);
    } else if (*simulate) {
      cmd_simulate(o, sink, err);
    } else if (*expected) {
      cmd_expected_max(o, sink);
    }
    sink.flush();
    if (status == kExitVerificationFailed) {
      err << "error: verification failed: at least one row exceeds p0 by more than 4 "
             "standard errors\n";
    }
    return status;
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.status();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace overmeasure::cli
