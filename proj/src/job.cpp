#include "overmeasure/job.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "overmeasure/error.hpp"

namespace overmeasure {

namespace {

using json = nlohmann::json;

constexpr double kDefaultP0 = 0.01;
constexpr std::uint64_t kDefaultN = 40;
constexpr int kDefaultDoublings = 4;

[[noreturn]] void parse_error(const std::string& message) {
  throw Error(ErrorCode::parse, "job file: " + message);
}

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) parse_error("unknown field '" + key + "' in " + where);
  }
}

double get_number(const json& object, const char* key) {
  const json& v = object.at(key);
  if (!v.is_number()) parse_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& what) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
    parse_error("'" + what + "' must be a positive integer");
  }
  return v.get<std::uint64_t>();
}

SigmaPrior parse_prior(const json& p, double q0) {
  if (!p.is_object()) parse_error("'prior' must be an object");
  reject_unknown(p, {"type", "sigma_lo", "sigma_hi"}, "prior");
  std::string type = "log_uniform";
  if (p.contains("type")) {
    if (!p["type"].is_string()) parse_error("'prior.type' must be a string");
    type = p["type"].get<std::string>();
  }
  if (type == "log_uniform") {
    const double lo = p.contains("sigma_lo") ? get_number(p, "sigma_lo") : q0 / 100.0;
    const double hi = p.contains("sigma_hi") ? get_number(p, "sigma_hi") : 10.0 * q0;
    return SigmaPrior::log_uniform(lo, hi);
  }
  if (type == "point") {
    if (!p.contains("sigma_lo")) parse_error("point prior needs 'sigma_lo'");
    const double sigma = get_number(p, "sigma_lo");
    if (p.contains("sigma_hi") && get_number(p, "sigma_hi") != sigma) {
      throw_domain("point prior needs sigma_lo == sigma_hi");
    }
    return SigmaPrior::point(sigma);
  }
  parse_error("'prior.type' must be \"log_uniform\" or \"point\", got \"" + type + "\"");
}

}  // namespace

JobSpec parse_job(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_error(e.what());
  }
  if (!root.is_object()) parse_error("top level must be an object");
  reject_unknown(root,
                 {"q0", "p0", "n", "n_list", "prior", "cap_at_q0", "tol", "trials", "seed"},
                 "job");
  if (!root.contains("q0")) parse_error("missing required field 'q0'");

  const double q0 = get_number(root, "q0");
  const double p0 = root.contains("p0") ? get_number(root, "p0") : kDefaultP0;
  SafetySpec spec(q0, p0);
  SigmaPrior prior =
      root.contains("prior") ? parse_prior(root["prior"], q0) : SigmaPrior::default_for(q0);

  std::vector<std::uint64_t> n_list;
  if (root.contains("n_list")) {
    const json& list = root["n_list"];
    if (!list.is_array() || list.empty()) parse_error("'n_list' must be a non-empty array");
    for (const json& v : list) n_list.push_back(get_count(v, "n_list[]"));
    for (std::size_t i = 1; i < n_list.size(); ++i) {
      if (n_list[i] <= n_list[i - 1]) throw_domain("'n_list' must be strictly increasing");
    }
  }
  std::uint64_t n = kDefaultN;
  if (root.contains("n")) {
    n = get_count(root["n"], "n");
  } else if (!n_list.empty()) {
    n = n_list.front();
  }
  if (n_list.empty()) {
    for (int k = 0; k <= kDefaultDoublings; ++k) n_list.push_back(n << k);
  } else if (n_list.front() != n) {
    throw_domain("'n_list' must start at n=" + std::to_string(n));
  }

  JobSpec job{spec, prior, n, std::move(n_list)};
  if (root.contains("cap_at_q0")) {
    if (!root["cap_at_q0"].is_boolean()) parse_error("'cap_at_q0' must be a boolean");
    job.cap_at_q0 = root["cap_at_q0"].get<bool>();
  }
  if (root.contains("tol")) {
    job.tol = get_number(root, "tol");
    if (!(job.tol > 0.0 && job.tol < 1.0)) throw_domain("'tol' must lie in (0, 1)");
  }
  if (root.contains("trials")) job.trials = get_count(root["trials"], "trials");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) parse_error("'seed' must be an unsigned integer");
    job.seed = root["seed"].get<std::uint64_t>();
  }
  return job;
}

JobSpec load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open job file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_job(text.str());
}

std::string serialize_job(const JobSpec& job) {
  json prior = {
      {"type", job.prior.kind() == PriorKind::point ? "point" : "log_uniform"},
      {"sigma_lo", job.prior.sigma_lo()},
      {"sigma_hi", job.prior.sigma_hi()},
  };
  json root = {
      {"q0", job.spec.q0()},
      {"p0", job.spec.p0().value()},
      {"n", job.n_required},
      {"n_list", job.n_list},
      {"prior", prior},
      {"cap_at_q0", job.cap_at_q0},
      {"tol", job.tol},
      {"trials", job.trials},
      {"seed", job.seed},
  };
  return root.dump(2) + "\n";
}

}  // namespace overmeasure
