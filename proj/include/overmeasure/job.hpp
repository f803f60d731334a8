#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "overmeasure/calibration.hpp"

namespace overmeasure {

/// One batch job, read from a JSON file:
///
///   {
///     "q0": 1.0,                    required
///     "p0": 0.01,                   default 0.01
///     "n": 40,                      default 40, or n_list[0]
///     "n_list": [40, 80, ...],      default n, 2n, 4n, 8n, 16n
///     "prior": {"type": "log_uniform" | "point",
///               "sigma_lo": ..., "sigma_hi": ...},
///                                   default log_uniform [q0/100, 10·q0];
///                                   a point prior needs sigma_lo (sigma_hi,
///                                   if given, must equal it)
///     "cap_at_q0": true,            default true
///     "tol": 1e-4,                  default 1e-4
///     "trials": 100000,             default 100000
///     "seed": 0                     default 0, full 64-bit range
///   }
///
/// Unknown keys are rejected.
struct JobSpec {
  SafetySpec spec;
  SigmaPrior prior;
  std::uint64_t n_required = 40;
  std::vector<std::uint64_t> n_list;
  bool cap_at_q0 = true;
  double tol = 1e-4;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

/// Throws Error(parse) for malformed JSON, wrong types or unknown keys and
/// Error(domain) for values that violate a domain invariant.
JobSpec parse_job(std::string_view text);
JobSpec load_job(const std::string& path);

/// Every field written explicitly; doubles round-trip exactly.
std::string serialize_job(const JobSpec& job);

}  // namespace overmeasure
