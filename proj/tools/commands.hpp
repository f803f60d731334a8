#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace overmeasure::cli {

// Exit statuses. Disjoint by contract; scripts depend on them.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitVerificationFailed = 3;

// Stream indices: every random draw in a report derives from the job seed
// and one of these bases plus the row index.
inline constexpr std::uint64_t kVerifyStreamBase = 1ull << 32;
inline constexpr std::uint64_t kMinimalEffortStreamBase = 2ull << 32;
inline constexpr std::uint64_t kParadoxStreamBase = 3ull << 32;
inline constexpr std::uint64_t kExpectedMaxStream = 5ull << 32;

/// Fixed-rule acceptance the paradox demo targets at the required count
/// when --sigma-true is not given.
inline constexpr double kParadoxTargetAcceptance = 0.9;

/// Runs one command line (args excludes the program name). Tables go to
/// `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace overmeasure::cli
