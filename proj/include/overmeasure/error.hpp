#pragma once

#include <stdexcept>
#include <string>

namespace overmeasure {

enum class ErrorCode {
  domain,
  convergence,
  infeasible,
  infeasible_conditioning,
  solver,
  configuration,
  insufficient_data,
  parse,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Quadrature ran out of its evaluation budget. Carries what it had.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double best_estimate,
                   double error_bound)
      : Error(ErrorCode::convergence, message),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

[[noreturn]] void throw_domain(const std::string& message);

}  // namespace overmeasure
