#include "overmeasure/error.hpp"

namespace overmeasure {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::infeasible_conditioning: return "infeasible_conditioning";
    case ErrorCode::solver: return "solver";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

void throw_domain(const std::string& message) {
  throw Error(ErrorCode::domain, message);
}

}  // namespace overmeasure
