#include "error.hpp"

namespace svy {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parameter: return "parameter error";
    case ErrorCode::Ingestion: return "ingestion error";
    case ErrorCode::Infeasible: return "infeasibility error";
    case ErrorCode::Unsupported: return "unsupported query";
    case ErrorCode::DrawFailure: return "draw failure";
    case ErrorCode::EnumerationTooLarge: return "enumeration too large";
    case ErrorCode::Combination: return "invalid estimator/design combination";
    case ErrorCode::Degenerate: return "degenerate input";
    case ErrorCode::Convergence: return "convergence failure";
    case ErrorCode::UndefinedParameter: return "undefined parameter";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::JackknifeFailure: return "jackknife failure";
    case ErrorCode::UndefinedRatio: return "undefined relative efficiency";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace svy
