#pragma once

#include <stdexcept>
#include <string>

namespace svy {

enum class ErrorCode {
  Parameter,
  Ingestion,
  Infeasible,
  Unsupported,
  DrawFailure,
  EnumerationTooLarge,
  Combination,
  Degenerate,
  Convergence,
  UndefinedParameter,
  Singularity,
  JackknifeFailure,
  UndefinedRatio,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the codes above so the
// C layer can map it to a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace svy
