#pragma once

#include <stdexcept>
#include <string>

namespace entmono {

enum class ErrorCode {
  dimension_mismatch,
  non_finite,
  not_hermitian,
  not_psd,
  not_normalized,
  trace_not_one,
  convergence_failure,
  domain_error,
  invalid_argument,
  io_error,
  parse_error,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::non_finite: return "non-finite entry";
    case ErrorCode::not_hermitian: return "not Hermitian";
    case ErrorCode::not_psd: return "not positive semidefinite";
    case ErrorCode::not_normalized: return "not normalized";
    case ErrorCode::trace_not_one: return "trace not one";
    case ErrorCode::convergence_failure: return "convergence failure";
    case ErrorCode::domain_error: return "domain error";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::io_error: return "I/O error";
    case ErrorCode::parse_error: return "parse error";
  }
  return "unknown error";
}

// Every failure raised by the library carries one of the codes above so
// callers (notably the CLI) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace entmono
