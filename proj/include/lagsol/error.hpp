#pragma once

#include <stdexcept>
#include <string>

namespace lagsol {

enum class ErrorCode {
  kInvalidArgument,
  kNonFinite,
  kBoundedEscape,
  kDomain,
  kLawMismatch,
  kSpacingMismatch,
  kGridTooSmall,
  kGateFailure,
  kStability,
  kDegenerateSegment,
  kMissingTrace,
  kUnknownKind,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (tests, the CLI) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kBoundedEscape: return "bounded escape";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kLawMismatch: return "law mismatch";
    case ErrorCode::kSpacingMismatch: return "spacing mismatch";
    case ErrorCode::kGridTooSmall: return "grid too small";
    case ErrorCode::kGateFailure: return "gate failure";
    case ErrorCode::kStability: return "stability violation";
    case ErrorCode::kDegenerateSegment: return "degenerate segment";
    case ErrorCode::kMissingTrace: return "missing trace";
    case ErrorCode::kUnknownKind: return "unknown kind";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
  }
  return "error";
}

}  // namespace lagsol
