#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace altmin {

enum class ErrorCode {
  ShapeMismatch,
  NonFinite,
  NoConvergence,
  InvalidK,
  InvalidRange,
  InvalidConfig,
  InvalidSpec,
  SingularB,
  TooFewIterations,
  ParseError,
  NonNumeric,
  EmptyBlockRule,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::SingularB: return "SingularB";
    case ErrorCode::TooFewIterations: return "TooFewIterations";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::EmptyBlockRule: return "EmptyBlockRule";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace altmin
