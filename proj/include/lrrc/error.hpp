#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrrc {

enum class ErrorCode {
  NotPrime,
  DimensionMismatch,
  FieldMismatch,
  NotSquare,
  OutOfRange,
  OutOfScope,
  LengthMismatch,
  TooLarge,
  PreconditionViolated,
  ConstructionFailed,
  RepairFailed,
  InvalidHelpers,
  HNotMember,
  RankDeficient,
  InternalContradiction,
  EmptyHelperPool,
  FieldTooSmall,
  InvalidPair,
  InvariantViolation,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::RepairFailed: return "RepairFailed";
    case ErrorCode::InvalidHelpers: return "InvalidHelpers";
    case ErrorCode::HNotMember: return "HNotMember";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InternalContradiction: return "InternalContradiction";
    case ErrorCode::EmptyHelperPool: return "EmptyHelperPool";
    case ErrorCode::FieldTooSmall: return "FieldTooSmall";
    case ErrorCode::InvalidPair: return "InvalidPair";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lrrc
