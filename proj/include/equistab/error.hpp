#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equistab {

enum class ErrorCode {
  NonOrthogonalRho,
  GroupNotClosed,
  InconsistentTau,
  DimensionMismatch,
  DiscontinuousUnfold,
  CollisionalConfiguration,
  CollisionalPath,
  MassOrbitMismatch,
  SchemaError,
  DegenerateProjection,
  MaxIterations,
  CollisionStall,
  SingularHessian,
  NotInBasin,
  NonFiniteIntegration,
  EigenFailure,
  NotCritical,
  NotSymmetric,
  UnsupportedFormat,
  IoError,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::NonOrthogonalRho: return "NonOrthogonalRho";
    case ErrorCode::GroupNotClosed: return "GroupNotClosed";
    case ErrorCode::InconsistentTau: return "InconsistentTau";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DiscontinuousUnfold: return "DiscontinuousUnfold";
    case ErrorCode::CollisionalConfiguration: return "CollisionalConfiguration";
    case ErrorCode::CollisionalPath: return "CollisionalPath";
    case ErrorCode::MassOrbitMismatch: return "MassOrbitMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::CollisionStall: return "CollisionStall";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::NotInBasin: return "NotInBasin";
    case ErrorCode::NonFiniteIntegration: return "NonFiniteIntegration";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception; the code
/// is stable and machine-readable, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace equistab
