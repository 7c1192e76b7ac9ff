#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finsler {

enum class ErrorCode {
  InadmissibleDirection,
  ZeroDirection,
  NonpositiveKappa,
  BoundaryPoint,
  SpacelikeGradient,
  NotPositiveDefinite,
  NonpositiveQ0,
  InfiniteVolume,
  NegativeBase,
  GridTooSmall,
  NonpositiveRadius,
  SingularDenominator,
  OriginSingularity,
  ToleranceNotMet,
  OutOfRange,
  DerivativeUnavailable,
  SingularMetric,
  ZeroLambda,
  LeftDomain,
  TooFewSamples,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InadmissibleDirection: return "InadmissibleDirection";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::NonpositiveKappa: return "NonpositiveKappa";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::SpacelikeGradient: return "SpacelikeGradient";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonpositiveQ0: return "NonpositiveQ0";
    case ErrorCode::InfiniteVolume: return "InfiniteVolume";
    case ErrorCode::NegativeBase: return "NegativeBase";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::OriginSingularity: return "OriginSingularity";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::ZeroLambda: return "ZeroLambda";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace finsler
