#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pertlag {

enum class ErrorCode {
  Nonconvergence,
  PoleEncountered,
  StepUnderflow,
  Diverged,
  SingularJacobian,
  EvaluationFailed,
  BranchCut,
  Domain,
  Singular,
  SeriesLaunchFailed,
  DivisionNearZero,
  AssertionFailed,
  PrecisionExhausted,
  Usage,
};

constexpr std::string_view code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Nonconvergence: return "NONCONVERGENCE";
    case ErrorCode::PoleEncountered: return "POLE_ENCOUNTERED";
    case ErrorCode::StepUnderflow: return "STEP_UNDERFLOW";
    case ErrorCode::Diverged: return "DIVERGED";
    case ErrorCode::SingularJacobian: return "SINGULAR_JACOBIAN";
    case ErrorCode::EvaluationFailed: return "EVALUATION_FAILED";
    case ErrorCode::BranchCut: return "BRANCH_CUT";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::SeriesLaunchFailed: return "SERIES_LAUNCH_FAILED";
    case ErrorCode::DivisionNearZero: return "DIVISION_NEAR_ZERO";
    case ErrorCode::AssertionFailed: return "ASSERTION_FAILED";
    case ErrorCode::PrecisionExhausted: return "PRECISION_EXHAUSTED";
    case ErrorCode::Usage: return "USAGE";
  }
  return "UNKNOWN";
}

class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pertlag
