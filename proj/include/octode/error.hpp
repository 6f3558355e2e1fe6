#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace octode {

enum class ErrorCode {
  LevelMismatch,
  InvalidLevel,
  NonFinite,
  ZeroOrNearZero,
  ZeroInput,
  ZeroBase,
  PathThroughZero,
  StepTooCoarse,
  NotLeftReducible,
  NegativePowerOne,
  NotIntegrable,
  QuadratureNonConvergent,
  EvaluationFailure,
  NotExact,
  NotQuaternion,
  CompatibilityFailed,
  ZeroVectorField,
  SeriesDiverged,
  NonRealCoefficient,
  NewtonNonConvergent,
  SingularJacobian,
  DegenerateDenominator,
  BranchUndefined,
  NonInvertibleOperator,
  AnsatzViolated,
  ShapeMismatch,
  RecursionBlowup,
  NonAnalyticInput,
  SyntaxError,
  UnknownSymbol,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroOrNearZero: return "ZeroOrNearZero";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::ZeroBase: return "ZeroBase";
    case ErrorCode::PathThroughZero: return "PathThroughZero";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::NotLeftReducible: return "NotLeftReducible";
    case ErrorCode::NegativePowerOne: return "NegativePowerOne";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::NotExact: return "NotExact";
    case ErrorCode::NotQuaternion: return "NotQuaternion";
    case ErrorCode::CompatibilityFailed: return "CompatibilityFailed";
    case ErrorCode::ZeroVectorField: return "ZeroVectorField";
    case ErrorCode::SeriesDiverged: return "SeriesDiverged";
    case ErrorCode::NonRealCoefficient: return "NonRealCoefficient";
    case ErrorCode::NewtonNonConvergent: return "NewtonNonConvergent";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::BranchUndefined: return "BranchUndefined";
    case ErrorCode::NonInvertibleOperator: return "NonInvertibleOperator";
    case ErrorCode::AnsatzViolated: return "AnsatzViolated";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RecursionBlowup: return "RecursionBlowup";
    case ErrorCode::NonAnalyticInput: return "NonAnalyticInput";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace octode
