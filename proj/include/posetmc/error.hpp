#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posetmc {

enum class ErrorCode {
  // poset-core
  ReflexiveEdge,
  TransitivityViolation,
  AsymmetricTie,
  InconsistentTieBlock,
  CycleDetected,
  UnknownLabel,
  LengthMismatch,
  SizeLimitExceeded,
  TooManyExtensions,
  StartNotExtension,
  ShapeMismatch,
  // priors
  BadRho,
  BadHyper,
  OutOfSupport,
  // observation models
  BadP,
  BadTheta,
  MemberMismatch,
  NotRemaining,
  // mcmc / summaries
  BadConfig,
  TooShort,
  EmptyTrace,
  NoTruthEdges,
  ZeroPriorMass,
  DegenerateColumn,
  // io
  ParseError,
  DuplicateActor,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ReflexiveEdge: return "ReflexiveEdge";
    case ErrorCode::TransitivityViolation: return "TransitivityViolation";
    case ErrorCode::AsymmetricTie: return "AsymmetricTie";
    case ErrorCode::InconsistentTieBlock: return "InconsistentTieBlock";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::TooManyExtensions: return "TooManyExtensions";
    case ErrorCode::StartNotExtension: return "StartNotExtension";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadRho: return "BadRho";
    case ErrorCode::BadHyper: return "BadHyper";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::BadP: return "BadP";
    case ErrorCode::BadTheta: return "BadTheta";
    case ErrorCode::MemberMismatch: return "MemberMismatch";
    case ErrorCode::NotRemaining: return "NotRemaining";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::NoTruthEdges: return "NoTruthEdges";
    case ErrorCode::ZeroPriorMass: return "ZeroPriorMass";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateActor: return "DuplicateActor";
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

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace posetmc
