#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aiready {

enum class ErrorCode {
  // taxonomy
  MalformedRegistry,
  InvalidWeights,
  DanglingReference,
  UnknownSubDimension,
  // inspector
  RootNotFound,
  PermissionDenied,
  UnparsableHeader,
  // planner
  MalformedKBDocument,
  NoEvidencePath,
  RefinementExhausted,
  // toolkit
  InvalidToolSpec,
  UnknownTool,
  PersistenceFailure,
  // executor
  EvidenceLoadFailure,
  InvalidProgram,
  ToolCrash,
  ExternalTimeout,
  ProtocolViolation,
  // evaluators
  NoTabularEvidence,
  NoApplicableColumns,
  NotCategorical,
  NoTarget,
  NoFeatures,
  EmptyChecklist,
  NoConditionVariables,
  UnknownEvaluator,
  InvalidBinding,
  // configuration / cli
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace aiready
