#include "aiready/error.hpp"

namespace aiready {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRegistry: return "MalformedRegistry";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownSubDimension: return "UnknownSubDimension";
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::PermissionDenied: return "PermissionDenied";
    case ErrorCode::UnparsableHeader: return "UnparsableHeader";
    case ErrorCode::MalformedKBDocument: return "MalformedKBDocument";
    case ErrorCode::NoEvidencePath: return "NoEvidencePath";
    case ErrorCode::RefinementExhausted: return "RefinementExhausted";
    case ErrorCode::InvalidToolSpec: return "InvalidToolSpec";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::PersistenceFailure: return "PersistenceFailure";
    case ErrorCode::EvidenceLoadFailure: return "EvidenceLoadFailure";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::ToolCrash: return "ToolCrash";
    case ErrorCode::ExternalTimeout: return "ExternalTimeout";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::NoTabularEvidence: return "NoTabularEvidence";
    case ErrorCode::NoApplicableColumns: return "NoApplicableColumns";
    case ErrorCode::NotCategorical: return "NotCategorical";
    case ErrorCode::NoTarget: return "NoTarget";
    case ErrorCode::NoFeatures: return "NoFeatures";
    case ErrorCode::EmptyChecklist: return "EmptyChecklist";
    case ErrorCode::NoConditionVariables: return "NoConditionVariables";
    case ErrorCode::UnknownEvaluator: return "UnknownEvaluator";
    case ErrorCode::InvalidBinding: return "InvalidBinding";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace aiready
