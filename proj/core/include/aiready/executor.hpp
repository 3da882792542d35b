#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aiready/check_program.hpp"
#include "aiready/error.hpp"
#include "aiready/evaluators.hpp"
#include "aiready/evidence.hpp"
#include "aiready/external.hpp"
#include "aiready/plan.hpp"
#include "aiready/taxonomy.hpp"
#include "aiready/toolkit.hpp"

namespace aiready {

enum class ReviewLayer { runtime, semantic };
enum class VerdictCode { score_out_of_range, missing_required_field, domain_inconsistent_value, tool_crash, budget_exceeded };

std::string_view to_string(ReviewLayer l);
std::string_view to_string(VerdictCode c);

struct Violation {
  VerdictCode code = VerdictCode::tool_crash;
  std::string detail;
};

struct ReviewVerdict {
  ReviewLayer layer = ReviewLayer::runtime;
  bool pass = true;
  std::vector<Violation> violations;
  std::string tool_id;

  std::string failure_signature() const;  // normalized, empty when passing
};

json verdict_to_json(const ReviewVerdict& v);

struct ExecutionResult {
  std::string element_id;
  RawOutput raw_output;
  std::string tool_id;
  int tool_version = 0;
  int iterations_used = 0;
  Normalization normalization;  // of the tool that produced the output
  bool truncated = false;       // evidence hit a budget
  bool synthesized = false;
};

struct ToolRunError {
  ErrorCode code = ErrorCode::ToolCrash;
  std::string message;
};

using ToolRunResult = std::variant<RawOutput, ToolRunError>;

struct RunContext {
  double external_timeout_secs = 120.0;
  ProgramLimits limits;
  json request;  // protocol request for external tools
};

/// Throws the tool's error (ToolCrash, ExternalTimeout, ProtocolViolation,
/// evaluator codes).
RawOutput run_tool(const ToolSpec& spec, const Evidence& evidence, const ElementPlan& plan, const RunContext& ctx = {});

/// Like run_tool, but errors come back as values.
ToolRunResult try_run_tool(const ToolSpec& spec, const Evidence& evidence, const ElementPlan& plan,
                           const RunContext& ctx = {});

/// A builtin tool keeps its evaluator's raw range; other tools report [0,1].
Normalization tool_normalization(const ToolSpec& spec);

/// Non-empty when `value` breaks the rule implied by `name` (counts are
/// non-negative integers, fractions lie in [0,1], no NaN/Inf anywhere).
std::optional<std::string> domain_violation(std::string_view name, const json& value);

/// Never throws. `scoring.normalization` must be the producing tool's.
ReviewVerdict review(const ToolRunResult& result, const ScoringStrategy& scoring, const AtomicElement& element);

struct RefinementRequest {
  std::string feedback;
};

struct ElementFailure {
  std::string element_id;
  std::string reason;
  std::vector<ReviewVerdict> verdicts;
};

/// Evidence-shaped failures become refinement requests; everything else fails
/// the element.
std::variant<RefinementRequest, ElementFailure> escalate(const std::vector<ReviewVerdict>& verdicts,
                                                         const ElementPlan& plan);

struct OrchestrateConfig {
  int max_debug_iterations = 3;
  double external_timeout_secs = 120.0;
  ProgramLimits limits;
  Generator* generator = nullptr;
  json profile_summary = json::object();
  json kb_snippets = json::array();
};

struct SynthesisStats {
  int attempts = 0;
  int successes = 0;
  std::vector<int> iterations;  // one per success
};

struct OrchestrateOutcome {
  std::optional<ExecutionResult> result;
  std::vector<ReviewVerdict> verdicts;  // failed runs, in order
  std::vector<ToolMemoryEntry> entries;
  std::size_t runs = 0;
  std::size_t candidates = 0;
  bool budget_exhausted = false;
  SynthesisStats synthesis;
};

/// Reuse, then synthesize. Each compatible tool is tried once; if none passes,
/// one synthesis round runs up to max_debug_iterations generations (or a single
/// template instantiation without a generator). `run_budget`, when given, caps
/// the total tool runs and is decremented.
OrchestrateOutcome orchestrate(const ElementPlan& plan, const AtomicElement& element, const Evidence& evidence,
                               const DataProfile& profile, const std::string& profile_digest, ToolLibrary& library,
                               ToolMemory& memory, const OrchestrateConfig& config, std::size_t* run_budget = nullptr);

/// Compact profile description sent to external tools.
json profile_summary(const DataProfile& profile);

}  // namespace aiready
