#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/toolkit.hpp"

namespace aiready {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs argv[0] (PATH lookup) with `input` on stdin. The child is killed when
/// `timeout_secs` elapses or its output exceeds `max_output` bytes.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input, double timeout_secs,
                          std::size_t max_output = 16u << 20);

/// Response shapes: {"score": n, "interpretables": {...}, "rationale": "..."}
/// or {"dsl_program": {...}}. Throws Error(ProtocolViolation).
void validate_response(const json& response);

/// One protocol round trip. Throws ExternalTimeout or ProtocolViolation.
json call_external(const ExternalDescriptor& exe, const json& request, double timeout_secs);

/// Produces tool bodies on request during synthesis. The request carries
/// protocol, element_id, plan, profile_summary, kb_snippets and
/// failure_context (earlier failed attempts for this synthesis).
class Generator {
 public:
  virtual ~Generator() = default;
  virtual json generate(const json& request) = 0;
  /// How a direct-score response is recorded in the tool library.
  virtual ExternalDescriptor descriptor() const = 0;
};

class ProcessGenerator final : public Generator {
 public:
  ProcessGenerator(ExternalDescriptor exe, double timeout_secs) : exe_(std::move(exe)), timeout_(timeout_secs) {}
  json generate(const json& request) override { return call_external(exe_, request, timeout_); }
  ExternalDescriptor descriptor() const override { return exe_; }

 private:
  ExternalDescriptor exe_;
  double timeout_;
};

/// Replays a fixed script. The response is picked by the number of failures
/// already in the request's failure_context, so every synthesis sees the same
/// sequence. Entries:
///   {"emit": "valid"}          generic program meeting the plan's interpretables
///   {"emit": "out_of_range"}   direct score 1.3
///   {"emit": "missing_field"}  valid score, no interpretables
///   {"emit": "crash"}          program that divides by zero
///   anything else              returned verbatim
class ScriptedGenerator final : public Generator {
 public:
  explicit ScriptedGenerator(std::vector<json> script) : script_(std::move(script)) {}
  json generate(const json& request) override;
  ExternalDescriptor descriptor() const override { return {"scripted-generator", {}, 1}; }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::vector<json> script_;
  std::atomic<std::size_t> calls_{0};
};

/// Program that scores the fraction of readable files and fills each named
/// interpretable with a value of the kind its name implies.
json generic_program(const std::vector<std::string>& interpretables);

struct FaultPlan {
  enum class Pattern { fail_then_succeed, always_out_of_range, always_crash } pattern = Pattern::fail_then_succeed;
  // fail_then_succeed: the bad outputs emitted before the valid program.
  std::vector<std::string> failures = {"out_of_range", "missing_field"};
};

std::unique_ptr<ScriptedGenerator> inject_faults(const FaultPlan& plan);

/// Generator named by AIREADY_GENERATOR, if set.
std::unique_ptr<Generator> generator_from_env(double timeout_secs);

}  // namespace aiready
