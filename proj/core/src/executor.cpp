#include "aiready/executor.hpp"

#include <cmath>

#include "aiready/text.hpp"

namespace aiready {

namespace {

bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() >= suf.size() && s.substr(s.size() - suf.size()) == suf;
}

bool count_kind(std::string_view n) {
  return n == "n" || n == "k" || ends_with(n, "_count") || ends_with(n, "_cells") || ends_with(n, "_rows") ||
         ends_with(n, "_files") || ends_with(n, "_counts");
}

bool fraction_kind(std::string_view n) {
  return ends_with(n, "_fraction") || ends_with(n, "_rate") || ends_with(n, "_rates") || ends_with(n, "_nmi");
}

// Walks every number below `v`; returns the first complaint.
std::optional<std::string> check_numbers(const json& v, bool count, bool fraction, const std::string& where) {
  if (v.is_number()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) return where + " is not finite";
    if (count && (x < 0 || std::floor(x) != x)) return where + " = " + text::fixed(x, 4) + " is not a count";
    if (fraction && (x < 0 || x > 1)) return where + " = " + text::fixed(x, 4) + " is outside [0,1]";
    return std::nullopt;
  }
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (auto e = check_numbers(v[i], count, fraction, where + "[" + std::to_string(i) + "]")) return e;
    }
  } else if (v.is_object()) {
    for (const auto& [k, x] : v.items()) {
      if (auto e = check_numbers(x, count, fraction, where + "." + k)) return e;
    }
  }
  return std::nullopt;
}

std::optional<RefinementRequest> evidence_tag(const std::string& detail) {
  std::string_view d = detail;
  if (d.rfind("column_missing:", 0) == 0) {
    auto rest = d.substr(15);
    auto end = rest.find(": ");
    std::string column(rest.substr(0, end));
    if (!column.empty()) return RefinementRequest{"column_missing:" + column};
  }
  if (d.rfind("insufficient_rows", 0) == 0) return RefinementRequest{"insufficient_rows"};
  if (d.rfind("schema_mismatch", 0) == 0) return RefinementRequest{"schema_mismatch"};
  return std::nullopt;
}

ToolMemoryEntry make_entry(const ToolSpec& spec, const AtomicElement& element, const std::string& digest,
                           const DataProfile& profile, const ReviewVerdict& v, int iterations) {
  ToolMemoryEntry e;
  e.tool_id = spec.metadata.tool_id;
  e.tool_version = spec.metadata.version;
  e.element_id = element.id;
  e.profile_digest = digest;
  e.modality = profile.modality;
  e.outcome = v.pass ? Outcome::success : v.layer == ReviewLayer::runtime ? Outcome::runtime_failure
                                                                          : Outcome::semantic_failure;
  e.iterations_used = iterations;
  if (!v.pass) e.failure_signature = v.failure_signature();
  return e;
}

ToolSpec synth_spec(const ElementPlan& plan, const AtomicElement& element) {
  ToolSpec s;
  s.metadata.tool_id = "synth." + element.id;
  s.metadata.scope = {element.id};
  s.metadata.input_requirements.evidence = plan.loading.evidence;
  return s;
}

}  // namespace

std::string_view to_string(ReviewLayer l) { return l == ReviewLayer::runtime ? "runtime" : "semantic"; }

std::string_view to_string(VerdictCode c) {
  switch (c) {
    case VerdictCode::score_out_of_range: return "score_out_of_range";
    case VerdictCode::missing_required_field: return "missing_required_field";
    case VerdictCode::domain_inconsistent_value: return "domain_inconsistent_value";
    case VerdictCode::tool_crash: return "tool_crash";
    case VerdictCode::budget_exceeded: return "budget_exceeded";
  }
  return "tool_crash";
}

std::string ReviewVerdict::failure_signature() const {
  if (pass) return {};
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += std::string(to_string(v.code)) + ": " + v.detail;
  }
  return text::normalize_failure(s);
}

json verdict_to_json(const ReviewVerdict& v) {
  json vs = json::array();
  for (const auto& x : v.violations) vs.push_back({{"code", std::string(to_string(x.code))}, {"detail", x.detail}});
  return {{"layer", std::string(to_string(v.layer))}, {"pass", v.pass}, {"violations", vs}, {"tool_id", v.tool_id}};
}

json profile_summary(const DataProfile& p) {
  json files = json::array();
  for (const auto& cue : p.schema_cues) {
    json cols = json::array();
    for (const auto& c : cue.columns) cols.push_back({{"name", c.name}, {"kind", std::string(to_string(c.kind))}});
    files.push_back({{"file", cue.relative_path}, {"columns", cols}, {"estimated_rows", cue.estimated_rows}});
  }
  json targets = json::array();
  for (const auto& t : p.candidate_target_columns) targets.push_back({{"file", t.file}, {"column", t.column}});
  return {{"modality", std::string(to_string(p.modality))},
          {"file_count", p.files.size()},
          {"total_bytes", p.total_bytes},
          {"domain_hint", p.domain_hint ? json(*p.domain_hint) : json(nullptr)},
          {"schemas", files},
          {"candidate_targets", targets}};
}

Normalization tool_normalization(const ToolSpec& spec) {
  if (spec.kind == ToolKind::builtin) {
    if (const auto* sig = find_signature(spec.evaluator_id)) return sig->normalization();
  }
  return {};
}

RawOutput run_tool(const ToolSpec& spec, const Evidence& evidence, const ElementPlan& plan, const RunContext& ctx) {
  switch (spec.kind) {
    case ToolKind::builtin: {
      const ToolRequest& req = plan.scoring.tool_request;
      bool plan_evaluator = req.kind == ToolKind::builtin && req.evaluator_id == spec.evaluator_id;
      return run_evaluator(spec.evaluator_id, evidence, plan_evaluator ? req.bindings : spec.default_bindings);
    }
    case ToolKind::dsl:
      return run_program(spec.program, evidence, ctx.limits);
    case ToolKind::external: {
      json resp = call_external(spec.external, ctx.request, ctx.external_timeout_secs);
      if (resp.contains("dsl_program")) {
        try {
          validate_program(resp["dsl_program"]);
        } catch (const Error& e) {
          fail(ErrorCode::ProtocolViolation, e.what());
        }
        return run_program(resp["dsl_program"], evidence, ctx.limits);
      }
      RawOutput out;
      out.score_candidate = resp["score"].get<double>();
      out.interpretables = resp.value("interpretables", json::object());
      out.evidence_summary = evidence.summary();
      if (resp.contains("rationale")) out.evidence_summary["rationale"] = resp["rationale"];
      return out;
    }
  }
  fail(ErrorCode::ToolCrash, "unknown tool kind");
}

ToolRunResult try_run_tool(const ToolSpec& spec, const Evidence& evidence, const ElementPlan& plan,
                           const RunContext& ctx) {
  try {
    return run_tool(spec, evidence, plan, ctx);
  } catch (const Error& e) {
    return ToolRunError{e.code(), e.what()};
  } catch (const std::exception& e) {
    return ToolRunError{ErrorCode::ToolCrash, e.what()};
  }
}

std::optional<std::string> domain_violation(std::string_view name, const json& value) {
  return check_numbers(value, count_kind(name), fraction_kind(name), std::string(name));
}

ReviewVerdict review(const ToolRunResult& result, const ScoringStrategy& scoring, const AtomicElement& element) {
  ReviewVerdict v;
  try {
    if (const auto* err = std::get_if<ToolRunError>(&result)) {
      v.layer = ReviewLayer::runtime;
      v.pass = false;
      bool budget = err->code == ErrorCode::ExternalTimeout ||
                    std::string_view(err->message).find("budget_exceeded") != std::string_view::npos;
      v.violations.push_back({budget ? VerdictCode::budget_exceeded : VerdictCode::tool_crash,
                              err->message.empty() ? std::string(to_string(err->code)) : err->message});
      return v;
    }
    const RawOutput& out = std::get<RawOutput>(result);
    v.layer = ReviewLayer::semantic;
    double raw = out.score_candidate;
    if (!std::isfinite(raw)) {
      v.violations.push_back({VerdictCode::domain_inconsistent_value, "score is not finite"});
    } else {
      double s = scoring.normalization.apply(raw);
      if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        v.violations.push_back({VerdictCode::score_out_of_range,
                                "normalized score " + text::fixed(s, 6) + " for " + element.id + " is outside [0,1]"});
      }
    }
    const json& in = out.interpretables;
    for (const auto& name : scoring.interpretables) {
      if (!in.is_object() || !in.contains(name)) {
        v.violations.push_back({VerdictCode::missing_required_field, "interpretable '" + name + "' is missing"});
      }
    }
    if (in.is_object()) {
      for (const auto& [name, value] : in.items()) {
        if (auto e = domain_violation(name, value)) v.violations.push_back({VerdictCode::domain_inconsistent_value, *e});
      }
    } else if (!in.is_null()) {
      v.violations.push_back({VerdictCode::missing_required_field, "interpretables must be an object"});
    }
    if (auto e = check_numbers(out.evidence_summary, false, false, "evidence_summary")) {
      v.violations.push_back({VerdictCode::domain_inconsistent_value, *e});
    }
  } catch (const std::exception& e) {
    v.violations.push_back({VerdictCode::tool_crash, std::string("review: ") + e.what()});
  }
  v.pass = v.violations.empty();
  return v;
}

std::variant<RefinementRequest, ElementFailure> escalate(const std::vector<ReviewVerdict>& verdicts,
                                                         const ElementPlan& plan) {
  for (auto it = verdicts.rbegin(); it != verdicts.rend(); ++it) {
    for (const auto& viol : it->violations) {
      if (auto r = evidence_tag(viol.detail)) return *r;
    }
  }
  ElementFailure f;
  f.element_id = plan.element_id;
  f.verdicts = verdicts;
  f.reason = verdicts.empty() ? "no tool could run" : verdicts.back().failure_signature();
  return f;
}

OrchestrateOutcome orchestrate(const ElementPlan& plan, const AtomicElement& element, const Evidence& evidence,
                               const DataProfile& profile, const std::string& digest, ToolLibrary& library,
                               ToolMemory& memory, const OrchestrateConfig& config, std::size_t* run_budget) {
  OrchestrateOutcome out;
  RunContext ctx;
  ctx.external_timeout_secs = config.external_timeout_secs;
  ctx.limits = config.limits;
  json request = {{"protocol", 1},
                  {"element_id", element.id},
                  {"plan", plan_to_json(plan)},
                  {"profile_summary", config.profile_summary},
                  {"kb_snippets", config.kb_snippets},
                  {"failure_context", json::array()}};

  auto take_run = [&]() {
    if (!run_budget) return true;
    if (*run_budget == 0) {
      out.budget_exhausted = true;
      ReviewVerdict v;
      v.pass = false;
      v.violations.push_back({VerdictCode::budget_exceeded, "per-element tool run budget spent"});
      out.verdicts.push_back(v);
      return false;
    }
    --*run_budget;
    return true;
  };

  // Runs `spec` (or accepts a precomputed result), reviews, records memory.
  auto attempt = [&](const ToolSpec& spec, const ToolRunResult& result, int iterations, bool synthesized) -> bool {
    ++out.runs;
    ScoringStrategy scoring = plan.scoring;
    scoring.normalization = tool_normalization(spec);
    ReviewVerdict v = review(result, scoring, element);
    v.tool_id = spec.metadata.tool_id;
    ToolMemoryEntry entry = make_entry(spec, element, digest, profile, v, iterations);
    memory.record(library, entry);
    out.entries.push_back(std::move(entry));
    if (!v.pass) {
      out.verdicts.push_back(std::move(v));
      return false;
    }
    ExecutionResult r;
    r.element_id = element.id;
    r.raw_output = std::get<RawOutput>(result);
    r.tool_id = spec.metadata.tool_id;
    r.tool_version = spec.metadata.version;
    r.iterations_used = iterations;
    r.normalization = scoring.normalization;
    r.truncated = evidence.truncated;
    r.synthesized = synthesized;
    out.result = std::move(r);
    return true;
  };

  ctx.request = request;
  auto candidates = find_compatible(library, memory, element, profile, digest);
  out.candidates = candidates.size();
  for (const auto& spec : candidates) {
    if (!take_run()) return out;
    if (attempt(spec, try_run_tool(spec, evidence, plan, ctx), 0, false)) return out;
  }

  // Synthesis.
  const bool can_template = plan.scoring.tool_request.kind != ToolKind::external;
  if (!config.generator && !can_template) {
    ReviewVerdict v;
    v.pass = false;
    v.violations.push_back({VerdictCode::tool_crash, "no generator configured for an externally assessed element"});
    out.verdicts.push_back(v);
    return out;
  }
  ++out.synthesis.attempts;
  const int rounds = config.generator ? std::max(1, config.max_debug_iterations) : 1;
  json failure_context = json::array();
  for (int i = 0; i < rounds; ++i) {
    if (!take_run()) return out;
    ToolSpec spec = synth_spec(plan, element);
    std::optional<ToolRunResult> precomputed;
    if (config.generator) {
      json req = request;
      req["failure_context"] = failure_context;
      spec.kind = ToolKind::external;
      spec.external = config.generator->descriptor();
      spec.metadata.method_summary = "generated";
      try {
        json resp = config.generator->generate(req);
        validate_response(resp);
        if (resp.contains("dsl_program")) {
          try {
            validate_program(resp["dsl_program"]);
            spec.kind = ToolKind::dsl;
            spec.program = resp["dsl_program"];
          } catch (const Error& e) {
            precomputed = ToolRunError{ErrorCode::ToolCrash, e.what()};
          }
        } else {
          RawOutput o;
          o.score_candidate = resp["score"].get<double>();
          o.interpretables = resp.value("interpretables", json::object());
          o.evidence_summary = evidence.summary();
          precomputed = o;
        }
      } catch (const Error& e) {
        precomputed = ToolRunError{e.code(), e.what()};
      }
    } else if (plan.scoring.tool_request.kind == ToolKind::dsl) {
      spec.kind = ToolKind::dsl;
      spec.program = plan.scoring.tool_request.program;
      spec.metadata.method_summary = "plan program";
    } else {
      spec.kind = ToolKind::builtin;
      spec.evaluator_id = plan.scoring.tool_request.evaluator_id;
      spec.default_bindings = plan.scoring.tool_request.bindings;
      if (const auto* sig = find_signature(spec.evaluator_id)) spec.metadata.method_summary = sig->recipe;
    }
    try {
      library.register_tool(spec);
    } catch (const Error& e) {
      // An unregistrable body (for example a plan program that fails
      // validation) is recorded against a generic external placeholder.
      spec.kind = ToolKind::external;
      spec.external = config.generator ? config.generator->descriptor() : ExternalDescriptor{"template", {}, 1};
      precomputed = ToolRunError{e.code(), e.what()};
      library.register_tool(spec);
    }
    spec = *library.find(spec.metadata.tool_id);
    ToolRunResult result = precomputed ? *precomputed : try_run_tool(spec, evidence, plan, ctx);
    if (attempt(spec, result, i, true)) {
      ++out.synthesis.successes;
      out.synthesis.iterations.push_back(i);
      return out;
    }
    json codes = json::array();
    for (const auto& viol : out.verdicts.back().violations) codes.push_back(std::string(to_string(viol.code)));
    failure_context.push_back({{"failure_signature", out.verdicts.back().failure_signature()}, {"codes", codes}});
  }
  return out;
}

}  // namespace aiready
