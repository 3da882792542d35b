#include "aiready/plan.hpp"

#include <algorithm>

#include "aiready/error.hpp"

namespace aiready {

std::string_view to_string(EvidenceClass c) {
  switch (c) {
    case EvidenceClass::tabular: return "tabular";
    case EvidenceClass::image: return "image";
    case EvidenceClass::files: return "files";
    case EvidenceClass::metadata: return "metadata";
    case EvidenceClass::metadata_and_tabular: return "metadata_and_tabular";
    case EvidenceClass::profile: return "profile";
  }
  return "profile";
}

std::optional<EvidenceClass> evidence_class_from_string(std::string_view s) {
  for (auto c : {EvidenceClass::tabular, EvidenceClass::image, EvidenceClass::files, EvidenceClass::metadata,
                 EvidenceClass::metadata_and_tabular, EvidenceClass::profile}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Sampling s) {
  switch (s) {
    case Sampling::head: return "head";
    case Sampling::reservoir: return "reservoir";
    case Sampling::stratified_by_file: return "stratified_by_file";
  }
  return "head";
}

std::optional<Sampling> sampling_from_string(std::string_view s) {
  for (auto v : {Sampling::head, Sampling::reservoir, Sampling::stratified_by_file}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string_view to_string(ToolKind k) {
  switch (k) {
    case ToolKind::builtin: return "builtin";
    case ToolKind::dsl: return "dsl";
    case ToolKind::external: return "external";
  }
  return "builtin";
}

std::optional<ToolKind> tool_kind_from_string(std::string_view s) {
  for (auto k : {ToolKind::builtin, ToolKind::dsl, ToolKind::external}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

double Normalization::apply(double raw) const {
  double span = raw_max - raw_min;
  double s = span > 0 ? (raw - raw_min) / span : raw - raw_min;
  return invert ? 1.0 - s : s;
}

double Normalization::apply_clamped(double raw) const { return std::clamp(apply(raw), 0.0, 1.0); }

json plan_to_json(const ElementPlan& p) {
  json loading{{"evidence", to_string(p.loading.evidence)},
               {"target_files", p.loading.target_files},
               {"row_budget", p.loading.row_budget},
               {"byte_budget", p.loading.byte_budget},
               {"sampling", to_string(p.loading.sampling)},
               {"seed", p.loading.seed}};
  loading["columns_of_interest"] = p.loading.columns_of_interest ? json(*p.loading.columns_of_interest) : json(nullptr);
  const ToolRequest& t = p.scoring.tool_request;
  json request{{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case ToolKind::builtin:
      request["evaluator_id"] = t.evaluator_id;
      request["bindings"] = t.bindings;
      break;
    case ToolKind::dsl: request["program"] = t.program; break;
    case ToolKind::external: request["request_template"] = t.request_template; break;
  }
  json scoring{{"tool_request", request},
               {"normalization",
                {{"raw_min", p.scoring.normalization.raw_min},
                 {"raw_max", p.scoring.normalization.raw_max},
                 {"invert", p.scoring.normalization.invert}}},
               {"interpretables", p.scoring.interpretables}};
  return json{{"element_id", p.element_id},
              {"loading", loading},
              {"scoring", scoring},
              {"kb_citations", p.kb_citations},
              {"revision", p.revision}};
}

ElementPlan plan_from_json(const json& j) {
  try {
    ElementPlan p;
    p.element_id = j.at("element_id").get<std::string>();
    const json& l = j.at("loading");
    auto ev = evidence_class_from_string(l.at("evidence").get<std::string>());
    auto sm = sampling_from_string(l.at("sampling").get<std::string>());
    if (!ev || !sm) fail(ErrorCode::InvalidConfig, "plan has unknown evidence class or sampling");
    p.loading.evidence = *ev;
    p.loading.sampling = *sm;
    p.loading.target_files = l.at("target_files").get<std::vector<std::string>>();
    p.loading.row_budget = l.at("row_budget").get<std::uint64_t>();
    p.loading.byte_budget = l.at("byte_budget").get<std::uint64_t>();
    p.loading.seed = l.value("seed", std::uint64_t{0});
    if (l.contains("columns_of_interest") && !l["columns_of_interest"].is_null()) {
      p.loading.columns_of_interest = l["columns_of_interest"].get<std::vector<std::string>>();
    }
    const json& s = j.at("scoring");
    const json& r = s.at("tool_request");
    auto kind = tool_kind_from_string(r.at("kind").get<std::string>());
    if (!kind) fail(ErrorCode::InvalidConfig, "plan has unknown tool kind");
    p.scoring.tool_request.kind = *kind;
    p.scoring.tool_request.evaluator_id = r.value("evaluator_id", std::string());
    p.scoring.tool_request.bindings = r.value("bindings", json::object());
    if (r.contains("program")) p.scoring.tool_request.program = r["program"];
    if (r.contains("request_template")) p.scoring.tool_request.request_template = r["request_template"];
    const json& n = s.at("normalization");
    p.scoring.normalization = {n.at("raw_min").get<double>(), n.at("raw_max").get<double>(), n.at("invert").get<bool>()};
    p.scoring.interpretables = s.at("interpretables").get<std::vector<std::string>>();
    p.kb_citations = j.at("kb_citations").get<std::vector<std::string>>();
    p.revision = j.at("revision").get<int>();
    return p;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("malformed plan: ") + e.what());
  }
}

std::string plan_strategy_digest(const ElementPlan& plan) {
  json j = plan_to_json(plan);
  return json_digest(json{{"loading", j["loading"]}, {"scoring", j["scoring"]}});
}

}  // namespace aiready
