#include "aiready/planner.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "aiready/error.hpp"
#include "aiready/evaluators.hpp"
#include "aiready/text.hpp"

namespace aiready {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void malformed(const std::string& id, const std::string& what) {
  fail(ErrorCode::MalformedKBDocument, "KB document '" + id + "': " + what);
}

bool string_array(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& s) { return s.is_string(); });
}

void validate_body(const std::string& id, KBKind kind, const json& body) {
  if (!body.is_object()) malformed(id, "body must be an object");
  switch (kind) {
    case KBKind::causal_checklist: {
      if (!body.contains("variables") || !body["variables"].is_array()) malformed(id, "needs variables[]");
      for (const auto& v : body["variables"]) {
        if (!v.is_object() || !v.contains("name") || !v["name"].is_string()) malformed(id, "variable needs a name");
        if (v.contains("synonyms") && !string_array(v["synonyms"])) malformed(id, "synonyms must be strings");
      }
      break;
    }
    case KBKind::condition_ranges: {
      if (!body.contains("ranges") || !body["ranges"].is_object()) malformed(id, "needs ranges{}");
      for (const auto& [var, r] : body["ranges"].items()) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
          malformed(id, "range for '" + var + "' must be [min, max]");
        }
        if (r[0].get<double>() > r[1].get<double>()) malformed(id, "range for '" + var + "' has min > max");
      }
      break;
    }
    case KBKind::scarcity_rules: {
      if (!body.contains("rules") || !body["rules"].is_array()) malformed(id, "needs rules[]");
      for (const auto& r : body["rules"]) {
        if (!r.is_object() || !r.contains("keyword") || !r["keyword"].is_string() || !r.contains("score") ||
            !r["score"].is_number())
          malformed(id, "rule needs keyword and score");
        double s = r["score"].get<double>();
        if (s < 0 || s > 1) malformed(id, "rule score outside [0,1]");
      }
      break;
    }
    case KBKind::task_templates: {
      if (!body.contains("templates") || !body["templates"].is_array()) malformed(id, "needs templates[]");
      for (const auto& t : body["templates"]) {
        if (!t.is_object() || !t.contains("task") || !t["task"].is_string()) malformed(id, "template needs a task");
        for (const char* key : {"requires", "keywords"}) {
          if (t.contains(key) && !string_array(t[key])) malformed(id, std::string(key) + " must be strings");
        }
      }
      break;
    }
    case KBKind::governance_norms: {
      for (const char* key : {"licenses", "identifier_patterns"}) {
        if (body.contains(key) && !string_array(body[key])) malformed(id, std::string(key) + " must be strings");
      }
      if (body.contains("identifier_patterns")) {
        for (const auto& p : body["identifier_patterns"]) {
          try {
            std::regex re(p.get<std::string>());
          } catch (const std::regex_error&) {
            malformed(id, "invalid identifier pattern");
          }
        }
      }
      break;
    }
  }
}

void collect_strings(const json& j, std::string& out) {
  if (j.is_string()) {
    out += j.get<std::string>();
    out += ' ';
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      out += k;
      out += ' ';
      collect_strings(v, out);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_strings(v, out);
  }
}

std::size_t overlap(const std::vector<std::string>& doc_tokens, const std::vector<std::string>& query) {
  std::set<std::string> q(query.begin(), query.end());
  std::size_t n = 0;
  for (const auto& t : q) n += std::binary_search(doc_tokens.begin(), doc_tokens.end(), t) ? 1 : 0;
  return n;
}

std::vector<std::string> query_tokens_for(const AtomicElement& e, const DataProfile& p) {
  std::vector<std::string> q = text::word_tokens(e.id);
  if (p.domain_hint) {
    for (auto& t : text::word_tokens(*p.domain_hint)) q.push_back(std::move(t));
  }
  for (const auto& cue : p.schema_cues) {
    for (const auto& c : cue.columns) {
      for (auto& t : text::word_tokens(c.name)) q.push_back(std::move(t));
    }
  }
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return q;
}

std::vector<std::string> usable_tabular_files(const DataProfile& p) {
  std::vector<std::string> out;
  for (const auto& f : p.primary_structured_files) {
    const FileNode* node = p.find_file(f);
    if (node && !node->read_error) out.push_back(f);
  }
  return out;
}

std::vector<std::string> descriptor_paths(const DataProfile& p) {
  std::vector<std::string> out;
  for (const auto& d : p.metadata_descriptors) out.push_back(d.relative_path);
  std::sort(out.begin(), out.end());
  return out;
}

struct Retrieval {
  json bindings = json::object();
  std::set<std::string> citations;
};

void bind_kb(const EvaluatorSignature& sig, const AtomicElement& e, const DataProfile& p, const KBIndex& index,
             const PlannerConfig& config, Retrieval& r) {
  const std::string domain = p.domain_hint.value_or("");
  const auto query = query_tokens_for(e, p);
  auto wants = [&](const char* name) {
    return std::any_of(sig.parameters.begin(), sig.parameters.end(), [&](const ParameterSpec& ps) { return ps.name == name; });
  };
  if (wants("checklist")) {
    json vars = json::array();
    for (const auto* d : retrieve(index, domain, KBKind::causal_checklist, query, config.kb_top_k)) {
      if (d->domain != domain || d->body["variables"].empty()) continue;
      vars = d->body["variables"];
      r.citations.insert(d->id);
      break;
    }
    r.bindings["checklist"] = vars;
  }
  if (wants("ranges")) {
    json ranges = json::object();
    for (const auto* d : retrieve(index, domain, KBKind::condition_ranges, query, config.kb_top_k)) {
      bool used = false;
      for (const auto& [var, range] : d->body["ranges"].items()) {
        if (!ranges.contains(var)) {
          ranges[var] = range;
          used = true;
        }
      }
      if (used) r.citations.insert(d->id);
    }
    r.bindings["ranges"] = ranges;
  }
  if (wants("rules")) {
    json rules = json::array();
    for (const auto* d : retrieve(index, domain, KBKind::scarcity_rules, query, config.kb_top_k)) {
      for (const auto& rule : d->body["rules"]) rules.push_back(rule);
      r.citations.insert(d->id);
    }
    r.bindings["rules"] = rules;
  }
  if (wants("templates")) {
    json templates = json::array();
    for (const auto* d : retrieve(index, domain, KBKind::task_templates, query, config.kb_top_k)) {
      for (const auto& t : d->body["templates"]) templates.push_back(t);
      r.citations.insert(d->id);
    }
    r.bindings["templates"] = templates;
  }
  if (wants("licenses") || wants("identifier_patterns")) {
    json licenses = json::array(), patterns = json::array();
    for (const auto* d : retrieve(index, domain, KBKind::governance_norms, query, config.kb_top_k)) {
      for (const auto& l : d->body.value("licenses", json::array())) licenses.push_back(l);
      for (const auto& l : d->body.value("identifier_patterns", json::array())) patterns.push_back(l);
      r.citations.insert(d->id);
    }
    if (wants("licenses")) r.bindings["licenses"] = licenses;
    if (wants("identifier_patterns")) r.bindings["identifier_patterns"] = patterns;
  }
}

bool column_exists(const DataProfile& p, const TargetCandidate& t) {
  const SchemaCue* s = p.find_schema(t.file);
  return s && !s->header_error && s->find(t.column);
}

}  // namespace

std::string_view to_string(KBKind k) {
  switch (k) {
    case KBKind::causal_checklist: return "causal_checklist";
    case KBKind::condition_ranges: return "condition_ranges";
    case KBKind::scarcity_rules: return "scarcity_rules";
    case KBKind::task_templates: return "task_templates";
    case KBKind::governance_norms: return "governance_norms";
  }
  return "causal_checklist";
}

std::optional<KBKind> kb_kind_from_string(std::string_view s) {
  for (auto k : {KBKind::causal_checklist, KBKind::condition_ranges, KBKind::scarcity_rules, KBKind::task_templates,
                 KBKind::governance_norms}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

KnowledgeFacts KBIndex::facts() const {
  KnowledgeFacts f;
  for (const auto& d : documents) {
    if (d.kind == KBKind::causal_checklist && d.body["variables"].empty()) continue;
    f.available.insert({d.domain, std::string(to_string(d.kind))});
  }
  return f;
}

KBDocument parse_kb_document(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::MalformedKBDocument, "KB document must be an object");
  for (const char* key : {"id", "domain", "kind"}) {
    if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty()) {
      fail(ErrorCode::MalformedKBDocument, std::string("KB document needs string field '") + key + "'");
    }
  }
  KBDocument d;
  d.id = doc["id"].get<std::string>();
  d.domain = text::to_lower(text::trim(doc["domain"].get<std::string>()));
  auto kind = kb_kind_from_string(doc["kind"].get<std::string>());
  if (!kind) malformed(d.id, "unknown kind '" + doc["kind"].get<std::string>() + "'");
  d.kind = *kind;
  if (!doc.contains("body")) malformed(d.id, "missing body");
  d.body = doc["body"];
  validate_body(d.id, d.kind, d.body);
  std::string all = d.domain + ' ';
  collect_strings(d.body, all);
  d.tokens = text::word_tokens(all);
  std::sort(d.tokens.begin(), d.tokens.end());
  d.tokens.erase(std::unique(d.tokens.begin(), d.tokens.end()), d.tokens.end());
  return d;
}

KBIndex make_kb_index(std::vector<KBDocument> documents) {
  KBIndex index;
  std::sort(documents.begin(), documents.end(), [](const KBDocument& a, const KBDocument& b) { return a.id < b.id; });
  for (auto& d : documents) {
    if (!index.documents.empty() && index.documents.back().id == d.id) {
      index.issues.push_back({d.id, "duplicate document id"});
      continue;
    }
    index.documents.push_back(std::move(d));
  }
  return index;
}

KBIndex ingest_kb(const fs::path& dir) {
  std::vector<KBDocument> docs;
  std::vector<KBIssue> issues;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    KBIndex empty;
    empty.issues.push_back({dir.string(), "not a directory"});
    return empty;
  }
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir, ec)) {
    if (de.is_regular_file() && de.path().extension() == ".json") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) {
      issues.push_back({f.filename().string(), "not valid JSON"});
      continue;
    }
    try {
      docs.push_back(parse_kb_document(doc));
    } catch (const Error& e) {
      issues.push_back({f.filename().string(), e.what()});
    }
  }
  KBIndex index = make_kb_index(std::move(docs));
  issues.insert(issues.end(), index.issues.begin(), index.issues.end());
  index.issues = std::move(issues);
  return index;
}

std::vector<const KBDocument*> retrieve(const KBIndex& index, std::string_view domain_hint, KBKind kind,
                                        const std::vector<std::string>& query_tokens, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidConfig, "retrieve needs k >= 1");
  std::string domain = text::to_lower(text::trim(domain_hint));
  struct Ranked {
    const KBDocument* doc;
    bool exact;
    std::size_t overlap;
  };
  std::vector<Ranked> ranked;
  for (const auto& d : index.documents) {
    if (d.kind != kind) continue;
    bool exact = !domain.empty() && d.domain == domain;
    std::size_t ov = overlap(d.tokens, query_tokens);
    if (!exact && ov == 0) continue;
    ranked.push_back({&d, exact, ov});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.exact != b.exact) return a.exact;
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.doc->id < b.doc->id;
  });
  std::vector<const KBDocument*> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].doc);
  return out;
}

ElementPlan plan_element(const AtomicElement& element, const DataProfile& profile, const KBIndex& index,
                         const PlannerConfig& config) {
  ElementPlan plan;
  plan.element_id = element.id;
  plan.loading.row_budget = config.row_budget;
  plan.loading.byte_budget = config.byte_budget;
  plan.loading.seed = config.seed;

  const EvaluatorSignature* sig = nullptr;
  EvidenceClass cls = EvidenceClass::metadata_and_tabular;
  if (element.evaluator_hint != "external") {
    sig = find_signature(element.evaluator_hint);
    if (!sig) fail(ErrorCode::UnknownEvaluator, "no evaluator '" + element.evaluator_hint + "'");
    cls = sig->required_evidence;
  }
  plan.loading.evidence = cls;

  std::vector<std::string> targets;
  switch (cls) {
    case EvidenceClass::tabular:
      targets = usable_tabular_files(profile);
      break;
    case EvidenceClass::image:
      for (const auto* f : image_files(profile)) targets.push_back(f->relative_path);
      break;
    case EvidenceClass::files:
      for (const auto* f : profile.data_files()) targets.push_back(f->relative_path);
      if (targets.empty()) {
        for (const auto& f : profile.files) targets.push_back(f.relative_path);
      }
      break;
    case EvidenceClass::metadata:
      targets = descriptor_paths(profile);
      break;
    case EvidenceClass::metadata_and_tabular: {
      targets = descriptor_paths(profile);
      auto tab = usable_tabular_files(profile);
      targets.insert(targets.end(), tab.begin(), tab.end());
      std::sort(targets.begin(), targets.end());
      break;
    }
    case EvidenceClass::profile:
      break;
  }
  bool may_be_empty = cls == EvidenceClass::metadata || cls == EvidenceClass::metadata_and_tabular ||
                      cls == EvidenceClass::profile;
  if (targets.empty() && !may_be_empty) {
    fail(ErrorCode::NoEvidencePath,
         "element '" + element.id + "' needs " + std::string(to_string(cls)) + " evidence but the profile has none");
  }
  plan.loading.target_files = targets;
  std::size_t tabular_targets = 0;
  for (const auto& t : targets) {
    const FileNode* n = profile.find_file(t);
    if (n && !n->descriptor && is_probeable_tabular(n->format.format)) ++tabular_targets;
  }
  plan.loading.sampling = tabular_targets > 1 ? Sampling::stratified_by_file : Sampling::head;

  if (!sig) {
    plan.scoring.tool_request.kind = ToolKind::external;
    plan.scoring.tool_request.request_template = {{"element_id", element.id}, {"evaluator_hint", "external"}};
    plan.scoring.normalization = {};
    return plan;
  }

  Retrieval r;
  bind_kb(*sig, element, profile, index, config, r);
  auto has_param = [&](const char* name) {
    return std::any_of(sig->parameters.begin(), sig->parameters.end(), [&](const ParameterSpec& p) { return p.name == name; });
  };
  if (has_param("target_column") && !profile.candidate_target_columns.empty()) {
    const auto& t = profile.candidate_target_columns.front();
    r.bindings["target_file"] = t.file;
    r.bindings["target_column"] = t.column;
    if (element.evaluator_hint == "label_balance") {
      plan.loading.columns_of_interest = std::vector<std::string>{t.column};
      plan.loading.target_files = {t.file};
      plan.loading.sampling = Sampling::head;
    }
  }
  if (has_param("seed")) r.bindings["seed"] = config.seed;
  validate_bindings(*sig, r.bindings);

  plan.scoring.tool_request.kind = ToolKind::builtin;
  plan.scoring.tool_request.evaluator_id = sig->evaluator_id;
  plan.scoring.tool_request.bindings = r.bindings;
  plan.scoring.normalization = sig->normalization();
  plan.scoring.interpretables = sig->required_interpretables();
  plan.kb_citations.assign(r.citations.begin(), r.citations.end());
  return plan;
}

ElementPlan refine_plan(const ElementPlan& plan, const SemanticFailure& feedback, const DataProfile& profile,
                        const PlannerConfig& config) {
  if (plan.revision >= config.max_refinements) {
    fail(ErrorCode::RefinementExhausted, "element '" + plan.element_id + "' used all " +
                                             std::to_string(config.max_refinements) + " refinements");
  }
  ElementPlan next = plan;
  next.revision = plan.revision + 1;
  const std::string& f = feedback.feedback;
  auto exhausted = [&](const std::string& why) -> ElementPlan {
    fail(ErrorCode::RefinementExhausted, "element '" + plan.element_id + "': " + why);
  };

  if (f == "insufficient_rows") {
    if (plan.loading.row_budget < config.row_budget_cap) {
      next.loading.row_budget = std::min(config.row_budget_cap, plan.loading.row_budget * 2);
    } else if (plan.loading.byte_budget < config.byte_budget_cap) {
      next.loading.byte_budget = std::min(config.byte_budget_cap, plan.loading.byte_budget * 2);
    } else {
      return exhausted("budgets already at their caps");
    }
    return next;
  }

  if (f.rfind("column_missing:", 0) == 0) {
    std::string column = f.substr(std::string("column_missing:").size());
    json& b = next.scoring.tool_request.bindings;
    if (b.is_object() && b.value("target_column", std::string()) == column) {
      // Move to the next candidate after the current one so choices never cycle.
      TargetCandidate current{b.value("target_file", std::string()), column};
      const auto& cands = profile.candidate_target_columns;
      auto it = std::find(cands.begin(), cands.end(), current);
      auto from = it == cands.end() ? cands.begin() : it + 1;
      for (auto c = from; c != cands.end(); ++c) {
        if (!column_exists(profile, *c) || c->column == column) continue;
        b["target_file"] = c->file;
        b["target_column"] = c->column;
        if (next.loading.columns_of_interest) next.loading.columns_of_interest = std::vector<std::string>{c->column};
        if (plan.loading.target_files.size() == 1) next.loading.target_files = {c->file};
        return next;
      }
      return exhausted("no alternative target column to '" + column + "'");
    }
    if (next.loading.columns_of_interest) {
      auto& cols = *next.loading.columns_of_interest;
      auto it = std::find(cols.begin(), cols.end(), column);
      if (it != cols.end()) {
        cols.erase(it);
        if (cols.empty()) return exhausted("no columns of interest left");
        return next;
      }
    }
    return exhausted("column '" + column + "' is not part of the plan");
  }

  if (f == "schema_mismatch") {
    // Keep only files that carry every column the plan depends on.
    std::vector<std::string> needed;
    if (plan.loading.columns_of_interest) needed = *plan.loading.columns_of_interest;
    const json& b = plan.scoring.tool_request.bindings;
    if (b.is_object() && !b.value("target_column", std::string()).empty()) needed.push_back(b["target_column"]);
    std::vector<std::string> files;
    for (const auto& path : plan.loading.target_files) {
      const SchemaCue* s = profile.find_schema(path);
      const FileNode* n = profile.find_file(path);
      bool tabular = n && !n->descriptor && is_probeable_tabular(n->format.format);
      if (!tabular) {
        files.push_back(path);
        continue;
      }
      if (!s || s->header_error) continue;
      if (std::all_of(needed.begin(), needed.end(), [&](const std::string& c) { return s->find(c) != nullptr; })) {
        files.push_back(path);
      }
    }
    if (files.empty() || files == plan.loading.target_files) return exhausted("no narrower file selection");
    next.loading.target_files = files;
    return next;
  }

  return exhausted("unrecognized feedback '" + f + "'");
}

}  // namespace aiready
