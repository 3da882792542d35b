#include "aiready/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "aiready/text.hpp"

namespace aiready {

namespace {

constexpr const char* kFailedCell = "\xE2\x9C\x97";  // ✗

// Advice shown for weak sub-dimensions. Keys are sub-dimension ids.
const std::map<std::string, std::string>& advice_table() {
  static const std::map<std::string, std::string> t = {
      {"T1", "Mint a persistent identifier, add a machine-readable descriptor and store data in open formats."},
      {"T2", "State the license, cite the original sources, tag a version and publish checksums."},
      {"T3", "Document consent, strip personal identifiers and note any dual-use considerations."},
      {"Q1", "Fill or impute missing cells and repair files that fail to parse."},
      {"Q2", "Check units and sensor calibration; clip or re-measure values outside physical ranges."},
      {"Q3", "Remove exact and near-duplicate records before splitting."},
      {"Q4", "Align column schemas, text encodings and file formats across the collection."},
      {"AC1", "Ship loader-friendly files, define train/validation/test splits and mark the target."},
      {"AC2", "Collect more samples or reduce the feature count relative to the sample size."},
      {"AC3", "Rebalance classes by resampling or reweighting, or gather more minority examples."},
      {"AC4", "Revisit feature selection; few features carry information about the target."},
      {"AS1", "Describe which tasks the data supports and include the fields those tasks need."},
      {"AS2", "Consider few-shot or transfer learning, or pool with related datasets."},
      {"AS3", "Record the domain variables that drive the phenomenon, not only the outcome."},
      {"AS4", "Extend sampling to cover the documented operating range of each condition variable."},
  };
  return t;
}

std::string md_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

std::string cell(const std::optional<double>& score, ElementStatus status) {
  if (score) return display_score(*score);
  return status == ElementStatus::failed ? kFailedCell : "-";
}

json node_json(const AggregateNode& n) {
  json j = {{"id", n.id},
            {"name", n.name},
            {"weight", n.weight},
            {"effective_weight", n.effective_weight},
            {"status", std::string(to_string(n.status))}};
  j["score"] = n.score ? json(*n.score) : json(nullptr);
  return j;
}

}  // namespace

std::string_view to_string(ElementStatus s) {
  switch (s) {
    case ElementStatus::scored: return "scored";
    case ElementStatus::pruned: return "pruned";
    case ElementStatus::failed: return "failed";
  }
  return "pruned";
}

ElementScore normalize(const ExecutionResult& result, const ScoringStrategy& scoring) {
  ElementScore s;
  s.element_id = result.element_id;
  s.status = ElementStatus::scored;
  s.score = scoring.normalization.apply_clamped(result.raw_output.score_candidate);
  s.interpretables = result.raw_output.interpretables;
  s.provenance = Provenance{result.tool_id, result.iterations_used, result.raw_output.evidence_summary, result.truncated,
                            result.synthesized};
  return s;
}

ElementScore pruned_score(std::string element_id, std::string reason) {
  ElementScore s;
  s.element_id = std::move(element_id);
  s.status = ElementStatus::pruned;
  s.reason = std::move(reason);
  return s;
}

ElementScore failed_score(std::string element_id, std::string reason, json verdicts) {
  ElementScore s;
  s.element_id = std::move(element_id);
  s.status = ElementStatus::failed;
  s.reason = std::move(reason);
  s.verdicts = std::move(verdicts);
  return s;
}

const ElementScore* ScoreTree::element(std::string_view id) const {
  for (const auto& e : elements) {
    if (e.element_id == id) return &e;
  }
  return nullptr;
}

const AggregateNode* ScoreTree::sub_dimension(std::string_view id) const {
  for (const auto& n : sub_dimensions) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const AggregateNode* ScoreTree::dimension(std::string_view id) const {
  for (const auto& n : dimensions) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::optional<double> renormalized_mean(const std::vector<std::pair<double, std::optional<double>>>& children) {
  double wsum = 0.0, acc = 0.0, plain = 0.0;
  std::size_t n = 0;
  for (const auto& [w, s] : children) {
    if (!s) continue;
    wsum += w;
    acc += w * *s;
    plain += *s;
    ++n;
  }
  if (n == 0) return std::nullopt;
  if (wsum <= 0.0) return plain / static_cast<double>(n);
  return acc / wsum;
}

namespace {

// Sets effective weights on children given their declared weights.
template <typename Child, typename GetWeight, typename GetScore, typename SetEff>
void assign_effective(std::vector<Child*>& kids, GetWeight w, GetScore s, SetEff set) {
  double wsum = 0.0;
  std::size_t n = 0;
  for (auto* k : kids) {
    if (s(*k)) {
      wsum += w(*k);
      ++n;
    }
  }
  for (auto* k : kids) {
    if (!s(*k)) {
      set(*k, 0.0);
    } else {
      set(*k, wsum > 0.0 ? w(*k) / wsum : 1.0 / static_cast<double>(n));
    }
  }
}

}  // namespace

ScoreTree aggregate(const std::vector<ElementScore>& scores, const Registry& registry) {
  ScoreTree tree;
  std::map<std::string, const ElementScore*> by_id;
  for (const auto& s : scores) by_id[s.element_id] = &s;
  for (const auto& e : registry.elements) {
    auto it = by_id.find(e.id);
    tree.elements.push_back(it != by_id.end() ? *it->second : pruned_score(e.id, "not evaluated"));
  }
  auto element_weight = [&](const ElementScore& s) { return registry.find_element(s.element_id)->weight; };

  for (const auto& sd : registry.sub_dimensions) {
    std::vector<ElementScore*> kids;
    for (auto& es : tree.elements) {
      if (registry.find_element(es.element_id)->sub_dimension == sd.id) kids.push_back(&es);
    }
    std::vector<std::pair<double, std::optional<double>>> ws;
    bool any_failed = false;
    for (auto* k : kids) {
      ws.emplace_back(element_weight(*k), k->score);
      any_failed |= k->status == ElementStatus::failed;
    }
    assign_effective(
        kids, element_weight, [](const ElementScore& x) { return x.score.has_value(); },
        [](ElementScore& x, double v) { x.effective_weight = v; });
    AggregateNode node{sd.id, sd.name, sd.weight, 0.0, renormalized_mean(ws), ElementStatus::pruned};
    node.status = node.score ? ElementStatus::scored : any_failed ? ElementStatus::failed : ElementStatus::pruned;
    tree.sub_dimensions.push_back(node);
  }

  auto agg_weight = [](const AggregateNode& n) { return n.weight; };
  auto agg_scored = [](const AggregateNode& n) { return n.score.has_value(); };
  auto agg_set = [](AggregateNode& n, double v) { n.effective_weight = v; };

  for (const auto& d : registry.dimensions) {
    std::vector<AggregateNode*> kids;
    for (auto& n : tree.sub_dimensions) {
      if (registry.find_sub_dimension(n.id)->dimension == d.id) kids.push_back(&n);
    }
    std::vector<std::pair<double, std::optional<double>>> ws;
    bool any_failed = false;
    for (auto* k : kids) {
      ws.emplace_back(k->weight, k->score);
      any_failed |= k->status == ElementStatus::failed;
    }
    assign_effective(kids, agg_weight, agg_scored, agg_set);
    AggregateNode node{d.id, d.name, d.weight, 0.0, renormalized_mean(ws), ElementStatus::pruned};
    node.status = node.score ? ElementStatus::scored : any_failed ? ElementStatus::failed : ElementStatus::pruned;
    tree.dimensions.push_back(node);
  }

  std::vector<AggregateNode*> dims;
  std::vector<std::pair<double, std::optional<double>>> ws;
  for (auto& d : tree.dimensions) {
    dims.push_back(&d);
    ws.emplace_back(d.weight, d.score);
  }
  assign_effective(dims, agg_weight, agg_scored, agg_set);
  tree.total = renormalized_mean(ws);
  return tree;
}

std::string display_score(double score) { return text::fixed(score * 100.0, 1); }

AIReadyReport build_report(std::string dataset, const DataProfile& profile, const json& manifest, ScoreTree tree,
                           const Registry& registry, const RunMetadata& metadata, const ReportOptions& options) {
  AIReadyReport r;
  r.dataset = std::move(dataset);
  r.profile_digest = profile_digest(profile);
  r.profile_summary = profile_summary(profile);
  r.manifest = manifest;
  r.metadata = metadata;

  for (const auto& es : tree.elements) {
    const AtomicElement* el = registry.find_element(es.element_id);
    bool weak = es.status == ElementStatus::scored && *es.score < options.deficiency_threshold;
    if (!weak && es.status != ElementStatus::failed) continue;
    json d = {{"element_id", es.element_id},
              {"sub_dimension", el->sub_dimension},
              {"status", std::string(to_string(es.status))},
              {"interpretables", es.interpretables}};
    d["score"] = es.score ? json(*es.score) : json(nullptr);
    if (es.status == ElementStatus::failed) {
      d["reason"] = es.reason;
      d["verdicts"] = es.verdicts;
    }
    r.diagnostics.push_back(d);
  }

  for (const auto& sd : tree.sub_dimensions) {
    if (!sd.score || *sd.score >= options.deficiency_threshold) continue;
    auto it = advice_table().find(sd.id);
    std::string advice = it != advice_table().end() ? it->second : "Review the weakest elements listed in diagnostics.";
    r.remediation.push_back({{"sub_dimension", sd.id}, {"name", sd.name}, {"score", *sd.score}, {"advice", advice}});
  }

  // Downstream use is only suggested when a target, adequate scale and a
  // knowledge-base task match all line up.
  const ElementScore* scale = nullptr;
  const ElementScore* tasks = nullptr;
  for (const auto& es : tree.elements) {
    const AtomicElement* el = registry.find_element(es.element_id);
    if (el->evaluator_hint == "sample_scale" && es.score) scale = &es;
    if (el->evaluator_hint == "task_multiplicity" && es.score) tasks = &es;
  }
  json task_names = json::array();
  if (tasks && tasks->interpretables.contains("tasks")) {
    const json& t = tasks->interpretables["tasks"];
    if (t.is_array()) task_names = t;
    if (t.is_string()) {
      std::stringstream ss(t.get<std::string>());
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) task_names.push_back(item);
      }
    }
  }
  if (!profile.candidate_target_columns.empty() && scale && *scale->score >= 0.5 && tasks &&
      !tasks->kb_citations.empty() && !task_names.empty()) {
    const auto& t = profile.candidate_target_columns.front();
    r.downstream = json{{"target", {{"file", t.file}, {"column", t.column}}},
                        {"tasks", task_names},
                        {"scale_score", *scale->score},
                        {"kb_citations", tasks->kb_citations}};
  }
  r.tree = std::move(tree);
  return r;
}

json report_to_json(const AIReadyReport& r) {
  json elements = json::array();
  for (const auto& es : r.tree.elements) {
    json e = {{"element_id", es.element_id},
              {"status", std::string(to_string(es.status))},
              {"interpretables", es.interpretables},
              {"effective_weight", es.effective_weight},
              {"kb_citations", es.kb_citations}};
    e["score"] = es.score ? json(*es.score) : json(nullptr);
    e["display"] = es.score ? json(display_score(*es.score)) : json(es.status == ElementStatus::failed ? kFailedCell : "-");
    if (!es.reason.empty()) e["reason"] = es.reason;
    if (es.status == ElementStatus::failed) e["verdicts"] = es.verdicts;
    if (es.provenance) {
      e["provenance"] = {{"tool_id", es.provenance->tool_id},
                         {"iterations_used", es.provenance->iterations_used},
                         {"evidence_summary", es.provenance->evidence_summary},
                         {"truncated", es.provenance->truncated},
                         {"synthesized", es.provenance->synthesized}};
    }
    elements.push_back(e);
  }
  json subs = json::array(), dims = json::array();
  for (const auto& n : r.tree.sub_dimensions) subs.push_back(node_json(n));
  for (const auto& n : r.tree.dimensions) dims.push_back(node_json(n));
  json tree = {{"elements", elements}, {"sub_dimensions", subs}, {"dimensions", dims}};
  tree["total"] = r.tree.total ? json(*r.tree.total) : json(nullptr);
  json j = {{"dataset", r.dataset},
            {"profile_digest", r.profile_digest},
            {"profile_summary", r.profile_summary},
            {"manifest", r.manifest},
            {"scores", tree},
            {"diagnostics", r.diagnostics},
            {"remediation", r.remediation},
            {"aggregation",
             "weighted mean per level; pruned and failed children are left out and sibling weights renormalized"},
            {"run", {{"seed", r.metadata.seed},
                     {"config_digest", r.metadata.config_digest},
                     {"registry_version", r.metadata.registry_version}}}};
  j["downstream"] = r.downstream ? *r.downstream : json(nullptr);
  return j;
}

std::string render_json(const AIReadyReport& report) { return canonical_dump_pretty(report_to_json(report)) + "\n"; }

std::string render_matrix(const std::vector<std::pair<std::string, const ScoreTree*>>& rows, const Registry& registry) {
  std::ostringstream md;
  md << "| Dataset |";
  for (const auto& sd : registry.sub_dimensions) md << ' ' << sd.id << " |";
  for (const auto& d : registry.dimensions) md << ' ' << d.id << " |";
  md << " Total |\n|---|";
  for (std::size_t i = 0; i < registry.sub_dimensions.size() + registry.dimensions.size() + 1; ++i) md << "---:|";
  md << '\n';
  for (const auto& [name, tree] : rows) {
    md << "| " << md_escape(name) << " |";
    for (const auto& sd : registry.sub_dimensions) {
      const AggregateNode* n = tree->sub_dimension(sd.id);
      md << ' ' << (n ? cell(n->score, n->status) : "-") << " |";
    }
    for (const auto& d : registry.dimensions) {
      const AggregateNode* n = tree->dimension(d.id);
      md << ' ' << (n ? cell(n->score, n->status) : "-") << " |";
    }
    md << ' ' << (tree->total ? display_score(*tree->total) : "-") << " |\n";
  }
  return md.str();
}

std::string render_markdown(const AIReadyReport& r, const Registry& registry) {
  std::ostringstream md;
  md << "# AI-readiness report: " << md_escape(r.dataset) << "\n\n";
  const json& p = r.profile_summary;
  md << "- Modality: " << p.value("modality", std::string("unknown")) << "\n";
  md << "- Files: " << p.value("file_count", 0) << " (" << p.value("total_bytes", std::uint64_t{0}) << " bytes)\n";
  if (p.contains("domain_hint") && p["domain_hint"].is_string()) {
    md << "- Domain: " << md_escape(p["domain_hint"].get<std::string>()) << "\n";
  }
  md << "- Registry: " << r.metadata.registry_version << ", seed " << r.metadata.seed << "\n";
  md << "- Scores are shown on a 0-100 scale. \"-\" marks pruned cells, " << kFailedCell
     << " marks failures. Both are left out of the aggregate and sibling weights are renormalized.\n\n";

  md << "## Score matrix\n\n" << render_matrix({{r.dataset, &r.tree}}, registry) << "\n";

  md << "## Elements\n\n| Element | Sub-dimension | Status | Score | Tool | Iterations |\n|---|---|---|---:|---|---:|\n";
  for (const auto& es : r.tree.elements) {
    const AtomicElement* el = registry.find_element(es.element_id);
    md << "| " << es.element_id << " | " << el->sub_dimension << " | " << to_string(es.status) << " | "
       << cell(es.score, es.status) << " | " << (es.provenance ? es.provenance->tool_id : std::string()) << " | "
       << (es.provenance ? std::to_string(es.provenance->iterations_used) : std::string()) << " |\n";
  }
  md << "\n## Diagnostics\n\n";
  if (r.diagnostics.empty()) md << "No element fell below the threshold.\n";
  for (const auto& d : r.diagnostics) {
    md << "- **" << d["element_id"].get<std::string>() << "** (" << d["sub_dimension"].get<std::string>() << "): ";
    if (d["score"].is_number()) {
      md << display_score(d["score"].get<double>());
    } else {
      md << "failed, " << md_escape(d.value("reason", std::string()));
    }
    if (!d["interpretables"].empty()) md << ". " << md_escape(canonical_dump(d["interpretables"]));
    md << "\n";
  }
  md << "\n## Remediation\n\n";
  if (r.remediation.empty()) md << "Nothing to suggest.\n";
  for (const auto& x : r.remediation) {
    md << "- " << x["sub_dimension"].get<std::string>() << " " << x["name"].get<std::string>() << " ("
       << display_score(x["score"].get<double>()) << "): " << x["advice"].get<std::string>() << "\n";
  }
  if (r.downstream) {
    const json& d = *r.downstream;
    md << "\n## Downstream use\n\nTarget `" << md_escape(d["target"]["column"].get<std::string>()) << "` in `"
       << md_escape(d["target"]["file"].get<std::string>()) << "`. Candidate tasks:";
    for (const auto& t : d["tasks"]) md << ' ' << md_escape(t.is_string() ? t.get<std::string>() : t.dump()) << ';';
    md << "\n";
  }
  return md.str();
}

}  // namespace aiready
