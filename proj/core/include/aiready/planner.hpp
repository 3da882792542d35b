#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/inspector.hpp"
#include "aiready/plan.hpp"
#include "aiready/taxonomy.hpp"

namespace aiready {

enum class KBKind { causal_checklist, condition_ranges, scarcity_rules, task_templates, governance_norms };

std::string_view to_string(KBKind k);
std::optional<KBKind> kb_kind_from_string(std::string_view s);

struct KBDocument {
  std::string id;
  std::string domain;  // lowercased
  KBKind kind = KBKind::causal_checklist;
  json body;
  std::vector<std::string> tokens;  // sorted, unique; from domain and body strings
};

struct KBIssue {
  std::string path;
  std::string message;
};

struct KBIndex {
  std::vector<KBDocument> documents;  // sorted by id
  std::vector<KBIssue> issues;

  KnowledgeFacts facts() const;
};

/// Validates one document. Throws Error(MalformedKBDocument).
KBDocument parse_kb_document(const json& doc);

/// Loads every *.json file in `dir`. Bad files are reported in `issues` and
/// skipped.
KBIndex ingest_kb(const std::filesystem::path& dir);
KBIndex make_kb_index(std::vector<KBDocument> documents);

/// Exact-domain documents first, then descending token overlap, then id.
/// Documents of another domain with no overlap are not returned.
std::vector<const KBDocument*> retrieve(const KBIndex& index, std::string_view domain_hint, KBKind kind,
                                        const std::vector<std::string>& query_tokens, std::size_t k);

struct PlannerConfig {
  std::uint64_t row_budget = 100000;
  std::uint64_t byte_budget = 64ull << 20;
  std::uint64_t row_budget_cap = 1600000;
  std::uint64_t byte_budget_cap = 1ull << 30;
  int max_refinements = 2;
  std::uint64_t seed = 0;
  std::size_t kb_top_k = 3;
};

/// Throws Error(NoEvidencePath) when the element's evidence class has no file
/// to look at.
ElementPlan plan_element(const AtomicElement& element, const DataProfile& profile, const KBIndex& index,
                         const PlannerConfig& config = {});

// Feedback strings: "insufficient_rows", "column_missing:<name>",
// "schema_mismatch".
struct SemanticFailure {
  std::string feedback;
};

/// Throws Error(RefinementExhausted) when the revision budget is spent or no
/// rule can make progress.
ElementPlan refine_plan(const ElementPlan& plan, const SemanticFailure& feedback, const DataProfile& profile,
                        const PlannerConfig& config = {});

}  // namespace aiready
