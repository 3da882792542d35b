#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/inspector.hpp"

namespace aiready {

struct Dimension {
  std::string id;  // T, Q, AC or AS
  std::string name;
  double weight = 0.0;

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

struct SubDimension {
  std::string id;
  std::string dimension;
  std::string name;
  double weight = 0.0;

  friend bool operator==(const SubDimension&, const SubDimension&) = default;
};

// One clause of an applicability predicate. `values` is only used by
// modality_in.
struct Condition {
  std::string condition;
  std::vector<std::string> values;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// Conjunction of conditions; the empty predicate is always true.
struct ApplicabilityPredicate {
  std::vector<Condition> all_of;

  friend bool operator==(const ApplicabilityPredicate&, const ApplicabilityPredicate&) = default;
};

struct AtomicElement {
  std::string id;
  std::string sub_dimension;
  std::string name;
  double weight = 0.0;
  ApplicabilityPredicate applicability;
  std::string evaluator_hint;
  bool enabled = true;

  friend bool operator==(const AtomicElement&, const AtomicElement&) = default;
};

struct Registry {
  std::string version;
  std::vector<Dimension> dimensions;
  std::vector<SubDimension> sub_dimensions;
  std::vector<AtomicElement> elements;

  const Dimension* find_dimension(std::string_view id) const;
  const SubDimension* find_sub_dimension(std::string_view id) const;
  const AtomicElement* find_element(std::string_view id) const;

  friend bool operator==(const Registry&, const Registry&) = default;
};

/// What the knowledge base can answer, as (domain, kind) pairs. Lets the
/// selector evaluate kb_has_checklist without touching the KB itself.
struct KnowledgeFacts {
  std::set<std::pair<std::string, std::string>> available;

  bool has(std::string_view domain, std::string_view kind) const;
};

/// Names accepted in Condition::condition.
const std::vector<std::string>& known_conditions();

Registry load_registry(std::string_view document);
Registry load_registry_file(const std::filesystem::path& path);
const Registry& default_registry();
std::string_view default_registry_document();

/// Registry document including the evaluator annex.
json registry_to_json(const Registry& registry);

/// Ordered by (sub-dimension id, element id). Throws UnknownSubDimension.
std::vector<AtomicElement> list_elements(const Registry& registry,
                                         std::optional<std::string_view> sub_dimension = std::nullopt);

struct PredicateOutcome {
  bool satisfied = true;
  std::string failed_clause;  // empty when satisfied
};

/// Total over any profile. The first failing clause is reported.
PredicateOutcome evaluate_predicate(const ApplicabilityPredicate& predicate, const DataProfile& profile,
                                    const KnowledgeFacts& facts = {});

bool evaluate_condition(const Condition& condition, const DataProfile& profile, const KnowledgeFacts& facts = {});

}  // namespace aiready
