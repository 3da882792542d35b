#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/inspector.hpp"
#include "aiready/taxonomy.hpp"

namespace aiready {

enum class ActivationStatus { active, pruned };

std::string_view to_string(ActivationStatus s);

struct ActivationDecision {
  std::string element_id;
  ActivationStatus status = ActivationStatus::active;
  std::string reason;  // failed clause, empty when active

  friend bool operator==(const ActivationDecision&, const ActivationDecision&) = default;
};

struct EvaluationManifest {
  std::string profile_digest;
  std::vector<ActivationDecision> decisions;  // registry order

  const ActivationDecision* find(std::string_view element_id) const;
  std::vector<std::string> active_ids() const;
};

/// Optional second opinion after the rule verdict. Returning a decision
/// overrides the rule; nullopt keeps it. Must not touch dataset files.
using ApplicabilityHook =
    std::function<std::optional<ActivationDecision>(const AtomicElement&, const DataProfile&, const ActivationDecision&)>;

EvaluationManifest build_manifest(const DataProfile& profile, const Registry& registry, const KnowledgeFacts& facts = {},
                                  const ApplicabilityHook& hook = {});

json manifest_to_json(const EvaluationManifest& manifest);

}  // namespace aiready
