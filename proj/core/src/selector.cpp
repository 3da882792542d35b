#include "aiready/selector.hpp"

namespace aiready {

std::string_view to_string(ActivationStatus s) { return s == ActivationStatus::active ? "active" : "pruned"; }

const ActivationDecision* EvaluationManifest::find(std::string_view element_id) const {
  for (const auto& d : decisions) {
    if (d.element_id == element_id) return &d;
  }
  return nullptr;
}

std::vector<std::string> EvaluationManifest::active_ids() const {
  std::vector<std::string> out;
  for (const auto& d : decisions) {
    if (d.status == ActivationStatus::active) out.push_back(d.element_id);
  }
  return out;
}

EvaluationManifest build_manifest(const DataProfile& profile, const Registry& registry, const KnowledgeFacts& facts,
                                  const ApplicabilityHook& hook) {
  EvaluationManifest m;
  m.profile_digest = profile_digest(profile);
  for (const auto& e : registry.elements) {
    ActivationDecision d{e.id, ActivationStatus::active, {}};
    if (!e.enabled) {
      d = {e.id, ActivationStatus::pruned, "disabled"};
    } else if (auto outcome = evaluate_predicate(e.applicability, profile, facts); !outcome.satisfied) {
      d = {e.id, ActivationStatus::pruned, outcome.failed_clause};
    }
    if (hook && e.enabled) {
      if (auto over = hook(e, profile, d)) {
        d = *over;
        d.element_id = e.id;
        if (d.status == ActivationStatus::pruned && d.reason.empty()) d.reason = "hook";
        if (d.status == ActivationStatus::active) d.reason.clear();
      }
    }
    m.decisions.push_back(std::move(d));
  }
  return m;
}

json manifest_to_json(const EvaluationManifest& m) {
  json decisions = json::array();
  for (const auto& d : m.decisions) {
    decisions.push_back({{"element_id", d.element_id}, {"status", to_string(d.status)}, {"reason", d.reason}});
  }
  return json{{"profile_digest", m.profile_digest}, {"decisions", decisions}};
}

}  // namespace aiready
