#include <gtest/gtest.h>

#include "aiready/io.hpp"
#include "aiready/planner.hpp"
#include "aiready/selector.hpp"
#include "aiready/taxonomy.hpp"
#include "test_support.hpp"

using namespace aiready;

namespace {

ActivationStatus status_of(const EvaluationManifest& m, const std::string& id) {
  const auto* d = m.find(id);
  EXPECT_NE(d, nullptr) << id;
  return d ? d->status : ActivationStatus::pruned;
}

}  // namespace

TEST(Selector, ImageOnlyPrunesDataEvidenceElements) {
  auto p = build_profile(aitest::dataset_fixture("image_only"));
  auto m = build_manifest(p, default_registry());
  EXPECT_EQ(status_of(m, "label_balance"), ActivationStatus::pruned);
  EXPECT_EQ(status_of(m, "feature_target_association"), ActivationStatus::pruned);
  EXPECT_EQ(status_of(m, "condition_range_coverage"), ActivationStatus::pruned);
  EXPECT_EQ(status_of(m, "persistent_identifier"), ActivationStatus::active);
}

TEST(Selector, CategoricalTargetActivatesBalanceAndAssociation) {
  auto p = build_profile(aitest::dataset_fixture("tabular_labeled"));
  auto m = build_manifest(p, default_registry());
  EXPECT_EQ(status_of(m, "label_balance"), ActivationStatus::active);
  EXPECT_EQ(status_of(m, "feature_target_association"), ActivationStatus::active);
  EXPECT_EQ(status_of(m, "condition_range_coverage"), ActivationStatus::active);
}

TEST(Selector, EmptyDirectoryKeepsOnlyMetadataChecks) {
  aitest::TempDir d;
  auto p = build_profile(d.path());
  const Registry& r = default_registry();
  auto m = build_manifest(p, r);
  for (const auto& e : r.elements) {
    auto s = status_of(m, e.id);
    if (e.applicability.all_of.empty()) {
      EXPECT_EQ(s, ActivationStatus::active) << e.id;
      EXPECT_EQ(e.sub_dimension[0], 'T') << e.id;
    } else {
      EXPECT_EQ(s, ActivationStatus::pruned) << e.id;
    }
  }
}

TEST(Selector, PrunedDecisionsCarryReasons) {
  for (const auto& name : {"image_only", "tabular_labeled", "ecology_survey"}) {
    auto p = build_profile(aitest::dataset_fixture(name));
    auto m = build_manifest(p, default_registry());
    ASSERT_EQ(m.decisions.size(), default_registry().elements.size());
    for (std::size_t i = 0; i < m.decisions.size(); ++i) {
      EXPECT_EQ(m.decisions[i].element_id, default_registry().elements[i].id);
      if (m.decisions[i].status == ActivationStatus::pruned) EXPECT_FALSE(m.decisions[i].reason.empty());
      else EXPECT_TRUE(m.decisions[i].reason.empty());
    }
  }
}

TEST(Selector, PruningMatchesIndependentPredicateCheck) {
  auto kb = ingest_kb(aitest::kb_fixture());
  auto facts = kb.facts();
  for (const auto& name : aitest::domain_fixtures()) {
    auto p = build_profile(aitest::dataset_fixture(name));
    auto m = build_manifest(p, default_registry(), facts);
    for (const auto& e : default_registry().elements) {
      bool all = true;
      for (const auto& c : e.applicability.all_of) all = all && evaluate_condition(c, p, facts);
      EXPECT_EQ(status_of(m, e.id) == ActivationStatus::active, all) << name << "/" << e.id;
    }
  }
}

TEST(Selector, PerformsNoFileReads) {
  auto p = build_profile(aitest::dataset_fixture("materials_bandgap"));
  auto before = process_bytes_read();
  for (int i = 0; i < 20; ++i) build_manifest(p, default_registry());
  EXPECT_EQ(process_bytes_read(), before);
}

TEST(Selector, TAndQAlwaysHaveActiveElementsOnNonEmptyData) {
  for (const auto& name : {"image_only", "tabular_labeled", "astronomy_survey", "chemistry_reactions"}) {
    auto p = build_profile(aitest::dataset_fixture(name));
    auto m = build_manifest(p, default_registry());
    bool t = false, q = false;
    for (const auto& d : m.decisions) {
      if (d.status != ActivationStatus::active) continue;
      auto sd = default_registry().find_element(d.element_id)->sub_dimension;
      t = t || sd[0] == 'T';
      q = q || sd[0] == 'Q';
    }
    EXPECT_TRUE(t) << name;
    EXPECT_TRUE(q) << name;
  }
}

TEST(Selector, AddingTargetNeverPrunesUnrelatedElements) {
  auto p = build_profile(aitest::dataset_fixture("ecology_survey"));
  ASSERT_FALSE(has_identified_target(p));
  auto before = build_manifest(p, default_registry());
  DataProfile q = p;
  ASSERT_FALSE(q.schema_cues.empty());
  q.candidate_target_columns.push_back({q.schema_cues[0].relative_path, q.schema_cues[0].columns[0].name});
  auto after = build_manifest(q, default_registry());
  for (const auto& e : default_registry().elements) {
    bool refs_target = false;
    for (const auto& c : e.applicability.all_of) {
      refs_target = refs_target || c.condition == "has_identified_target" || c.condition == "target_is_categorical";
    }
    if (refs_target) continue;
    if (status_of(before, e.id) == ActivationStatus::active) {
      EXPECT_EQ(status_of(after, e.id), ActivationStatus::active) << e.id;
    }
  }
  EXPECT_EQ(status_of(after, "feature_target_association"), ActivationStatus::active);
}

TEST(Selector, HookCanOverrideRuleVerdict) {
  auto p = build_profile(aitest::dataset_fixture("tabular_labeled"));
  ApplicabilityHook hook = [](const AtomicElement& e, const DataProfile&,
                              const ActivationDecision& d) -> std::optional<ActivationDecision> {
    if (e.id != "near_duplicate_rate") return std::nullopt;
    return ActivationDecision{d.element_id, ActivationStatus::pruned, "hook: disabled"};
  };
  auto m = build_manifest(p, default_registry(), {}, hook);
  EXPECT_EQ(status_of(m, "near_duplicate_rate"), ActivationStatus::pruned);
  EXPECT_EQ(m.find("near_duplicate_rate")->reason, "hook: disabled");
  EXPECT_EQ(status_of(m, "exact_duplicate_rate"), ActivationStatus::active);
}

TEST(Selector, DisabledElementsArePruned) {
  Registry r = default_registry();
  for (auto& e : r.elements) {
    if (e.id == "outlier_rate") e.enabled = false;
  }
  auto p = build_profile(aitest::dataset_fixture("tabular_labeled"));
  auto m = build_manifest(p, r);
  EXPECT_EQ(status_of(m, "outlier_rate"), ActivationStatus::pruned);
}

TEST(Selector, ManifestJsonListsEveryDecision) {
  auto p = build_profile(aitest::dataset_fixture("image_only"));
  auto m = build_manifest(p, default_registry());
  auto j = manifest_to_json(m);
  EXPECT_EQ(canonical_dump(j), canonical_dump(manifest_to_json(build_manifest(p, default_registry()))));
  EXPECT_EQ(m.active_ids().size() + 0u,
            static_cast<std::size_t>(std::count_if(m.decisions.begin(), m.decisions.end(), [](const auto& d) {
              return d.status == ActivationStatus::active;
            })));
}
