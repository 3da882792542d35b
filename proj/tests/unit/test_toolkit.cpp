#include <gtest/gtest.h>

#include <fstream>

#include "aiready/error.hpp"
#include "aiready/inspector.hpp"
#include "aiready/toolkit.hpp"
#include "test_support.hpp"

using namespace aiready;
using aitest::TempDir;

namespace {

ToolSpec dsl_tool(const std::string& id, std::vector<std::string> scope = {"missing_value_rate"}) {
  ToolSpec s;
  s.metadata.tool_id = id;
  s.metadata.scope = std::move(scope);
  s.metadata.input_requirements.evidence = EvidenceClass::tabular;
  s.metadata.method_summary = "fraction of blank cells";
  s.kind = ToolKind::dsl;
  s.program = json::parse(R"({"steps": [
    {"id": "a", "op": "select", "column": "label"},
    {"id": "c", "op": "reduce", "input": "a", "fn": "fraction_matching", "predicate": "is_missing"},
    {"op": "emit", "score": "c", "interpretables": {"missing_cells": "c", "total_cells": 1}}]})");
  return s;
}

ToolMemoryEntry entry(const std::string& tool, int version, Outcome o, const std::string& digest,
                      const std::string& element = "missing_value_rate") {
  ToolMemoryEntry e;
  e.tool_id = tool;
  e.tool_version = version;
  e.element_id = element;
  e.profile_digest = digest;
  e.modality = Modality::tabular;
  e.outcome = o;
  if (o != Outcome::success) e.failure_signature = "sig";
  e.timestamp = "2024-01-01T00:00:00Z";
  return e;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an aiready::Error";
  return ErrorCode::InvalidConfig;
}

std::vector<std::string> ids(const std::vector<ToolSpec>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.metadata.tool_id);
  return out;
}

}  // namespace

TEST(ToolLibrary, RegisterBumpsVersionAndKeepsHistory) {
  ToolLibrary lib;
  EXPECT_EQ(lib.register_tool(dsl_tool("mv")), "mv");
  EXPECT_EQ(lib.find("mv")->metadata.version, 1);
  auto changed = dsl_tool("mv");
  changed.metadata.method_summary = "second try";
  lib.register_tool(changed);
  EXPECT_EQ(lib.find("mv")->metadata.version, 2);
  auto hist = lib.versions("mv");
  ASSERT_EQ(hist.size(), 2u);
  EXPECT_EQ(hist[0].metadata.method_summary, "fraction of blank cells");
  EXPECT_EQ(hist[1].metadata.method_summary, "second try");
  EXPECT_FALSE(lib.find("other").has_value());
}

TEST(ToolLibrary, RejectsInvalidSpecs) {
  ToolLibrary lib;
  auto bad_dsl = dsl_tool("bad");
  bad_dsl.program = json::parse(R"({"steps": [{"op": "emit", "score": "nothing"}]})");
  EXPECT_EQ(code_of([&] { lib.register_tool(bad_dsl); }), ErrorCode::InvalidToolSpec);
  auto no_scope = dsl_tool("x", {});
  EXPECT_EQ(code_of([&] { lib.register_tool(no_scope); }), ErrorCode::InvalidToolSpec);
  auto bad_id = dsl_tool("../escape");
  EXPECT_EQ(code_of([&] { lib.register_tool(bad_id); }), ErrorCode::InvalidToolSpec);
  ToolSpec builtin;
  builtin.metadata.tool_id = "b";
  builtin.metadata.scope = {"near_duplicate_rate"};
  builtin.evaluator_id = "near_duplicate_rate";
  builtin.default_bindings = {{"threshold", "lots"}};
  EXPECT_EQ(code_of([&] { lib.register_tool(builtin); }), ErrorCode::InvalidToolSpec);
  EXPECT_FALSE(lib.contains("bad"));
  EXPECT_EQ(code_of([] { tool_from_json(json::parse(R"({"metadata": {}})")); }), ErrorCode::InvalidToolSpec);
}

TEST(ToolLibrary, JsonRoundTrip) {
  auto s = dsl_tool("mv");
  s.metadata.input_requirements.column_kinds = {ColumnKind::numeric};
  s.metadata.domain_applicability = {"ecology"};
  EXPECT_EQ(tool_from_json(tool_to_json(s)), s);
  ToolSpec ext;
  ext.metadata.tool_id = "ext";
  ext.metadata.scope = {"Q1"};
  ext.kind = ToolKind::external;
  ext.external.executable = "/bin/true";
  ext.external.args = {"--x"};
  EXPECT_EQ(tool_from_json(tool_to_json(ext)), ext);
}

TEST(ToolLibrary, PersistsAcrossReopen) {
  TempDir dir;
  {
    ToolLibrary lib(dir.path() / "tools");
    lib.register_tool(dsl_tool("mv"));
    lib.register_tool(dsl_tool("mv"));
    lib.register_tool(dsl_tool("other", {"Q1"}));
  }
  ToolLibrary again(dir.path() / "tools");
  EXPECT_EQ(again.versions("mv").size(), 2u);
  EXPECT_EQ(again.find("mv")->metadata.version, 2);
  EXPECT_EQ(ids(again.latest()), (std::vector<std::string>{"mv", "other"}));
  aitest::write_file(dir.path() / "tools" / "index.json", "{not json");
  EXPECT_EQ(code_of([&] { ToolLibrary broken(dir.path() / "tools"); }), ErrorCode::PersistenceFailure);
}

TEST(ToolMemory, UnknownToolIsRejected) {
  ToolLibrary lib;
  ToolMemory mem;
  EXPECT_EQ(code_of([&] { mem.record(lib, entry("ghost", 1, Outcome::success, "d")); }), ErrorCode::UnknownTool);
  EXPECT_EQ(mem.size(), 0u);
}

TEST(ToolMemory, ThousandAppendsKeepOrderAcrossReopen) {
  TempDir dir;
  ToolLibrary lib;
  lib.register_tool(dsl_tool("mv"));
  auto path = dir.path() / "memory.jsonl";
  {
    ToolMemory mem(path);
    for (int i = 0; i < 1000; ++i) {
      auto e = entry("mv", 1, i % 3 ? Outcome::success : Outcome::runtime_failure, "d" + std::to_string(i));
      e.iterations_used = i;
      mem.record(lib, e);
    }
  }
  ToolMemory again(path);
  auto es = again.entries();
  ASSERT_EQ(es.size(), 1000u);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(es[static_cast<std::size_t>(i)].iterations_used, i);
    EXPECT_EQ(es[static_cast<std::size_t>(i)].profile_digest, "d" + std::to_string(i));
  }
  EXPECT_EQ(again.rejected(), 0u);
}

TEST(ToolMemory, SuccessDropsFailureSignatureAndTimestampIsFilled) {
  ToolLibrary lib;
  lib.register_tool(dsl_tool("mv"));
  ToolMemory mem;
  auto e = entry("mv", 1, Outcome::success, "d");
  e.failure_signature = "leftover";
  e.timestamp.clear();
  mem.record(lib, e);
  EXPECT_FALSE(mem.entries()[0].failure_signature.has_value());
  EXPECT_EQ(mem.entries()[0].timestamp.size(), 20u);
}

TEST(ToolMemory, PartialTrailingRecordIsDroppedAndTrimmed) {
  TempDir dir;
  ToolLibrary lib;
  lib.register_tool(dsl_tool("mv"));
  auto path = dir.path() / "memory.jsonl";
  {
    ToolMemory mem(path);
    for (int i = 0; i < 3; ++i) mem.record(lib, entry("mv", 1, Outcome::success, "d"));
  }
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"tool_id": "mv", "element_id": "missing_va)";
  }
  ToolMemory recovered(path);
  EXPECT_EQ(recovered.size(), 3u);
  EXPECT_EQ(recovered.rejected(), 1u);
  recovered.record(lib, entry("mv", 1, Outcome::semantic_failure, "d"));
  ToolMemory again(path);
  EXPECT_EQ(again.size(), 4u);
  EXPECT_EQ(again.rejected(), 0u);
  EXPECT_EQ(again.entries().back().outcome, Outcome::semantic_failure);
}

TEST(ToolMemory, GarbageLinesAreCountedNotLoaded) {
  TempDir dir;
  auto path = dir.path() / "m.jsonl";
  aitest::write_file(path, "garbage\n" + entry_to_json(entry("mv", 1, Outcome::success, "d")).dump() +
                               "\n{\"tool_id\":\"mv\",\"element_id\":\"e\",\"outcome\":\"exploded\"}\n");
  ToolMemory mem(path);
  EXPECT_EQ(mem.size(), 1u);
  EXPECT_EQ(mem.rejected(), 2u);
}

class Retrieval : public ::testing::Test {
 protected:
  void SetUp() override {
    profile = build_profile(aitest::dataset_fixture("tabular_labeled"));
    digest = profile_digest(profile);
    element = *default_registry().find_element("missing_value_rate");
  }
  DataProfile profile;
  std::string digest;
  AtomicElement element;
};

TEST_F(Retrieval, OnlyScopedAndSatisfiableToolsAreReturned) {
  ToolLibrary lib;
  ToolMemory mem;
  EXPECT_TRUE(find_compatible(lib, mem, element, profile).empty());
  lib.register_tool(dsl_tool("by_element"));
  lib.register_tool(dsl_tool("by_subdim", {element.sub_dimension}));
  lib.register_tool(dsl_tool("elsewhere", {"label_balance"}));
  auto image_only = dsl_tool("needs_images");
  image_only.metadata.input_requirements.evidence = EvidenceClass::image;
  lib.register_tool(image_only);
  auto wrong_domain = dsl_tool("marine_only");
  wrong_domain.metadata.domain_applicability = {"oceanography"};
  lib.register_tool(wrong_domain);
  auto right_domain = dsl_tool("agro_only");
  right_domain.metadata.domain_applicability = {"agronomy"};
  lib.register_tool(right_domain);
  EXPECT_EQ(ids(find_compatible(lib, mem, element, profile)),
            (std::vector<std::string>{"agro_only", "by_element", "by_subdim"}));
}

TEST_F(Retrieval, RankedBySuccessRateThenDemotedOnRepeatedSemanticFailure) {
  ToolLibrary lib;
  ToolMemory mem;
  lib.register_tool(dsl_tool("a"));
  lib.register_tool(dsl_tool("b"));
  lib.register_tool(dsl_tool("c"));
  mem.record(lib, entry("b", 1, Outcome::success, digest));
  mem.record(lib, entry("c", 1, Outcome::success, "elsewhere"));
  mem.record(lib, entry("c", 1, Outcome::runtime_failure, "elsewhere"));
  EXPECT_EQ(ids(find_compatible(lib, mem, element, profile, digest)), (std::vector<std::string>{"b", "c", "a"}));
  mem.record(lib, entry("b", 1, Outcome::semantic_failure, digest));
  mem.record(lib, entry("b", 1, Outcome::semantic_failure, digest));
  EXPECT_EQ(ids(find_compatible(lib, mem, element, profile, digest)), (std::vector<std::string>{"c", "a", "b"}));
  // A new version starts with a clean record.
  lib.register_tool(dsl_tool("b"));
  EXPECT_EQ(ids(find_compatible(lib, mem, element, profile, digest)), (std::vector<std::string>{"c", "b", "a"}));
}

TEST(SeedBuiltins, OneToolPerBuiltinElementAndIdempotent) {
  ToolLibrary lib;
  const auto& reg = default_registry();
  std::size_t added = seed_builtin_tools(lib, reg);
  EXPECT_EQ(added, reg.elements.size());
  EXPECT_EQ(seed_builtin_tools(lib, reg), 0u);
  for (const auto& e : reg.elements) {
    auto t = lib.find("builtin." + e.id);
    ASSERT_TRUE(t) << e.id;
    EXPECT_EQ(t->kind, ToolKind::builtin);
    EXPECT_EQ(t->evaluator_id, e.evaluator_hint);
  }
}
