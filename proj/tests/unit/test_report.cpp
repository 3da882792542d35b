#include <gtest/gtest.h>

#include <random>

#include "aiready/inspector.hpp"
#include "aiready/report.hpp"
#include "test_support.hpp"

using namespace aiready;

namespace {

ExecutionResult result(const std::string& id, double raw, Normalization n = {}) {
  ExecutionResult r;
  r.element_id = id;
  r.raw_output.score_candidate = raw;
  r.raw_output.interpretables = {{"k", 1}};
  r.tool_id = "builtin." + id;
  r.normalization = n;
  return r;
}

ScoringStrategy with(Normalization n) {
  ScoringStrategy s;
  s.normalization = n;
  return s;
}

ElementScore scored(const std::string& id, double s) {
  ElementScore e;
  e.element_id = id;
  e.status = ElementStatus::scored;
  e.score = s;
  return e;
}

// Random scored/pruned/failed statuses over a registry's elements.
std::vector<ElementScore> random_statuses(const Registry& reg, std::mt19937_64& rng,
                                          std::map<std::string, std::optional<double>>& oracle_in) {
  std::vector<ElementScore> out;
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& e : reg.elements) {
    auto roll = rng() % 5;
    if (roll == 0) {
      out.push_back(pruned_score(e.id, "p"));
      oracle_in[e.id] = std::nullopt;
    } else if (roll == 1) {
      out.push_back(failed_score(e.id, "f", json::array()));
      oracle_in[e.id] = std::nullopt;
    } else {
      double s = u(rng);
      out.push_back(scored(e.id, s));
      oracle_in[e.id] = s;
    }
  }
  return out;
}

void expect_same(const std::optional<double>& a, const std::optional<double>& b, const std::string& where) {
  ASSERT_EQ(a.has_value(), b.has_value()) << where;
  if (a) EXPECT_NEAR(*a, *b, 1e-12) << where;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_DOUBLE_EQ(*normalize(result("missing_value_rate", 0.25, {0, 1, true}), with({0, 1, true})).score, 0.75);
  EXPECT_DOUBLE_EQ(*normalize(result("x", 3, {0, 10, false}), with({0, 10, false})).score, 0.3);
  EXPECT_DOUBLE_EQ(*normalize(result("x", -0.0001), with({})).score, 0.0);
  EXPECT_DOUBLE_EQ(*normalize(result("x", 1.0001), with({})).score, 1.0);
  auto s = normalize(result("x", 0.5), with({}));
  EXPECT_EQ(s.status, ElementStatus::scored);
  ASSERT_TRUE(s.provenance);
  EXPECT_EQ(s.provenance->tool_id, "builtin.x");
  EXPECT_EQ(s.interpretables["k"], 1);
}

TEST(Aggregate, RenormalizedMeanExamples) {
  EXPECT_DOUBLE_EQ(*renormalized_mean({{0.5, 0.8}, {0.25, 0.6}, {0.25, std::nullopt}}), (0.5 * 0.8 + 0.25 * 0.6) / 0.75);
  EXPECT_DOUBLE_EQ(*renormalized_mean({{1, 0.8}, {1, 0.6}, {1, std::nullopt}}), 0.7);
  EXPECT_FALSE(renormalized_mean({{1, std::nullopt}}).has_value());
  EXPECT_FALSE(renormalized_mean({}).has_value());
  EXPECT_DOUBLE_EQ(*renormalized_mean({{0, 0.2}, {0, 0.4}}), 0.3);
}

TEST(Aggregate, AllPrunedDimensionDropsOutOfTotal) {
  const auto& reg = default_registry();
  std::vector<ElementScore> scores;
  for (const auto& e : reg.elements) {
    const auto* sd = reg.find_sub_dimension(e.sub_dimension);
    if (sd->dimension == "AS") scores.push_back(pruned_score(e.id, "no"));
    else scores.push_back(scored(e.id, 0.5));
  }
  auto tree = aggregate(scores, reg);
  EXPECT_FALSE(tree.dimension("AS")->score.has_value());
  EXPECT_EQ(tree.dimension("AS")->status, ElementStatus::pruned);
  EXPECT_DOUBLE_EQ(tree.dimension("AS")->effective_weight, 0.0);
  EXPECT_NEAR(tree.dimension("T")->effective_weight, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(*tree.total, 0.5, 1e-12);
}

TEST(Aggregate, FailedOnlySubDimensionIsMarkedFailed) {
  const auto& reg = default_registry();
  std::vector<ElementScore> scores;
  for (const auto& e : reg.elements) {
    if (e.sub_dimension == "Q3") scores.push_back(failed_score(e.id, "boom", json::array()));
    else scores.push_back(scored(e.id, 1.0));
  }
  auto tree = aggregate(scores, reg);
  EXPECT_EQ(tree.sub_dimension("Q3")->status, ElementStatus::failed);
  EXPECT_DOUBLE_EQ(*tree.dimension("Q")->score, 1.0);
}

TEST(Aggregate, MissingScoresCountAsPruned) {
  auto tree = aggregate({}, default_registry());
  EXPECT_EQ(tree.elements.size(), default_registry().elements.size());
  EXPECT_FALSE(tree.total.has_value());
}

TEST(Aggregate, MatchesOracleOnRandomTrees) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    Registry reg = aitest::random_registry(rng);
    std::map<std::string, std::optional<double>> in;
    auto scores = random_statuses(reg, rng, in);
    auto tree = aggregate(scores, reg);
    auto expect = aitest::oracle::aggregate(reg, in);
    for (const auto& sd : reg.sub_dimensions) expect_same(tree.sub_dimension(sd.id)->score, expect.sub_dimensions[sd.id], sd.id);
    for (const auto& d : reg.dimensions) expect_same(tree.dimension(d.id)->score, expect.dimensions[d.id], d.id);
    expect_same(tree.total, expect.total, "total");
  }
}

TEST(Aggregate, EffectiveWeightsSumToOneAmongScored) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Registry reg = aitest::random_registry(rng);
    std::map<std::string, std::optional<double>> in;
    auto tree = aggregate(random_statuses(reg, rng, in), reg);
    for (const auto& sd : reg.sub_dimensions) {
      double sum = 0;
      bool any = false;
      for (const auto& e : tree.elements) {
        if (reg.find_element(e.element_id)->sub_dimension != sd.id) continue;
        if (!e.score) EXPECT_EQ(e.effective_weight, 0.0);
        sum += e.effective_weight;
        any = any || e.score.has_value();
      }
      if (any) EXPECT_NEAR(sum, 1.0, 1e-9) << sd.id;
    }
  }
}

TEST(Display, Formatting) {
  EXPECT_EQ(display_score(0.886), "88.6");
  EXPECT_EQ(display_score(1.0), "100.0");
  EXPECT_EQ(display_score(0.0), "0.0");
}

class ReportFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    profile = build_profile(aitest::dataset_fixture("tabular_labeled"));
    const auto& reg = default_registry();
    std::vector<ElementScore> scores;
    for (const auto& e : reg.elements) {
      if (e.id == "label_balance") scores.push_back(failed_score(e.id, "score_out_of_range: 1.3", json::array()));
      else if (e.sub_dimension == "AS3") scores.push_back(pruned_score(e.id, "kb_has_checklist is false"));
      else scores.push_back(scored(e.id, e.sub_dimension == reg.find_element("missing_value_rate")->sub_dimension ? 0.3 : 0.886));
    }
    report = build_report("tabular_labeled", profile, json::object(), aggregate(scores, reg), reg, {7, "cfg", "v1"});
  }
  DataProfile profile;
  AIReadyReport report;
};

TEST_F(ReportFixture, MatrixUsesDashForPrunedAndCrossForFailed) {
  const auto& reg = default_registry();
  std::string m = render_matrix({{"tabular_labeled", &report.tree}}, reg);
  EXPECT_NE(m.find("| Dataset | T1 |"), std::string::npos);
  auto row = m.substr(m.find("| tabular_labeled"));
  std::vector<std::string> cells;
  std::size_t pos = 1;
  while (true) {
    auto next = row.find('|', pos);
    if (next == std::string::npos) break;
    auto c = row.substr(pos, next - pos);
    cells.push_back(c.substr(1, c.size() - 2));
    pos = next + 1;
  }
  ASSERT_GE(cells.size(), 1 + reg.sub_dimensions.size());
  for (std::size_t i = 0; i < reg.sub_dimensions.size(); ++i) {
    const auto* node = report.tree.sub_dimension(reg.sub_dimensions[i].id);
    std::string expected = node->score ? display_score(*node->score)
                           : node->status == ElementStatus::failed ? "✗" : "-";
    EXPECT_EQ(cells[i + 1], expected) << reg.sub_dimensions[i].id;
  }
  EXPECT_EQ(report.tree.sub_dimension("AS3")->status, ElementStatus::pruned);
}

TEST_F(ReportFixture, RenderingIsDeterministic) {
  EXPECT_EQ(render_json(report), render_json(report));
  EXPECT_EQ(render_markdown(report, default_registry()), render_markdown(report, default_registry()));
  EXPECT_EQ(render_json(report).back(), '\n');
}

TEST_F(ReportFixture, MarkdownAgreesWithJson) {
  auto j = json::parse(render_json(report));
  std::string md = render_markdown(report, default_registry());
  for (const auto& e : j["scores"]["elements"]) {
    std::string id = e["element_id"];
    std::string line = md.substr(md.find("| " + id + " |"));
    line = line.substr(0, line.find('\n'));
    EXPECT_NE(line.find(e["display"].get<std::string>()), std::string::npos) << line;
    EXPECT_NE(line.find(e["status"].get<std::string>()), std::string::npos) << line;
  }
  EXPECT_NE(md.find(display_score(j["scores"]["total"].get<double>())), std::string::npos);
}

TEST_F(ReportFixture, FailedElementsAppearInDiagnostics) {
  bool found = false;
  for (const auto& d : report.diagnostics) found = found || d["element_id"] == "label_balance";
  EXPECT_TRUE(found);
  auto j = report_to_json(report);
  EXPECT_EQ(j["run"]["seed"], 7);
  EXPECT_TRUE(j["scores"]["elements"][0].contains("display"));
}

TEST_F(ReportFixture, LowSubDimensionsGetRemediation) {
  const std::string low = default_registry().find_element("missing_value_rate")->sub_dimension;
  ASSERT_EQ(report.remediation.size(), 1u);
  EXPECT_EQ(report.remediation[0]["sub_dimension"], low);
  EXPECT_FALSE(report.remediation[0]["advice"].get<std::string>().empty());
  bool diagnosed = false;
  for (const auto& d : report.diagnostics) diagnosed = diagnosed || d["element_id"] == "missing_value_rate";
  EXPECT_TRUE(diagnosed);
}
