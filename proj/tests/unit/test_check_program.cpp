#include <gtest/gtest.h>

#include <random>

#include "aiready/check_program.hpp"
#include "aiready/error.hpp"
#include "test_support.hpp"

using namespace aiready;
using aitest::evidence_of;
using aitest::make_table;

namespace {

json missing_fraction_program(const std::string& column) {
  return json::parse(R"({"steps": [
    {"id": "a", "op": "select", "column": ")" + column + R"("},
    {"id": "c", "op": "reduce", "input": "a", "fn": "fraction_matching", "predicate": "is_missing"},
    {"op": "emit", "score": "c", "interpretables": {"missing_fraction": "c", "note": {"text": "ok"}}}
  ]})");
}

Evidence single(const std::vector<std::string>& cells, ColumnKind kind = ColumnKind::numeric) {
  std::vector<Record> rows;
  for (const auto& c : cells) rows.push_back({c});
  return evidence_of({make_table("t.csv", {"v"}, {kind}, rows)});
}

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an aiready::Error";
  return Error(ErrorCode::InvalidConfig, "none");
}

}  // namespace

TEST(CheckProgram, MissingFractionExample) {
  auto out = run_program(missing_fraction_program("v"), single({"1", ""}));
  EXPECT_DOUBLE_EQ(out.score_candidate, 0.5);
  EXPECT_DOUBLE_EQ(out.interpretables["missing_fraction"].get<double>(), 0.5);
  EXPECT_EQ(out.interpretables["note"], "ok");
  EXPECT_EQ(program_interpretables(missing_fraction_program("v")), (std::vector<std::string>{"missing_fraction", "note"}));
}

TEST(CheckProgram, EmptyReduceOverAbsentColumnCrashesWithTag) {
  auto e = error_of([] { run_program(missing_fraction_program("nope"), single({"1"})); });
  EXPECT_EQ(e.code(), ErrorCode::ToolCrash);
  EXPECT_EQ(std::string(e.what()).rfind("column_missing:nope", 0), 0u) << e.what();
  auto e2 = error_of([] { run_program(missing_fraction_program("v"), single({})); });
  EXPECT_EQ(e2.code(), ErrorCode::ToolCrash);
  EXPECT_EQ(std::string(e2.what()).rfind("insufficient_rows", 0), 0u) << e2.what();
}

TEST(CheckProgram, ValidationRejectsMalformedPrograms) {
  const char* bad[] = {
      R"({})",
      R"({"steps": []})",
      R"({"steps": [{"op": "emit", "score": 1}], "extra": 1})",
      R"({"steps": [{"op": "emit", "score": 1}, {"op": "emit", "score": 2}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v"}]})",
      R"({"steps": [{"op": "emit", "score": "ghost"}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v"}, {"op": "emit", "score": "a"}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v", "file_set": "all"}, {"op": "emit", "score": 1}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v"},
                    {"id": "b", "op": "reduce", "input": "a", "fn": "median"}, {"op": "emit", "score": "b"}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v"},
                    {"id": "b", "op": "reduce", "input": "a", "fn": "fraction_matching", "predicate": "is_purple"},
                    {"op": "emit", "score": "b"}]})",
      R"({"steps": [{"id": "a", "op": "select", "column": "v"},
                    {"id": "a", "op": "reduce", "input": "a", "fn": "count"}, {"op": "emit", "score": "a"}]})",
      R"({"steps": [{"op": "emit", "score": {"pow": [2, 3]}}]})",
      R"({"steps": [{"op": "emit", "score": {"sub": [1, 2, 3]}}]})",
      R"({"steps": [{"op": "launch"}, {"op": "emit", "score": 1}]})",
      R"({"steps": [{"op": "emit", "score": 1, "interpretables": {"x": {"text": 3}}}]})",
  };
  for (const char* doc : bad) {
    auto program = json::parse(doc);
    EXPECT_EQ(error_of([&] { validate_program(program); }).code(), ErrorCode::InvalidProgram) << doc;
  }
  EXPECT_NO_THROW(validate_program(missing_fraction_program("v")));
}

TEST(CheckProgram, ArithmeticAndReductions) {
  auto ev = single({"2", "4", "", "6"});
  auto program = json::parse(R"({"steps": [
    {"id": "a", "op": "select", "column": "v"},
    {"id": "n", "op": "map", "input": "a", "fn": "parse_numeric"},
    {"id": "mean", "op": "reduce", "input": "n", "fn": "mean"},
    {"id": "lo", "op": "reduce", "input": "n", "fn": "min"},
    {"id": "span", "op": "reduce", "input": "n", "fn": "minmax"},
    {"id": "cnt", "op": "reduce", "input": "n", "fn": "count"},
    {"id": "big", "op": "reduce", "input": "a", "fn": "fraction_matching", "predicate": {"between": [3, 10]}},
    {"op": "emit", "score": {"div": [{"add": ["mean", "lo", {"neg": "span"}]}, 10]},
     "interpretables": {"count": "cnt", "big": "big"}}
  ]})");
  auto out = run_program(program, ev);
  EXPECT_DOUBLE_EQ(out.score_candidate, (4.0 + 2.0 - 4.0) / 10.0);
  EXPECT_DOUBLE_EQ(out.interpretables["count"].get<double>(), 3.0);
  EXPECT_DOUBLE_EQ(out.interpretables["big"].get<double>(), 0.5);
}

TEST(CheckProgram, DivisionByZeroAndTypeErrorsCrash) {
  auto div0 = json::parse(R"({"steps": [{"op": "emit", "score": {"div": [1, 0]}}]})");
  EXPECT_EQ(error_of([&] { run_program(div0, single({"1"})); }).code(), ErrorCode::ToolCrash);
  auto words = json::parse(R"({"steps": [
    {"id": "a", "op": "select", "column": "v"},
    {"id": "m", "op": "reduce", "input": "a", "fn": "mean"},
    {"op": "emit", "score": "m"}]})");
  EXPECT_EQ(error_of([&] { run_program(words, single({"x", "y"}, ColumnKind::text)); }).code(), ErrorCode::ToolCrash);
}

TEST(CheckProgram, StepLimitIsEnforced) {
  std::vector<std::string> cells(1000, "1");
  ProgramLimits tight;
  tight.max_steps = 100;
  auto e = error_of([&] { run_program(missing_fraction_program("v"), single(cells), tight); });
  EXPECT_EQ(e.code(), ErrorCode::ToolCrash);
  EXPECT_NE(std::string(e.what()).find("budget_exceeded"), std::string::npos);
  EXPECT_NO_THROW(run_program(missing_fraction_program("v"), single(cells)));
}

TEST(CheckProgram, FileSetSelection) {
  Evidence ev = evidence_of({});
  FileStat ok;
  ok.relative_path = "a.csv";
  FileStat broken = ok;
  broken.relative_path = "b.csv";
  broken.parse_ok = false;
  ev.file_stats = {ok, broken};
  auto program = json::parse(R"({"steps": [
    {"id": "f", "op": "select", "file_set": "data"},
    {"id": "r", "op": "reduce", "input": "f", "fn": "fraction_matching", "predicate": "file_parse_ok"},
    {"op": "emit", "score": "r"}]})");
  EXPECT_DOUBLE_EQ(run_program(program, ev).score_candidate, 0.5);
}

// The DSL and the builtin must agree on the same question.
TEST(CheckProgram, AgreesWithBuiltinMissingRate) {
  std::mt19937_64 rng(3);
  const char* pool[] = {"1", "", "NA", "x", " null ", "2.5", "nan"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> cells;
    std::size_t n = 1 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) cells.push_back(pool[rng() % 7]);
    auto ev = single(cells, ColumnKind::text);
    double dsl = run_program(missing_fraction_program("v"), ev).score_candidate;
    double builtin = run_evaluator("missing_value_rate", ev, {}).score_candidate;
    EXPECT_DOUBLE_EQ(dsl, builtin);
  }
}
