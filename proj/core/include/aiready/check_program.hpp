#pragma once

#include <cstdint>

#include "aiready/canonical_json.hpp"
#include "aiready/evaluators.hpp"
#include "aiready/evidence.hpp"

namespace aiready {

// A check program is a JSON document
//
//   {"steps": [
//     {"id": "a", "op": "select", "column": "age"},
//     {"id": "b", "op": "map", "input": "a", "fn": "parse_numeric"},
//     {"id": "c", "op": "reduce", "input": "b", "fn": "fraction_matching", "predicate": "is_missing"},
//     {"op": "emit", "score": {"sub": [1, "c"]}, "interpretables": {"missing_fraction": "c"}}
//   ]}
//
// select:  "column" (optionally restricted by "file") or "file_set": "all" | "data" | "metadata"
// map:     parse_numeric | length | tokenize
// reduce:  count | mean | min | max | minmax | fraction_matching | distinct_fraction | entropy_normalized
// predicates: is_missing, not_missing, is_numeric, file_readable, file_parse_ok,
//             {"gt"|"ge"|"lt"|"le": n}, {"between": [a, b]}, {"eq": v}, {"in": [..]}
// expressions: number | step id | {"add"|"sub"|"mul"|"div"|"min"|"max": [e, ...]} | {"neg": e}
// interpretable values are expressions or {"text": "..."}.
//
// The interpreter only sees the Evidence it is handed.

struct ProgramLimits {
  std::uint64_t max_steps = 50'000'000;  // item visits across all steps
};

/// Throws Error(InvalidProgram) naming the first problem found.
void validate_program(const json& program);

/// Names the emit step declares.
std::vector<std::string> program_interpretables(const json& program);

/// Runtime failures (empty reduce, division by zero, type errors, step limit)
/// throw Error(ToolCrash). Messages carry "column_missing:<name>" or
/// "insufficient_rows" when the evidence lacked what the program selected.
RawOutput run_program(const json& program, const Evidence& evidence, const ProgramLimits& limits = {});

}  // namespace aiready
