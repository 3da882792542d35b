#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aiready/canonical_json.hpp"
#include "aiready/evidence.hpp"
#include "aiready/plan.hpp"

namespace aiready {

struct ParameterSpec {
  std::string name;
  // number, integer, string, string_list, regex_list, checklist, ranges, rules, templates
  std::string type;
  json default_value;
};

struct InterpretableSpec {
  std::string name;
  bool required = true;
};

struct EvaluatorSignature {
  std::string evaluator_id;
  EvidenceClass required_evidence = EvidenceClass::tabular;
  std::vector<ParameterSpec> parameters;
  double raw_min = 0.0;
  double raw_max = 1.0;
  bool invert = false;  // raw value is a "bad" fraction
  std::vector<InterpretableSpec> interpretables;
  bool heuristic = false;
  bool proxy = false;
  std::string recipe;

  Normalization normalization() const { return {raw_min, raw_max, invert}; }
  std::vector<std::string> required_interpretables() const;
};

const std::vector<EvaluatorSignature>& evaluator_signatures();
const EvaluatorSignature* find_signature(std::string_view evaluator_id);
bool is_builtin_evaluator(std::string_view evaluator_id);

/// Serialized signatures, embedded in registry documents.
json evaluator_annex();

/// Type-checks `bindings` against the declared parameters; unknown names and
/// wrong shapes throw Error(InvalidBinding).
void validate_bindings(const EvaluatorSignature& signature, const json& bindings);

/// Declared defaults overlaid with `bindings`.
json resolve_bindings(const EvaluatorSignature& signature, const json& bindings);

struct RawOutput {
  double score_candidate = 0.0;
  json interpretables = json::object();
  json evidence_summary = json::object();
};

/// Dispatches to the builtin named `evaluator_id`. Evaluator errors are thrown
/// as Error with the evaluator's code; messages that describe missing evidence
/// start with "column_missing:<name>", "insufficient_rows" or
/// "schema_mismatch".
RawOutput run_evaluator(std::string_view evaluator_id, const Evidence& evidence, const json& bindings);

// Statistics shared by the builtins, exposed for tests and the DSL.
namespace stats {

double entropy_bits(const std::map<std::string, std::size_t>& counts);

/// H(p)/log k over the label distribution; 0 when k <= 1.
double normalized_entropy(const std::vector<std::string>& labels);

/// I(X;Y)/min(H(X),H(Y)); 0 when either entropy is 0.
double normalized_mutual_information(const std::vector<std::string>& x, const std::vector<std::string>& y);

/// Equal-frequency bin labels: bin(v) = min(bins-1, floor(bins * #{u < v} / n)).
std::vector<std::string> equal_frequency_bins(const std::vector<double>& values, int bins = 10);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Fraction of `bins` equal-width bins over [lo, hi] holding at least one
/// value from `values` inside the range. Degenerate ranges occupy one bin.
double bin_occupancy(const std::vector<double>& values, double lo, double hi, int bins = 10);

/// Token set of a row: "column:word" for every word of every cell.
std::vector<std::string> row_tokens(const std::vector<std::string>& columns, const Record& row);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

using Signature = std::vector<std::uint64_t>;
Signature minhash(const std::vector<std::string>& tokens, std::uint64_t seed, int hashes = 128);
double signature_similarity(const Signature& a, const Signature& b);

/// Flags rows whose estimated similarity to some earlier row is >= threshold.
std::vector<bool> near_duplicate_flags(const std::vector<std::vector<std::string>>& token_sets, double threshold,
                                       std::uint64_t seed);

double sample_scale(double n, double n_ref);

}  // namespace stats

namespace detail {
// Governance builtins live in their own translation unit.
RawOutput run_governance(std::string_view evaluator_id, const Evidence& evidence, const json& bindings);
bool is_governance_evaluator(std::string_view evaluator_id);
}  // namespace detail

}  // namespace aiready
