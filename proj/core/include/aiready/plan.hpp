#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aiready/canonical_json.hpp"

namespace aiready {

// Which part of the dataset an element needs to look at.
enum class EvidenceClass { tabular, image, files, metadata, metadata_and_tabular, profile };

std::string_view to_string(EvidenceClass c);
std::optional<EvidenceClass> evidence_class_from_string(std::string_view s);

enum class Sampling { head, reservoir, stratified_by_file };

std::string_view to_string(Sampling s);
std::optional<Sampling> sampling_from_string(std::string_view s);

struct LoadingStrategy {
  EvidenceClass evidence = EvidenceClass::tabular;
  std::vector<std::string> target_files;
  std::uint64_t row_budget = 100000;
  std::uint64_t byte_budget = 64ull << 20;
  Sampling sampling = Sampling::head;
  std::optional<std::vector<std::string>> columns_of_interest;
  std::uint64_t seed = 0;

  friend bool operator==(const LoadingStrategy&, const LoadingStrategy&) = default;
};

// Affine map of the declared raw range onto [0,1], optionally flipped so that
// "bad fractions" score high when low.
struct Normalization {
  double raw_min = 0.0;
  double raw_max = 1.0;
  bool invert = false;

  double apply(double raw) const;  // unclamped
  double apply_clamped(double raw) const;

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

enum class ToolKind { builtin, dsl, external };

std::string_view to_string(ToolKind k);
std::optional<ToolKind> tool_kind_from_string(std::string_view s);

struct ToolRequest {
  ToolKind kind = ToolKind::builtin;
  std::string evaluator_id;  // builtin
  json bindings = json::object();  // builtin
  json program;  // dsl
  json request_template;  // external

  friend bool operator==(const ToolRequest&, const ToolRequest&) = default;
};

struct ScoringStrategy {
  ToolRequest tool_request;
  Normalization normalization;
  std::vector<std::string> interpretables;  // must be emitted by any tool

  friend bool operator==(const ScoringStrategy&, const ScoringStrategy&) = default;
};

struct ElementPlan {
  std::string element_id;
  LoadingStrategy loading;
  ScoringStrategy scoring;
  std::vector<std::string> kb_citations;
  int revision = 0;

  friend bool operator==(const ElementPlan&, const ElementPlan&) = default;
};

json plan_to_json(const ElementPlan& plan);
ElementPlan plan_from_json(const json& j);

/// Digest over (loading, scoring); used to assert refinements make progress.
std::string plan_strategy_digest(const ElementPlan& plan);

}  // namespace aiready
