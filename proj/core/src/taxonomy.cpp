#include "aiready/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "aiready/error.hpp"
#include "aiready/evaluators.hpp"

namespace aiready::detail {
extern const std::string_view kDefaultRegistryJson;
}

namespace aiready {
namespace {

constexpr double kWeightTolerance = 1e-9;

std::string require_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
    fail(ErrorCode::MalformedRegistry, where + ": missing string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

double require_weight(const json& obj, const std::string& where) {
  if (!obj.contains("weight") || !obj["weight"].is_number()) {
    fail(ErrorCode::MalformedRegistry, where + ": missing numeric field 'weight'");
  }
  double w = obj["weight"].get<double>();
  if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
    fail(ErrorCode::InvalidWeights, where + ": weight outside [0,1]");
  }
  return w;
}

ApplicabilityPredicate parse_predicate(const json& j, const std::string& where) {
  ApplicabilityPredicate p;
  if (j.is_null()) return p;
  if (!j.is_array()) fail(ErrorCode::MalformedRegistry, where + ": applicability must be an array");
  for (const auto& c : j) {
    Condition cond;
    cond.condition = require_string(c, "condition", where + " applicability");
    const auto& known = known_conditions();
    if (std::find(known.begin(), known.end(), cond.condition) == known.end()) {
      fail(ErrorCode::MalformedRegistry, where + ": unknown condition '" + cond.condition + "'");
    }
    if (c.contains("values")) {
      if (!c["values"].is_array()) fail(ErrorCode::MalformedRegistry, where + ": values must be an array");
      for (const auto& v : c["values"]) {
        if (!v.is_string()) fail(ErrorCode::MalformedRegistry, where + ": values must be strings");
        if (cond.condition == "modality_in" && !modality_from_string(v.get<std::string>())) {
          fail(ErrorCode::MalformedRegistry, where + ": unknown modality '" + v.get<std::string>() + "'");
        }
        cond.values.push_back(v.get<std::string>());
      }
    }
    if (cond.condition == "modality_in" && cond.values.empty()) {
      fail(ErrorCode::MalformedRegistry, where + ": modality_in needs values");
    }
    p.all_of.push_back(std::move(cond));
  }
  return p;
}

void check_sum(double sum, const std::string& what) {
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    std::ostringstream msg;
    msg << what << " weights sum to " << sum << ", expected 1";
    fail(ErrorCode::InvalidWeights, msg.str());
  }
}

void validate(const Registry& r) {
  static const std::vector<std::string> kDimensionIds{"T", "Q", "AC", "AS"};
  if (r.dimensions.size() != 4) fail(ErrorCode::MalformedRegistry, "registry must define exactly four dimensions");
  for (const auto& id : kDimensionIds) {
    if (std::count_if(r.dimensions.begin(), r.dimensions.end(), [&](const Dimension& d) { return d.id == id; }) != 1) {
      fail(ErrorCode::MalformedRegistry, "dimension '" + id + "' must appear exactly once");
    }
  }
  double dim_sum = 0;
  for (const auto& d : r.dimensions) dim_sum += d.weight;
  check_sum(dim_sum, "dimension");

  std::map<std::string, double> sub_sums;
  std::set<std::string> sub_ids;
  for (const auto& s : r.sub_dimensions) {
    if (!sub_ids.insert(s.id).second) fail(ErrorCode::MalformedRegistry, "duplicate sub-dimension '" + s.id + "'");
    if (!r.find_dimension(s.dimension)) {
      fail(ErrorCode::DanglingReference, "sub-dimension '" + s.id + "' references unknown dimension '" + s.dimension + "'");
    }
    sub_sums[s.dimension] += s.weight;
  }
  for (const auto& d : r.dimensions) {
    if (!sub_sums.count(d.id)) fail(ErrorCode::MalformedRegistry, "dimension '" + d.id + "' has no sub-dimensions");
    check_sum(sub_sums[d.id], "sub-dimension (" + d.id + ")");
  }

  std::map<std::string, double> el_sums;
  std::set<std::string> el_ids;
  for (const auto& e : r.elements) {
    if (!el_ids.insert(e.id).second) fail(ErrorCode::MalformedRegistry, "duplicate element '" + e.id + "'");
    if (!r.find_sub_dimension(e.sub_dimension)) {
      fail(ErrorCode::DanglingReference, "element '" + e.id + "' references unknown sub-dimension '" + e.sub_dimension + "'");
    }
    if (e.evaluator_hint != "external" && !is_builtin_evaluator(e.evaluator_hint)) {
      fail(ErrorCode::UnknownEvaluator, "element '" + e.id + "' has unknown evaluator_hint '" + e.evaluator_hint + "'");
    }
    el_sums[e.sub_dimension] += e.weight;
  }
  for (const auto& s : r.sub_dimensions) {
    if (!el_sums.count(s.id)) fail(ErrorCode::MalformedRegistry, "sub-dimension '" + s.id + "' has no elements");
    check_sum(el_sums[s.id], "element (" + s.id + ")");
  }
}

json predicate_to_json(const ApplicabilityPredicate& p) {
  json arr = json::array();
  for (const auto& c : p.all_of) {
    json o{{"condition", c.condition}};
    if (!c.values.empty()) o["values"] = c.values;
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace

const Dimension* Registry::find_dimension(std::string_view id) const {
  for (const auto& d : dimensions) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

const SubDimension* Registry::find_sub_dimension(std::string_view id) const {
  for (const auto& s : sub_dimensions) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const AtomicElement* Registry::find_element(std::string_view id) const {
  for (const auto& e : elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

bool KnowledgeFacts::has(std::string_view domain, std::string_view kind) const {
  return available.count({std::string(domain), std::string(kind)}) > 0;
}

const std::vector<std::string>& known_conditions() {
  static const std::vector<std::string> names{
      "has_files",           "modality_in",           "has_tabular_evidence",    "has_identified_target",
      "target_is_categorical", "has_numeric_features", "has_metadata_descriptor", "kb_has_checklist"};
  return names;
}

Registry load_registry(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedRegistry, std::string("registry is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::MalformedRegistry, "registry must be a JSON object");
  for (const char* key : {"dimensions", "sub_dimensions", "elements"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      fail(ErrorCode::MalformedRegistry, std::string("registry needs array '") + key + "'");
    }
  }
  Registry r;
  r.version = doc.value("version", std::string("unversioned"));
  for (const auto& d : doc["dimensions"]) {
    std::string id = require_string(d, "id", "dimension");
    r.dimensions.push_back({id, require_string(d, "name", "dimension " + id), require_weight(d, "dimension " + id)});
  }
  for (const auto& s : doc["sub_dimensions"]) {
    std::string id = require_string(s, "id", "sub_dimension");
    r.sub_dimensions.push_back({id, require_string(s, "dimension", "sub_dimension " + id),
                                require_string(s, "name", "sub_dimension " + id),
                                require_weight(s, "sub_dimension " + id)});
  }
  for (const auto& e : doc["elements"]) {
    AtomicElement el;
    el.id = require_string(e, "id", "element");
    std::string where = "element " + el.id;
    el.sub_dimension = require_string(e, "sub_dimension", where);
    el.name = require_string(e, "name", where);
    el.weight = require_weight(e, where);
    el.applicability = parse_predicate(e.contains("applicability") ? e["applicability"] : json(), where);
    el.evaluator_hint = require_string(e, "evaluator_hint", where);
    if (e.contains("enabled")) {
      if (!e["enabled"].is_boolean()) fail(ErrorCode::MalformedRegistry, where + ": enabled must be boolean");
      el.enabled = e["enabled"].get<bool>();
    }
    r.elements.push_back(std::move(el));
  }
  validate(r);
  return r;
}

Registry load_registry_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedRegistry, "cannot read registry file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_registry(ss.str());
}

std::string_view default_registry_document() { return detail::kDefaultRegistryJson; }

const Registry& default_registry() {
  static const Registry r = load_registry(detail::kDefaultRegistryJson);
  return r;
}

json registry_to_json(const Registry& r) {
  json dims = json::array(), subs = json::array(), els = json::array();
  for (const auto& d : r.dimensions) dims.push_back({{"id", d.id}, {"name", d.name}, {"weight", d.weight}});
  for (const auto& s : r.sub_dimensions) {
    subs.push_back({{"id", s.id}, {"dimension", s.dimension}, {"name", s.name}, {"weight", s.weight}});
  }
  for (const auto& e : r.elements) {
    json o{{"id", e.id},
           {"sub_dimension", e.sub_dimension},
           {"name", e.name},
           {"weight", e.weight},
           {"applicability", predicate_to_json(e.applicability)},
           {"evaluator_hint", e.evaluator_hint}};
    if (!e.enabled) o["enabled"] = false;
    els.push_back(std::move(o));
  }
  return json{{"version", r.version},
              {"dimensions", dims},
              {"sub_dimensions", subs},
              {"elements", els},
              {"evaluator_annex", evaluator_annex()}};
}

std::vector<AtomicElement> list_elements(const Registry& r, std::optional<std::string_view> sub_dimension) {
  if (sub_dimension && !r.find_sub_dimension(*sub_dimension)) {
    fail(ErrorCode::UnknownSubDimension, "unknown sub-dimension '" + std::string(*sub_dimension) + "'");
  }
  std::vector<AtomicElement> out;
  for (const auto& e : r.elements) {
    if (!sub_dimension || e.sub_dimension == *sub_dimension) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const AtomicElement& a, const AtomicElement& b) {
    return std::tie(a.sub_dimension, a.id) < std::tie(b.sub_dimension, b.id);
  });
  return out;
}

bool evaluate_condition(const Condition& c, const DataProfile& p, const KnowledgeFacts& facts) {
  const std::string& n = c.condition;
  if (n == "has_files") return !p.files.empty();
  if (n == "modality_in") {
    auto m = to_string(p.modality);
    return std::find(c.values.begin(), c.values.end(), m) != c.values.end();
  }
  if (n == "has_tabular_evidence") return has_tabular_evidence(p);
  if (n == "has_identified_target") return has_identified_target(p);
  if (n == "target_is_categorical") return target_is_categorical(p);
  if (n == "has_numeric_features") return has_numeric_features(p);
  if (n == "has_metadata_descriptor") return has_metadata_descriptor(p);
  if (n == "kb_has_checklist") return p.domain_hint && facts.has(*p.domain_hint, "causal_checklist");
  return false;
}

PredicateOutcome evaluate_predicate(const ApplicabilityPredicate& predicate, const DataProfile& profile,
                                    const KnowledgeFacts& facts) {
  for (const auto& c : predicate.all_of) {
    if (!evaluate_condition(c, profile, facts)) return {false, c.condition};
  }
  return {};
}

}  // namespace aiready
