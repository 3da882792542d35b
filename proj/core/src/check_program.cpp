#include "aiready/check_program.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <variant>

#include "aiready/error.hpp"
#include "aiready/text.hpp"

namespace aiready {

namespace {

constexpr std::size_t kMaxSteps = 256;
constexpr int kMaxDepth = 64;

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::InvalidProgram, "check program: " + what); }
[[noreturn]] void crash(const std::string& what) { fail(ErrorCode::ToolCrash, what); }

const std::set<std::string> kMapFns = {"parse_numeric", "length", "tokenize"};
const std::set<std::string> kReduceFns = {"count",  "mean", "min", "max", "minmax", "fraction_matching", "distinct_fraction",
                                          "entropy_normalized"};
const std::set<std::string> kNamedPredicates = {"is_missing", "not_missing", "is_numeric", "file_readable", "file_parse_ok"};
const std::set<std::string> kCompare = {"gt", "ge", "lt", "le"};
const std::set<std::string> kArith = {"add", "sub", "mul", "div", "min", "max"};

enum class Type { sequence, scalar };

bool valid_id(const std::string& s) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
  return std::regex_match(s, re);
}

void check_predicate(const json& p) {
  if (p.is_string()) {
    if (!kNamedPredicates.count(p.get<std::string>())) invalid("unknown predicate '" + p.get<std::string>() + "'");
    return;
  }
  if (!p.is_object() || p.size() != 1) invalid("predicate must be a name or a one-key object");
  const auto& [key, arg] = *p.items().begin();
  if (kCompare.count(key)) {
    if (!arg.is_number()) invalid("predicate '" + key + "' needs a number");
  } else if (key == "between") {
    if (!arg.is_array() || arg.size() != 2 || !arg[0].is_number() || !arg[1].is_number()) invalid("between needs [a, b]");
  } else if (key == "eq") {
    if (!arg.is_number() && !arg.is_string()) invalid("eq needs a number or string");
  } else if (key == "in") {
    if (!arg.is_array()) invalid("in needs an array");
    for (const auto& v : arg) {
      if (!v.is_number() && !v.is_string()) invalid("in needs numbers or strings");
    }
  } else {
    invalid("unknown predicate '" + key + "'");
  }
}

void check_expr(const json& e, const std::map<std::string, Type>& defined, int depth) {
  if (depth > kMaxDepth) invalid("expression nested too deeply");
  if (e.is_number()) {
    if (!std::isfinite(e.get<double>())) invalid("non-finite constant");
    return;
  }
  if (e.is_string()) {
    auto it = defined.find(e.get<std::string>());
    if (it == defined.end()) invalid("reference to undefined step '" + e.get<std::string>() + "'");
    if (it->second != Type::scalar) invalid("step '" + it->first + "' is a sequence, not a number");
    return;
  }
  if (!e.is_object() || e.size() != 1) invalid("expression must be a number, a step id or a one-key object");
  const auto& [key, arg] = *e.items().begin();
  if (key == "neg") {
    check_expr(arg, defined, depth + 1);
    return;
  }
  if (!kArith.count(key)) invalid("unknown operator '" + key + "'");
  if (!arg.is_array() || arg.empty()) invalid("operator '" + key + "' needs an argument list");
  if ((key == "sub" || key == "div") && arg.size() != 2) invalid("operator '" + key + "' takes two arguments");
  for (const auto& a : arg) check_expr(a, defined, depth + 1);
}

// ---- runtime values

struct Item {
  enum class Kind { null, number, text, file } kind = Kind::null;
  double number = 0.0;
  std::string text;
  std::size_t file = 0;
};

struct Sequence {
  std::vector<Item> items;
  std::string origin;        // column name or "file set"
  bool column_absent = false;  // no table had the selected column
};

using Value = std::variant<Sequence, double>;

class Interpreter {
 public:
  Interpreter(const Evidence& ev, const ProgramLimits& limits) : ev_(ev), limits_(limits) {}

  RawOutput run(const json& program) {
    RawOutput out;
    for (const auto& step : program["steps"]) {
      const std::string op = step["op"].get<std::string>();
      if (op == "emit") {
        out.score_candidate = eval(step["score"]);
        if (step.contains("interpretables")) {
          for (const auto& [name, v] : step["interpretables"].items()) {
            if (v.is_object() && v.contains("text")) {
              out.interpretables[name] = v["text"];
            } else {
              out.interpretables[name] = eval(v);
            }
          }
        }
        break;
      }
      const std::string id = step["id"].get<std::string>();
      if (op == "select") {
        values_[id] = select(step);
      } else if (op == "map") {
        values_[id] = map(std::get<Sequence>(values_.at(step["input"].get<std::string>())), step["fn"].get<std::string>());
      } else {
        values_[id] = reduce(std::get<Sequence>(values_.at(step["input"].get<std::string>())), step);
      }
    }
    out.evidence_summary = ev_.summary();
    out.evidence_summary["program_steps"] = steps_;
    return out;
  }

 private:
  void tick(std::uint64_t n = 1) {
    steps_ += n;
    if (steps_ > limits_.max_steps) {
      crash("budget_exceeded: step limit " + std::to_string(limits_.max_steps) + " reached");
    }
  }

  Sequence select(const json& step) {
    Sequence s;
    if (step.contains("column")) {
      const std::string col = step["column"].get<std::string>();
      std::string only = step.value("file", std::string());
      s.origin = col;
      bool found = false;
      for (const auto& t : ev_.tables) {
        if (!only.empty() && t.file != only) continue;
        auto idx = t.column_index(col);
        if (!idx) continue;
        found = true;
        for (const auto& row : t.rows) {
          tick();
          Item it;
          const std::string& cell = *idx < row.size() ? row[*idx] : std::string();
          if (!is_missing_cell(cell)) {
            it.kind = Item::Kind::text;
            it.text = cell;
          }
          s.items.push_back(std::move(it));
        }
      }
      s.column_absent = !found;
      return s;
    }
    const std::string set = step["file_set"].get<std::string>();
    s.origin = "file set '" + set + "'";
    for (std::size_t i = 0; i < ev_.file_stats.size(); ++i) {
      tick();
      bool is_meta = descriptor_kind(ev_.file_stats[i].relative_path).has_value();
      if (set == "data" && is_meta) continue;
      if (set == "metadata" && !is_meta) continue;
      Item it;
      it.kind = Item::Kind::file;
      it.file = i;
      s.items.push_back(it);
    }
    return s;
  }

  Sequence map(const Sequence& in, const std::string& fn) {
    Sequence out;
    out.origin = in.origin;
    out.column_absent = in.column_absent;
    for (const auto& it : in.items) {
      tick();
      if (it.kind == Item::Kind::file) crash("type error: " + fn + " applied to files");
      if (it.kind == Item::Kind::null) {
        if (fn != "tokenize") out.items.push_back(it);
        continue;
      }
      if (fn == "parse_numeric") {
        Item r;
        if (it.kind == Item::Kind::number) {
          r = it;
        } else if (auto v = text::parse_number(it.text); v && std::isfinite(*v)) {
          r.kind = Item::Kind::number;
          r.number = *v;
        }
        out.items.push_back(r);
      } else if (fn == "length") {
        Item r;
        r.kind = Item::Kind::number;
        r.number = it.kind == Item::Kind::text ? static_cast<double>(it.text.size()) : 0.0;
        out.items.push_back(r);
      } else {
        std::string s = it.kind == Item::Kind::text ? it.text : text::fixed(it.number, 6);
        for (auto& tok : text::word_tokens(s)) {
          tick();
          Item r;
          r.kind = Item::Kind::text;
          r.text = std::move(tok);
          out.items.push_back(std::move(r));
        }
      }
    }
    return out;
  }

  [[noreturn]] void empty_reduce(const Sequence& in, const std::string& fn) {
    if (in.column_absent) crash("column_missing:" + in.origin + ": empty " + fn + " reduce");
    crash("insufficient_rows: empty " + fn + " reduce over '" + in.origin + "'");
  }

  static std::optional<double> as_number(const Item& it) {
    if (it.kind == Item::Kind::number) return it.number;
    if (it.kind == Item::Kind::text) {
      auto v = text::parse_number(it.text);
      if (v && std::isfinite(*v)) return v;
    }
    return std::nullopt;
  }

  bool matches(const Item& it, const json& p) {
    if (p.is_string()) {
      const std::string name = p.get<std::string>();
      if (name == "file_readable" || name == "file_parse_ok") {
        if (it.kind != Item::Kind::file) crash("type error: " + name + " applied to values");
        const auto& fs = ev_.file_stats[it.file];
        return name == "file_readable" ? fs.readable : fs.readable && fs.parse_ok;
      }
      if (it.kind == Item::Kind::file) crash("type error: " + name + " applied to files");
      if (name == "is_missing") return it.kind == Item::Kind::null;
      if (name == "not_missing") return it.kind != Item::Kind::null;
      return as_number(it).has_value();
    }
    if (it.kind == Item::Kind::file) crash("type error: comparison applied to files");
    const auto& [key, arg] = *p.items().begin();
    if (key == "eq" || key == "in") {
      auto equal = [&](const json& v) {
        if (v.is_number()) {
          auto n = as_number(it);
          return n && *n == v.get<double>();
        }
        return it.kind == Item::Kind::text && it.text == v.get<std::string>();
      };
      if (key == "eq") return equal(arg);
      return std::any_of(arg.begin(), arg.end(), equal);
    }
    auto n = as_number(it);
    if (!n) return false;
    if (key == "between") return *n >= arg[0].get<double>() && *n <= arg[1].get<double>();
    double x = arg.get<double>();
    if (key == "gt") return *n > x;
    if (key == "ge") return *n >= x;
    if (key == "lt") return *n < x;
    return *n <= x;
  }

  double reduce(const Sequence& in, const json& step) {
    const std::string fn = step["fn"].get<std::string>();
    if (fn == "fraction_matching") {
      if (in.items.empty()) empty_reduce(in, fn);
      std::size_t hit = 0;
      for (const auto& it : in.items) {
        tick();
        hit += matches(it, step["predicate"]) ? 1 : 0;
      }
      return static_cast<double>(hit) / static_cast<double>(in.items.size());
    }
    if (fn == "count") {
      std::size_t n = 0;
      for (const auto& it : in.items) {
        tick();
        n += it.kind != Item::Kind::null ? 1 : 0;
      }
      return static_cast<double>(n);
    }
    if (fn == "distinct_fraction" || fn == "entropy_normalized") {
      std::vector<std::string> labels;
      for (const auto& it : in.items) {
        tick();
        if (it.kind == Item::Kind::text) labels.push_back(it.text);
        if (it.kind == Item::Kind::number) labels.push_back(text::fixed(it.number, 9));
        if (it.kind == Item::Kind::file) labels.push_back(ev_.file_stats[it.file].relative_path);
      }
      if (labels.empty()) empty_reduce(in, fn);
      if (fn == "entropy_normalized") return stats::normalized_entropy(labels);
      std::set<std::string> distinct(labels.begin(), labels.end());
      return static_cast<double>(distinct.size()) / static_cast<double>(labels.size());
    }
    // numeric reductions
    std::vector<double> xs;
    for (const auto& it : in.items) {
      tick();
      if (it.kind == Item::Kind::null) continue;
      auto n = as_number(it);
      if (!n) crash("type error: " + fn + " over non-numeric values in '" + in.origin + "'");
      xs.push_back(*n);
    }
    if (xs.empty()) empty_reduce(in, fn);
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (fn == "min") return *lo;
    if (fn == "max") return *hi;
    if (fn == "minmax") return *hi - *lo;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  }

  double eval(const json& e) {
    tick();
    if (e.is_number()) return e.get<double>();
    if (e.is_string()) return std::get<double>(values_.at(e.get<std::string>()));
    const auto& [key, arg] = *e.items().begin();
    if (key == "neg") return -eval(arg);
    std::vector<double> xs;
    for (const auto& a : arg) xs.push_back(eval(a));
    double r = xs[0];
    if (key == "sub") return xs[0] - xs[1];
    if (key == "div") {
      if (xs[1] == 0.0) crash("division by zero");
      return xs[0] / xs[1];
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (key == "add") r += xs[i];
      if (key == "mul") r *= xs[i];
      if (key == "min") r = std::min(r, xs[i]);
      if (key == "max") r = std::max(r, xs[i]);
    }
    if (!std::isfinite(r)) crash("arithmetic overflow");
    return r;
  }

  const Evidence& ev_;
  const ProgramLimits& limits_;
  std::map<std::string, Value> values_;
  std::uint64_t steps_ = 0;
};

}  // namespace

void validate_program(const json& program) {
  if (!program.is_object() || !program.contains("steps") || !program["steps"].is_array()) invalid("needs a steps array");
  for (const auto& [k, v] : program.items()) {
    (void)v;
    if (k != "steps") invalid("unexpected key '" + k + "'");
  }
  const auto& steps = program["steps"];
  if (steps.size() > kMaxSteps) invalid("too many steps");
  std::map<std::string, Type> defined;
  std::size_t emits = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const json& s = steps[i];
    if (!s.is_object() || !s.contains("op") || !s["op"].is_string()) invalid("step " + std::to_string(i) + " needs an op");
    const std::string op = s["op"].get<std::string>();
    if (op == "emit") {
      ++emits;
      if (i + 1 != steps.size()) invalid("emit must be the last step");
      if (!s.contains("score")) invalid("emit needs a score");
      check_expr(s["score"], defined, 0);
      if (s.contains("interpretables")) {
        if (!s["interpretables"].is_object()) invalid("interpretables must be an object");
        for (const auto& [name, v] : s["interpretables"].items()) {
          if (name.empty()) invalid("empty interpretable name");
          if (v.is_object() && v.contains("text")) {
            if (v.size() != 1 || !v["text"].is_string()) invalid("text interpretable must be {\"text\": string}");
          } else {
            check_expr(v, defined, 0);
          }
        }
      }
      continue;
    }
    if (!s.contains("id") || !s["id"].is_string() || !valid_id(s["id"].get<std::string>())) {
      invalid("step " + std::to_string(i) + " needs an identifier id");
    }
    const std::string id = s["id"].get<std::string>();
    if (defined.count(id)) invalid("duplicate step id '" + id + "'");
    auto input_seq = [&]() {
      if (!s.contains("input") || !s["input"].is_string()) invalid("step '" + id + "' needs an input");
      auto it = defined.find(s["input"].get<std::string>());
      if (it == defined.end()) invalid("step '" + id + "' reads undefined step '" + s["input"].get<std::string>() + "'");
      if (it->second != Type::sequence) invalid("step '" + id + "' needs a sequence input");
    };
    if (op == "select") {
      bool col = s.contains("column"), set = s.contains("file_set");
      if (col == set) invalid("select needs exactly one of column or file_set");
      if (col && (!s["column"].is_string() || s["column"].get<std::string>().empty())) invalid("select column must be text");
      if (s.contains("file") && (!col || !s["file"].is_string())) invalid("select file must be text alongside column");
      if (set) {
        if (!s["file_set"].is_string()) invalid("file_set must be text");
        auto v = s["file_set"].get<std::string>();
        if (v != "all" && v != "data" && v != "metadata") invalid("unknown file_set '" + v + "'");
      }
      defined[id] = Type::sequence;
    } else if (op == "map") {
      input_seq();
      if (!s.contains("fn") || !s["fn"].is_string() || !kMapFns.count(s["fn"].get<std::string>())) {
        invalid("step '" + id + "' has an unknown map fn");
      }
      defined[id] = Type::sequence;
    } else if (op == "reduce") {
      input_seq();
      if (!s.contains("fn") || !s["fn"].is_string() || !kReduceFns.count(s["fn"].get<std::string>())) {
        invalid("step '" + id + "' has an unknown reduce fn");
      }
      bool wants_pred = s["fn"] == "fraction_matching";
      if (wants_pred != s.contains("predicate")) invalid("predicate belongs to fraction_matching only");
      if (wants_pred) check_predicate(s["predicate"]);
      defined[id] = Type::scalar;
    } else {
      invalid("unknown op '" + op + "'");
    }
  }
  if (emits != 1) invalid("emit must appear exactly once");
}

std::vector<std::string> program_interpretables(const json& program) {
  std::vector<std::string> out;
  if (!program.is_object() || !program.contains("steps")) return out;
  for (const auto& s : program["steps"]) {
    if (s.value("op", std::string()) == "emit" && s.contains("interpretables") && s["interpretables"].is_object()) {
      for (const auto& [name, v] : s["interpretables"].items()) {
        (void)v;
        out.push_back(name);
      }
    }
  }
  return out;
}

RawOutput run_program(const json& program, const Evidence& evidence, const ProgramLimits& limits) {
  validate_program(program);
  Interpreter in(evidence, limits);
  return in.run(program);
}

}  // namespace aiready
