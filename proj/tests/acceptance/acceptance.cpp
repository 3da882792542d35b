// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "aiready/harness.hpp"
#include "aiready/io.hpp"
#include "test_support.hpp"

using namespace aiready;
using aitest::TempDir;
namespace fs = std::filesystem;
namespace oracle = aitest::oracle;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
};

std::string cli() { return aitest::shell_quote(AIREADY_CLI_PATH); }

// ---------------------------------------------------------------- 1

Result taxonomy_completeness() {
  Result o;
  auto t0 = Clock::now();
  Registry reg = load_registry(default_registry_document());
  std::vector<std::string> ids;
  for (const auto& sd : reg.sub_dimensions) ids.push_back(sd.id);
  const std::vector<std::string> want = {"T1", "T2", "T3", "Q1", "Q2", "Q3", "Q4", "AC1",
                                         "AC2", "AC3", "AC4", "AS1", "AS2", "AS3", "AS4"};
  o.check(ids == want, "sub-dimension ids differ from T1-T3, Q1-Q4, AC1-AC4, AS1-AS4");
  for (const auto& sd : reg.sub_dimensions) {
    o.check(!sd.name.empty(), sd.id + " has no name");
    o.check(!list_elements(reg, sd.id).empty(), sd.id + " has no atomic element");
  }
  double secs = seconds_since(t0);
  o.check(secs < 1.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail << ids.size() << " sub-dimensions, " << reg.elements.size() << " elements, " << secs << " s";
  return o;
}

// ---------------------------------------------------------------- 2

Result metadata_first_bound() {
  Result o;
  TempDir dir("aiready-1gb");
  const std::uint64_t file_size = 64ull << 20;
  std::uint64_t total = 0;
  for (int i = 0; i < 16; ++i) {
    auto p = dir / ("part_" + std::to_string(i) + ".csv");
    std::string head = "id,temperature,pressure,label\n";
    for (int r = 0; r < 50; ++r) {
      head += std::to_string(r) + "," + std::to_string(20 + r % 7) + "," + std::to_string(1000 + r) + "," +
              (r % 2 ? "a" : "b") + "\n";
    }
    aitest::write_file(p, head);
    // The rest of the file is a hole: it has the full size without using disk.
    if (::truncate(p.c_str(), static_cast<off_t>(file_size)) != 0) {
      o.check(false, "cannot size fixture file");
      return o;
    }
    total += file_size;
  }
  aitest::write_file(dir / "README.md", "Domain: climate\nSynthetic sensor dump.\n");
  DiskReader disk;
  CountingReader counter(disk);
  auto t0 = Clock::now();
  DataProfile p = build_profile(dir.path(), {}, counter);
  double secs = seconds_since(t0);
  std::uint64_t read = counter.bytes_read();
  o.check(total >= (1ull << 30), "fixture is smaller than 1 GB");
  o.check(p.total_bytes >= total, "profile did not see the whole tree");
  o.check(read < 5'000'000, "read " + std::to_string(read) + " bytes");
  o.check(secs < 10.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail << "tree " << (p.total_bytes >> 20) << " MiB, read " << read << " bytes in " << secs << " s";
  return o;
}

// ---------------------------------------------------------------- 3

Result pruning_semantics() {
  Result o;
  const auto& reg = default_registry();
  KBIndex kb = make_kb_index({});
  std::vector<std::string> watched;
  for (const auto& e : reg.elements) {
    if (e.sub_dimension == "AC3" || e.sub_dimension == "AC4" || e.sub_dimension == "AS4") watched.push_back(e.id);
  }
  o.check(!watched.empty(), "no AC3/AC4/AS4 elements");

  ToolLibrary lib;
  ToolMemory mem;
  seed_builtin_tools(lib, reg);
  EngineContext ctx{reg, kb, lib, mem, nullptr, nullptr};
  auto image = evaluate_dataset(aitest::dataset_fixture("image_only"), {}, ctx);
  for (const auto& id : watched) {
    const auto* d = image.manifest.find(id);
    o.check(d && d->status == ActivationStatus::pruned, "image_only: " + id + " is not pruned");
    const auto* es = image.report.tree.element(id);
    o.check(es && es->status == ElementStatus::pruned, "image_only: " + id + " is not reported pruned");
  }
  std::string matrix = render_matrix({{"image_only", &image.report.tree}}, reg);
  std::string row = matrix.substr(matrix.find("| image_only |"));
  row = row.substr(0, row.find('\n'));
  std::vector<std::string> cells;
  for (std::size_t pos = 1, next; (next = row.find('|', pos)) != std::string::npos; pos = next + 1) {
    std::string c = row.substr(pos, next - pos);
    cells.push_back(c.substr(1, c.size() - 2));
  }
  for (std::size_t i = 0; i < reg.sub_dimensions.size(); ++i) {
    const auto& id = reg.sub_dimensions[i].id;
    if (id == "AC3" || id == "AC4" || id == "AS4") {
      o.check(i + 1 < cells.size() && cells[i + 1] == "-", "matrix cell for " + id + " is not \"-\"");
    }
  }

  auto tab = build_profile(aitest::dataset_fixture("tabular_labeled"));
  auto m = build_manifest(tab, reg, kb.facts());
  for (const auto& id : watched) {
    const auto* d = m.find(id);
    o.check(d && d->status == ActivationStatus::active, "tabular_labeled: " + id + " is not active");
  }
  if (o.pass) o.detail << watched.size() << " elements pruned on image_only, active on tabular_labeled";
  return o;
}

// ---------------------------------------------------------------- 4

struct RandomTable {
  Table table;
  std::vector<std::int64_t> lo, hi;  // integer KB range per column
};

RandomTable categorical_integer_table(std::mt19937_64& rng) {
  RandomTable rt;
  Table& t = rt.table;
  t.file = "r.csv";
  std::size_t rows = 1 + rng() % 100, cols = 2 + rng() % 9;
  std::vector<int> vocab;
  for (std::size_t c = 0; c < cols; ++c) {
    t.columns.push_back("c" + std::to_string(c));
    t.kinds.push_back(c == 0 ? ColumnKind::categorical : ColumnKind::numeric);
    vocab.push_back(1 + static_cast<int>(rng() % 8));
    std::int64_t lo = static_cast<std::int64_t>(rng() % 40) - 20;
    rt.lo.push_back(lo);
    rt.hi.push_back(lo + static_cast<std::int64_t>(rng() % 60));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    Record rec;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == 0) {
        rec.push_back("k" + std::to_string(rng() % static_cast<unsigned>(vocab[c])));
      } else {
        // Integers around the KB range, some outside it.
        std::int64_t span = rt.hi[c] - rt.lo[c] + 10;
        rec.push_back(std::to_string(rt.lo[c] - 5 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(span))));
      }
    }
    t.rows.push_back(rec);
  }
  // Copy some rows so duplicates occur.
  std::size_t copies = rng() % (rows / 4 + 1);
  for (std::size_t i = 0; i < copies; ++i) t.rows.push_back(t.rows[rng() % rows]);
  return rt;
}

Table categorical_table(std::mt19937_64& rng) {
  Table t;
  t.file = "c.csv";
  std::size_t rows = 1 + rng() % 100, cols = 2 + rng() % 9;
  std::vector<int> vocab;
  for (std::size_t c = 0; c < cols; ++c) {
    t.columns.push_back("f" + std::to_string(c));
    t.kinds.push_back(ColumnKind::categorical);
    vocab.push_back(1 + static_cast<int>(rng() % 6));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    Record rec;
    for (std::size_t c = 0; c < cols; ++c) {
      // Later columns are noisy copies of the label so association varies.
      if (c > 0 && rng() % 3 == 0) rec.push_back("v" + rec[0].substr(1));
      else rec.push_back("v" + std::to_string(rng() % static_cast<unsigned>(vocab[c])));
    }
    t.rows.push_back(rec);
  }
  return t;
}

// Up to 50 rows, each fresh or a copy of an earlier row with a few cells replaced.
Table mutation_table(std::mt19937_64& rng) {
  Table t;
  t.file = "m.csv";
  std::size_t cols = 4 + rng() % 7, rows = 2 + rng() % 49;
  for (std::size_t c = 0; c < cols; ++c) {
    t.columns.push_back("m" + std::to_string(c));
    t.kinds.push_back(ColumnKind::text);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    Record rec;
    if (r > 0 && rng() % 2 == 0) {
      rec = t.rows[rng() % t.rows.size()];
      std::size_t m = rng() % 3;
      for (std::size_t k = 0; k < m; ++k) rec[rng() % cols] = "w" + std::to_string(rng() % 1000000);
    } else {
      for (std::size_t c = 0; c < cols; ++c) rec.push_back("w" + std::to_string(rng() % 1000000));
    }
    t.rows.push_back(rec);
  }
  return t;
}

std::vector<ElementScore> random_scores(const Registry& reg, std::mt19937_64& rng,
                                        std::map<std::string, std::optional<double>>& in) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ElementScore> out;
  for (const auto& e : reg.elements) {
    auto roll = rng() % 5;
    if (roll == 0) {
      out.push_back(pruned_score(e.id, "p"));
      in[e.id] = std::nullopt;
    } else if (roll == 1) {
      out.push_back(failed_score(e.id, "f", json::array()));
      in[e.id] = std::nullopt;
    } else {
      ElementScore s;
      s.element_id = e.id;
      s.status = ElementStatus::scored;
      s.score = u(rng);
      in[e.id] = s.score;
      out.push_back(s);
    }
  }
  return out;
}

bool close(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::fabs(*a - *b) <= tol;
}

Result evaluator_oracles() {
  Result o;
  std::mt19937_64 rng(20240101);
  auto t0 = Clock::now();
  std::size_t checks = 0;
  const double tol = 1e-9;
  for (int c = 0; c < 1000; ++c) {
    std::string tag = "case " + std::to_string(c) + ": ";
    // Balance, duplicates and occupancy on an integer table with a label column.
    RandomTable rt = categorical_integer_table(rng);
    const Table& t = rt.table;
    Evidence ev = aitest::evidence_of({t});
    std::vector<std::string> labels = t.column(0);
    double bal = run_evaluator("label_balance", ev, {{"target_column", "c0"}}).score_candidate;
    o.check(std::fabs(bal - oracle::balance(labels)) <= tol, tag + "label balance");
    double dup = run_evaluator("exact_duplicate_rate", ev, {}).score_candidate;
    o.check(std::fabs(dup - oracle::duplicate_rate(t.rows)) <= tol, tag + "exact duplicates");
    json ranges = json::object();
    for (std::size_t col = 1; col < t.columns.size(); ++col) ranges[t.columns[col]] = {rt.lo[col], rt.hi[col]};
    auto cov = run_evaluator("condition_range_coverage", ev, {{"ranges", ranges}, {"target_column", "c0"}});
    for (std::size_t col = 1; col < t.columns.size(); ++col) {
      std::vector<std::int64_t> vals;
      for (const auto& r : t.rows) vals.push_back(std::stoll(r[col]));
      double got = cov.interpretables["per_column_occupancy"][t.columns[col]].get<double>();
      o.check(std::fabs(got - oracle::occupancy(vals, rt.lo[col], rt.hi[col], 10)) <= tol, tag + "bin occupancy");
    }

    // NMI per feature against the label.
    Table ct = categorical_table(rng);
    RawOutput fta;
    try {
      fta = run_evaluator("feature_target_association", aitest::evidence_of({ct}), {{"target_column", "f0"}});
    } catch (const Error& e) {
      // Legitimate only when every feature is identifier-like.
      o.check(e.code() == ErrorCode::NoFeatures, tag + "association raised " + e.what());
      fta.interpretables = {{"per_feature_nmi", json::object()}};
    }
    auto y = ct.column(0);
    for (std::size_t col = 1; col < ct.columns.size(); ++col) {
      auto x = ct.column(col);
      std::set<std::string> distinct(x.begin(), x.end());
      bool id_like = static_cast<double>(distinct.size()) > 0.5 * static_cast<double>(x.size());
      const json& per = fta.interpretables["per_feature_nmi"];
      if (id_like) {
        o.check(!per.contains(ct.columns[col]), tag + "identifier-like feature was scored");
        continue;
      }
      o.check(per.contains(ct.columns[col]) && std::fabs(per[ct.columns[col]].get<double>() - oracle::nmi(x, y)) <= tol,
              tag + "nmi " + ct.columns[col]);
    }

    // Near duplicates: MinHash estimate against exact Jaccard.
    Table mt = mutation_table(rng);
    std::vector<std::vector<std::string>> sets;
    for (const auto& r : mt.rows) sets.push_back(oracle::row_tokens(mt.columns, r));
    double est = run_evaluator("near_duplicate_rate", aitest::evidence_of({mt}), {}).score_candidate;
    o.check(std::fabs(est - oracle::near_duplicate_fraction(sets, 0.9)) <= 0.1, tag + "near duplicates");

    // Aggregation over a random tree.
    Registry reg = aitest::random_registry(rng);
    std::map<std::string, std::optional<double>> in;
    auto tree = aggregate(random_scores(reg, rng, in), reg);
    auto want = oracle::aggregate(reg, in);
    for (const auto& sd : reg.sub_dimensions) {
      o.check(close(tree.sub_dimension(sd.id)->score, want.sub_dimensions[sd.id], tol), tag + "aggregation " + sd.id);
    }
    for (const auto& d : reg.dimensions) {
      o.check(close(tree.dimension(d.id)->score, want.dimensions[d.id], tol), tag + "aggregation " + d.id);
    }
    o.check(close(tree.total, want.total, tol), tag + "aggregation total");
    ++checks;
  }
  double secs = seconds_since(t0);
  o.check(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail << checks << " randomized cases in " << secs << " s";
  return o;
}

// ---------------------------------------------------------------- 5

Result verification_loop() {
  Result o;
  TempDir home;
  const auto& reg = default_registry();
  KBIndex kb = make_kb_index({});
  ToolLibrary lib(home / "tools");
  auto mem_path = home / "memory.jsonl";
  ToolMemory mem(mem_path);
  auto gen = inject_faults({});  // out-of-range score, then a missing field, then a valid program
  EngineContext ctx{reg, kb, lib, mem, gen.get(), nullptr};
  EngineConfig cfg;
  cfg.max_debug_iterations = 3;
  auto profile = std::make_shared<const DataProfile>(build_profile(aitest::dataset_fixture("tabular_labeled")));
  const AtomicElement& element = *reg.find_element("missing_value_rate");
  ElementRun run = run_element(element, profile, profile_digest(*profile), cfg, ctx);

  o.check(run.score.status == ElementStatus::scored, "element did not score: " + run.score.reason);
  RunRecord rec;
  rec.synthesis_attempts = static_cast<std::size_t>(run.synthesis.attempts);
  rec.synthesis_successes = static_cast<std::size_t>(run.synthesis.successes);
  rec.debug_iterations = run.synthesis.iterations;
  auto tce = compute_tce({rec});
  auto tcsr = compute_tcsr({rec});
  o.check(tce && *tce == 2.0, "TCE is not 2.0");
  o.check(tcsr && *tcsr == 1.0, "TCSR is not 1.0");
  o.check(!lib.contains("builtin.missing_value_rate"), "a builtin tool was available");

  ToolMemory reloaded(mem_path);
  std::size_t failures = 0, successes = 0;
  for (const auto& e : reloaded.entries()) {
    if (e.outcome == Outcome::success) ++successes;
    else ++failures;
  }
  o.check(failures == 2 && successes == 1,
          "memory holds " + std::to_string(failures) + " failures and " + std::to_string(successes) + " successes");
  o.check(gen->calls() == 3, "generator was called " + std::to_string(gen->calls()) + " times");
  if (o.pass) o.detail << "TCE " << *tce << ", TCSR " << *tcsr << ", memory 2 failures + 1 success";
  return o;
}

// ---------------------------------------------------------------- 6

void sabotage(const fs::path& dir) {
  aitest::write_file(dir / "measurements.csv", "a,b,c\n");
  aitest::write_file(dir / "README.md", "Header only; the rows were lost.\n");
}

Result adversarial_bound() {
  Result o;
  TempDir work;
  sabotage(work / "sabotaged_1");
  sabotage(work / "sabotaged_2");

  // Per-element bound, in process.
  const auto& reg = default_registry();
  KBIndex kb = ingest_kb(aitest::kb_fixture());
  ToolLibrary lib;
  ToolMemory mem;
  seed_builtin_tools(lib, reg);
  FaultPlan fp;
  fp.pattern = FaultPlan::Pattern::always_crash;
  auto gen = inject_faults(fp);
  EngineContext ctx{reg, kb, lib, mem, gen.get(), nullptr};
  EngineConfig cfg;
  cfg.max_debug_iterations = 3;
  cfg.planner.max_refinements = 2;
  auto ev = evaluate_dataset(work / "sabotaged_1", cfg, ctx);
  std::size_t failed = 0;
  for (const auto& run : ev.runs) {
    // Each element starts with exactly its builtin tool as the one candidate.
    std::size_t bound = 2 * (1 + 1) * 3;
    o.check(run.run_budget == bound, run.element_id + " budget " + std::to_string(run.run_budget));
    o.check(run.tool_runs <= bound, run.element_id + " used " + std::to_string(run.tool_runs) + " runs");
    failed += run.score.status == ElementStatus::failed ? 1 : 0;
  }
  o.check(failed > 0, "sabotaged dataset produced no failure");

  // Exit code of a single sabotaged run.
  auto eval = aitest::run_command(cli() + " eval --fault-plan always_crash --max-debug-iters 3 --max-refinements 2 --home " +
                                  aitest::shell_quote((work / "home_eval").string()) + " --out-dir " +
                                  aitest::shell_quote((work / "out_eval").string()) + " " +
                                  aitest::shell_quote((work / "sabotaged_1").string()));
  o.check(eval.exit_code == 2, "eval on a sabotaged dataset exited " + std::to_string(eval.exit_code));

  // SC over ten datasets, two of them sabotaged.
  std::ostringstream corpus;
  for (const auto& name : aitest::domain_fixtures()) corpus << aitest::dataset_fixture(name).string() << "\n";
  corpus << aitest::dataset_fixture("tabular_labeled").string() << "\n";
  corpus << aitest::dataset_fixture("image_only").string() << "\n";
  corpus << (work / "sabotaged_1").string() << "\n" << (work / "sabotaged_2").string() << "\n";
  aitest::write_file(work / "corpus.txt", corpus.str());
  auto batch = aitest::run_command(cli() + " batch --fault-plan always_crash --max-debug-iters 3 --max-refinements 2 --kb " +
                                   aitest::shell_quote(aitest::kb_fixture().string()) + " --home " +
                                   aitest::shell_quote((work / "home_batch").string()) + " --out-dir " +
                                   aitest::shell_quote((work / "out_batch").string()) + " " +
                                   aitest::shell_quote((work / "corpus.txt").string()));
  o.check(batch.exit_code == 2, "batch exited " + std::to_string(batch.exit_code));
  auto metrics = json::parse(aitest::read_file(work / "out_batch" / "metrics.json"), nullptr, false);
  bool sc_ok = metrics.is_object() && metrics["sc"].is_number() && metrics["sc"].get<double>() == 0.8;
  o.check(sc_ok, "SC is " + (metrics.is_object() ? metrics["sc"].dump() : std::string("unreadable")));
  if (o.pass) o.detail << ev.runs.size() << " elements within bound, eval exit 2, SC " << metrics["sc"].get<double>();
  return o;
}

// ---------------------------------------------------------------- 7

Result determinism() {
  Result o;
  TempDir work;
  int n = 0;
  for (const auto& name : aitest::domain_fixtures()) {
    std::vector<std::string> reports;
    for (const char* par : {"1", "1", "8"}) {
      auto tag = name + "_" + std::to_string(n++);
      auto out = work / ("out_" + tag);
      auto r = aitest::run_command(cli() + " eval --seed 7 --parallelism " + par + " --kb " +
                                   aitest::shell_quote(aitest::kb_fixture().string()) + " --home " +
                                   aitest::shell_quote((work / ("home_" + tag)).string()) + " --out-dir " +
                                   aitest::shell_quote(out.string()) + " " +
                                   aitest::shell_quote(aitest::dataset_fixture(name).string()));
      o.check(r.exit_code == 0 || r.exit_code == 2, name + ": eval exited " + std::to_string(r.exit_code));
      reports.push_back(fs::exists(out / "report.json") ? aitest::read_file(out / "report.json") : std::string());
    }
    o.check(!reports[0].empty(), name + ": no report.json");
    o.check(reports[0] == reports[1], name + ": two runs differ");
    o.check(reports[0] == reports[2], name + ": parallelism 1 and 8 differ");
  }
  if (o.pass) o.detail << aitest::domain_fixtures().size() << " fixtures byte-identical over 3 runs each";
  return o;
}

// ---------------------------------------------------------------- 8

Result aggregation_invariants() {
  Result o;
  std::mt19937_64 rng(77);
  const double tol = 1e-12;
  std::uniform_real_distribution<double> u(0, 1), scale(0.01, 100);
  for (int trial = 0; trial < 10000; ++trial) {
    std::string tag = "tree " + std::to_string(trial) + ": ";
    Registry reg = aitest::random_registry(rng);
    std::map<std::string, std::optional<double>> in;
    auto scores = random_scores(reg, rng, in);
    auto tree = aggregate(scores, reg);

    // Renormalization: equals the weighted mean over scored children only.
    auto want = oracle::aggregate(reg, in);
    o.check(close(tree.total, want.total, tol), tag + "total differs from the renormalized mean");
    for (const auto& sd : reg.sub_dimensions) {
      o.check(close(tree.sub_dimension(sd.id)->score, want.sub_dimensions[sd.id], tol), tag + sd.id + " renormalization");
    }

    // Boundedness: every node lies within its scored children's range.
    for (const auto& sd : reg.sub_dimensions) {
      double lo = 2, hi = -1;
      for (const auto& e : tree.elements) {
        if (reg.find_element(e.element_id)->sub_dimension == sd.id && e.score) {
          lo = std::min(lo, *e.score);
          hi = std::max(hi, *e.score);
        }
      }
      const auto& s = tree.sub_dimension(sd.id)->score;
      if (s) o.check(*s >= lo - tol && *s <= hi + tol, tag + sd.id + " outside its children's range");
    }
    for (const auto& d : reg.dimensions) {
      double lo = 2, hi = -1;
      for (const auto& sd : tree.sub_dimensions) {
        if (reg.find_sub_dimension(sd.id)->dimension == d.id && sd.score) {
          lo = std::min(lo, *sd.score);
          hi = std::max(hi, *sd.score);
        }
      }
      const auto& s = tree.dimension(d.id)->score;
      if (s) o.check(*s >= lo - tol && *s <= hi + tol, tag + d.id + " outside its children's range");
    }
    if (tree.total) o.check(*tree.total >= -tol && *tree.total <= 1 + tol, tag + "total outside [0,1]");

    // Weight scaling: multiplying one sub-dimension's element weights by a
    // constant leaves every aggregate unchanged.
    Registry scaled = reg;
    const std::string target = reg.sub_dimensions[rng() % reg.sub_dimensions.size()].id;
    double k = scale(rng);
    for (auto& e : scaled.elements) {
      if (e.sub_dimension == target) e.weight *= k;
    }
    auto tree2 = aggregate(scores, scaled);
    o.check(close(tree.total, tree2.total, tol), tag + "weight scaling changed the total");
    o.check(close(tree.sub_dimension(target)->score, tree2.sub_dimension(target)->score, tol),
            tag + "weight scaling changed " + target);

    // Pruning a child that equals the mean of its scored siblings changes nothing.
    if (tree.total) {
      auto with_extra = scores;
      const ElementScore* victim = nullptr;
      for (auto& e : with_extra) {
        if (!e.score) {
          const auto& sd = reg.find_element(e.element_id)->sub_dimension;
          if (tree.sub_dimension(sd)->score) {
            e.status = ElementStatus::scored;
            e.score = *tree.sub_dimension(sd)->score;
            victim = &e;
            break;
          }
        }
      }
      if (victim) {
        auto tree3 = aggregate(with_extra, reg);
        o.check(close(tree.total, tree3.total, tol), tag + "neutral child changed the total");
      }
    }
  }
  if (o.pass) o.detail << "10000 trees within 1e-12";
  return o;
}

// ---------------------------------------------------------------- 9

Result crash_safe_memory() {
  Result o;
  TempDir dir;
  ToolLibrary lib;
  ToolSpec t;
  t.metadata.tool_id = "probe";
  t.metadata.scope = {"missing_value_rate"};
  t.evaluator_id = "missing_value_rate";
  lib.register_tool(t);
  auto path = dir / "memory.jsonl";
  const int n = 25;
  {
    ToolMemory mem(path);
    for (int i = 0; i < n; ++i) {
      ToolMemoryEntry e;
      e.tool_id = "probe";
      e.tool_version = 1;
      e.element_id = "missing_value_rate";
      e.profile_digest = "d" + std::to_string(i);
      e.outcome = i % 2 ? Outcome::success : Outcome::semantic_failure;
      if (e.outcome != Outcome::success) e.failure_signature = "sig";
      e.iterations_used = i;
      mem.record(lib, e);
    }
  }
  const std::string full = aitest::read_file(path);
  std::size_t last_start = full.rfind('\n', full.size() - 2) + 1;
  for (std::size_t cut = last_start + 1; cut < full.size() - 1; cut += 7) {
    aitest::write_file(path, full.substr(0, cut));
    ToolMemory reloaded(path);
    auto es = reloaded.entries();
    o.check(es.size() == static_cast<std::size_t>(n - 1), "cut at " + std::to_string(cut) + " kept " +
                                                               std::to_string(es.size()) + " entries");
    o.check(reloaded.rejected() == 1, "partial record not rejected at " + std::to_string(cut));
    for (std::size_t i = 0; i < es.size(); ++i) {
      o.check(es[i].iterations_used == static_cast<int>(i), "entry order changed");
    }
    ToolMemory again(path);
    o.check(again.rejected() == 0 && again.size() == static_cast<std::size_t>(n - 1), "partial tail not trimmed");
  }
  if (o.pass) o.detail << "every cut inside the last record keeps " << n - 1 << " complete entries";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 taxonomy completeness", taxonomy_completeness},
      {"2 metadata-first bound", metadata_first_bound},
      {"3 pruning semantics", pruning_semantics},
      {"4 evaluator oracle suite", evaluator_oracles},
      {"5 verification loop", verification_loop},
      {"6 boundedness under adversarial generator", adversarial_bound},
      {"7 end-to-end determinism", determinism},
      {"8 aggregation invariants", aggregation_invariants},
      {"9 crash-safe memory", crash_safe_memory},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Result o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
