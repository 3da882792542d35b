// aiready: profile datasets and score their AI readiness.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aiready/error.hpp"
#include "aiready/external.hpp"
#include "aiready/harness.hpp"
#include "aiready/pipeline.hpp"

namespace fs = std::filesystem;
using namespace aiready;

namespace {

struct Options {
  std::string root;
  std::string corpus;
  std::string records;
  std::string kb;
  std::string registry;
  std::string generator;
  std::string fault_plan;
  std::string out_dir = ".";
  std::string home;
  std::string domain;
  std::uint64_t seed = 0;
  int max_debug_iters = 3;
  int max_refinements = 2;
  double timeout_secs = 120.0;
  std::size_t parallelism = 1;
  std::size_t max_files = 100000;
  bool manifest_only = false;
  bool no_builtin_tools = false;
};

fs::path home_dir(const Options& o) {
  if (!o.home.empty()) return o.home;
  if (const char* h = std::getenv("AIREADY_HOME"); h && *h) return h;
  if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".aiready";
  return ".aiready";
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
  if (!out) fail(ErrorCode::PersistenceFailure, "cannot write " + p.string());
}

EngineConfig engine_config(const Options& o) {
  EngineConfig c;
  c.profile.limits.max_files = o.max_files;
  if (!o.domain.empty()) c.profile.domain_override = o.domain;
  c.planner.seed = o.seed;
  c.planner.max_refinements = o.max_refinements;
  c.max_debug_iterations = o.max_debug_iters;
  c.external_timeout_secs = o.timeout_secs;
  c.parallelism = std::max<std::size_t>(1, o.parallelism);
  return c;
}

std::unique_ptr<Generator> make_generator(const Options& o) {
  if (!o.fault_plan.empty()) {
    FaultPlan plan;
    if (o.fault_plan == "fail_then_succeed") plan.pattern = FaultPlan::Pattern::fail_then_succeed;
    else if (o.fault_plan == "always_out_of_range") plan.pattern = FaultPlan::Pattern::always_out_of_range;
    else if (o.fault_plan == "always_crash") plan.pattern = FaultPlan::Pattern::always_crash;
    else fail(ErrorCode::InvalidConfig, "unknown fault plan '" + o.fault_plan + "'");
    return inject_faults(plan);
  }
  if (!o.generator.empty()) return std::make_unique<ProcessGenerator>(ExternalDescriptor{o.generator, {}, 1}, o.timeout_secs);
  return generator_from_env(o.timeout_secs);
}

// Everything eval and batch share.
struct Session {
  Registry registry;
  KBIndex kb;
  std::unique_ptr<ToolLibrary> library;
  std::unique_ptr<ToolMemory> memory;
  std::unique_ptr<Generator> generator;

  explicit Session(const Options& o) {
    registry = o.registry.empty() ? default_registry() : load_registry_file(o.registry);
    if (!o.kb.empty()) {
      kb = ingest_kb(o.kb);
      for (const auto& issue : kb.issues) std::cerr << "kb: skipped " << issue.path << ": " << issue.message << "\n";
    }
    fs::path home = home_dir(o);
    library = std::make_unique<ToolLibrary>(home / "tools");
    memory = std::make_unique<ToolMemory>(home / "memory.jsonl");
    if (memory->rejected()) std::cerr << "memory: dropped " << memory->rejected() << " damaged record(s)\n";
    if (!o.no_builtin_tools) seed_builtin_tools(*library, registry);
    generator = make_generator(o);
  }

  EngineContext context() { return EngineContext{registry, kb, *library, *memory, generator.get(), nullptr}; }
};

int cmd_profile(const Options& o) {
  ProfileOptions po;
  po.limits.max_files = o.max_files;
  if (!o.domain.empty()) po.domain_override = o.domain;
  DataProfile p = build_profile(o.root, po);
  json j = profile_to_json(p);
  j["digest"] = profile_digest(p);
  std::cout << canonical_dump_pretty(j) << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  Session s(o);
  EngineConfig config = engine_config(o);
  fs::create_directories(o.out_dir);
  if (o.manifest_only) {
    DataProfile p = build_profile(o.root, config.profile);
    EvaluationManifest m = build_manifest(p, s.registry, s.kb.facts());
    write_text(fs::path(o.out_dir) / "manifest.json", canonical_dump_pretty(manifest_to_json(m)) + "\n");
    std::cout << canonical_dump_pretty(manifest_to_json(m)) << "\n";
    return 0;
  }
  EngineContext ctx = s.context();
  auto start = std::chrono::steady_clock::now();
  DatasetEvaluation ev = evaluate_dataset(o.root, config, ctx);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(fs::path(o.out_dir) / "report.json", render_json(ev.report));
  write_text(fs::path(o.out_dir) / "report.md", render_markdown(ev.report, s.registry));
  if (!o.records.empty()) {
    std::ofstream rec(o.records, std::ios::app);
    rec << canonical_dump(record_to_json(make_record(o.root, ev, secs))) << "\n";
  }
  std::cout << render_matrix({{ev.report.dataset, &ev.report.tree}}, s.registry);
  std::size_t failed = ev.failed_elements();
  if (failed) std::cerr << failed << " element(s) failed; see diagnostics in report.md\n";
  return failed ? 2 : 0;
}

std::vector<std::string> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot read corpus list " + path);
  std::vector<std::string> roots;
  std::string line;
  fs::path base = fs::path(path).parent_path();
  while (std::getline(in, line)) {
    auto t = std::string(line.substr(0, line.find('#')));
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
    if (t.empty()) continue;
    fs::path p(t);
    roots.push_back(p.is_absolute() ? p.string() : (base / p).lexically_normal().string());
  }
  return roots;
}

int cmd_batch(const Options& o) {
  Session s(o);
  EngineConfig config = engine_config(o);
  EngineContext ctx = s.context();
  auto roots = read_corpus(o.corpus);
  auto items = run_batch(roots, config, ctx);
  fs::create_directories(o.out_dir);
  std::ostringstream records;
  std::vector<RunRecord> rs;
  std::vector<std::pair<std::string, const ScoreTree*>> rows;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    records << canonical_dump(record_to_json(it.record)) << "\n";
    rs.push_back(it.record);
    if (!it.report) {
      std::cerr << it.record.dataset_id << ": " << it.record.error << "\n";
      continue;
    }
    fs::path dir = fs::path(o.out_dir) / (std::to_string(i) + "_" + it.report->dataset);
    fs::create_directories(dir);
    write_text(dir / "report.json", render_json(*it.report));
    write_text(dir / "report.md", render_markdown(*it.report, s.registry));
    rows.emplace_back(it.report->dataset, &it.report->tree);
  }
  write_text(fs::path(o.out_dir) / "records.jsonl", records.str());
  write_text(fs::path(o.out_dir) / "matrix.md", render_matrix(rows, s.registry));
  json metrics = metrics_to_json(compute_metrics(rs));
  write_text(fs::path(o.out_dir) / "metrics.json", canonical_dump_pretty(metrics) + "\n");
  std::cout << render_matrix(rows, s.registry) << "\n" << canonical_dump_pretty(metrics) << "\n";
  bool all = std::all_of(rs.begin(), rs.end(), [](const RunRecord& r) { return r.completed; });
  return all ? 0 : 2;
}

int cmd_metrics(const Options& o) {
  std::ifstream in(o.records);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot read " + o.records);
  std::vector<RunRecord> rs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::InvalidConfig, "bad line in " + o.records);
    rs.push_back(record_from_json(j));
  }
  std::cout << canonical_dump_pretty(metrics_to_json(compute_metrics(rs))) << "\n";
  return 0;
}

void engine_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--kb", o.kb, "Knowledge-base directory of JSON documents");
  cmd->add_option("--registry", o.registry, "Registry JSON (default: built-in)");
  cmd->add_option("--generator", o.generator, "External generator executable (overrides AIREADY_GENERATOR)");
  cmd->add_option("--fault-plan", o.fault_plan, "Use a scripted generator")
      ->check(CLI::IsMember({"fail_then_succeed", "always_out_of_range", "always_crash"}));
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--out-dir", o.out_dir, "Where reports are written");
  cmd->add_option("--home", o.home, "Tool library and memory location (default: $AIREADY_HOME or ~/.aiready)");
  cmd->add_option("--domain", o.domain, "Override the detected domain");
  cmd->add_option("--max-debug-iters", o.max_debug_iters, "Generations per synthesis")->check(CLI::Range(1, 100));
  cmd->add_option("--max-refinements", o.max_refinements, "Plan refinements per element")->check(CLI::Range(0, 100));
  cmd->add_option("--timeout-secs", o.timeout_secs, "External tool timeout")->check(CLI::PositiveNumber);
  cmd->add_option("--parallelism", o.parallelism, "Elements evaluated at once")->check(CLI::Range(1, 256));
  cmd->add_option("--max-files", o.max_files, "Scan limit");
  cmd->add_flag("--no-builtin-tools", o.no_builtin_tools, "Do not seed builtin tools into the library");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AI-readiness evaluation for scientific datasets"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);
  Options o;

  auto* profile = app.add_subcommand("profile", "Print the metadata-first profile of a dataset");
  profile->add_option("root", o.root, "Dataset directory")->required();
  profile->add_option("--domain", o.domain, "Override the detected domain");
  profile->add_option("--max-files", o.max_files, "Scan limit");

  auto* eval = app.add_subcommand("eval", "Evaluate one dataset and write report.json / report.md");
  eval->add_option("root", o.root, "Dataset directory")->required();
  eval->add_flag("--manifest-only", o.manifest_only, "Stop after element selection");
  eval->add_option("--records", o.records, "Append a run record to this JSONL file");
  engine_flags(eval, o);

  auto* batch = app.add_subcommand("batch", "Evaluate every dataset listed in a file (one path per line)");
  batch->add_option("corpus", o.corpus, "Corpus list file")->required();
  engine_flags(batch, o);

  auto* metrics = app.add_subcommand("metrics", "Recompute SC/TCSR/TCE from run records");
  metrics->add_option("records", o.records, "records.jsonl")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*profile) return cmd_profile(o);
    if (*eval) return cmd_eval(o);
    if (*batch) return cmd_batch(o);
    return cmd_metrics(o);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
