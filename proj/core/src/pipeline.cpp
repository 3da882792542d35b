#include "aiready/pipeline.hpp"

#include <atomic>
#include <thread>

#include "aiready/evidence.hpp"

namespace aiready {
namespace fs = std::filesystem;

json config_to_json(const EngineConfig& c) {
  const auto& l = c.profile.limits;
  return {{"scan", {{"max_files", l.max_files}, {"max_depth", l.max_depth}, {"probe_bytes", l.probe_bytes},
                    {"probe_rows", l.probe_rows}}},
          {"domain_override", c.profile.domain_override ? json(*c.profile.domain_override) : json(nullptr)},
          {"planner", {{"row_budget", c.planner.row_budget}, {"byte_budget", c.planner.byte_budget},
                       {"row_budget_cap", c.planner.row_budget_cap}, {"byte_budget_cap", c.planner.byte_budget_cap},
                       {"max_refinements", c.planner.max_refinements}, {"seed", c.planner.seed},
                       {"kb_top_k", c.planner.kb_top_k}}},
          {"max_debug_iterations", c.max_debug_iterations},
          {"external_timeout_secs", c.external_timeout_secs},
          {"max_program_steps", c.limits.max_steps},
          {"deficiency_threshold", c.report.deficiency_threshold}};
}

std::size_t DatasetEvaluation::failed_elements() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.score.status == ElementStatus::failed ? 1 : 0;
  return n;
}

std::string dataset_name(const fs::path& root) {
  fs::path p = root.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  std::string name = p.filename().string();
  return name.empty() || name == "." ? "dataset" : name;
}

namespace {

json kb_snippets(const KBIndex& kb, const std::vector<std::string>& citations) {
  json out = json::array();
  for (const auto& id : citations) {
    for (const auto& d : kb.documents) {
      if (d.id == id) {
        out.push_back({{"id", d.id}, {"domain", d.domain}, {"kind", std::string(to_string(d.kind))}, {"body", d.body}});
      }
    }
  }
  return out;
}

ElementScore fail_with(const std::string& id, const std::string& reason, const std::vector<ReviewVerdict>& verdicts) {
  json vs = json::array();
  for (const auto& v : verdicts) vs.push_back(verdict_to_json(v));
  return failed_score(id, reason, vs);
}

}  // namespace

ElementRun run_element(const AtomicElement& element, std::shared_ptr<const DataProfile> profile,
                       const std::string& digest, const EngineConfig& config, EngineContext& ctx) {
  ElementRun run;
  run.element_id = element.id;
  ElementPlan plan;
  try {
    plan = plan_element(element, *profile, ctx.kb, config.planner);
  } catch (const Error& e) {
    run.score = failed_score(element.id, e.what(), json::array());
    return run;
  }

  const std::size_t candidates = find_compatible(ctx.library, ctx.memory, element, *profile, digest).size();
  const std::size_t d = static_cast<std::size_t>(std::max(1, config.max_debug_iterations));
  const std::size_t r = static_cast<std::size_t>(std::max(1, config.planner.max_refinements));
  run.run_budget = r * (candidates + 1) * d;
  std::size_t budget = run.run_budget;

  OrchestrateConfig oc;
  oc.max_debug_iterations = config.max_debug_iterations;
  oc.external_timeout_secs = config.external_timeout_secs;
  oc.limits = config.limits;
  oc.generator = ctx.generator;
  oc.profile_summary = profile_summary(*profile);

  std::vector<ReviewVerdict> history;
  for (;;) {
    oc.kb_snippets = kb_snippets(ctx.kb, plan.kb_citations);
    Evidence evidence;
    std::vector<ReviewVerdict> verdicts;
    OrchestrateOutcome out;
    try {
      evidence = load_evidence(plan, profile, ctx.reader ? *ctx.reader : default_reader());
    } catch (const Error& e) {
      ReviewVerdict v;
      v.pass = false;
      v.violations.push_back({VerdictCode::tool_crash, e.what()});
      verdicts.push_back(v);
    }
    if (verdicts.empty()) {
      out = orchestrate(plan, element, evidence, *profile, digest, ctx.library, ctx.memory, oc, &budget);
      run.tool_runs += out.runs;
      run.synthesis.attempts += out.synthesis.attempts;
      run.synthesis.successes += out.synthesis.successes;
      run.synthesis.iterations.insert(run.synthesis.iterations.end(), out.synthesis.iterations.begin(),
                                      out.synthesis.iterations.end());
      if (out.result) {
        ScoringStrategy scoring = plan.scoring;
        scoring.normalization = out.result->normalization;
        run.score = normalize(*out.result, scoring);
        run.score.kb_citations = plan.kb_citations;
        return run;
      }
      verdicts = out.verdicts;
    }
    history.insert(history.end(), verdicts.begin(), verdicts.end());
    if (out.budget_exhausted) {
      run.score = fail_with(element.id, "tool run budget of " + std::to_string(run.run_budget) + " spent", history);
      return run;
    }
    auto esc = escalate(verdicts, plan);
    if (auto* f = std::get_if<ElementFailure>(&esc)) {
      run.score = fail_with(element.id, f->reason, history);
      return run;
    }
    try {
      plan = refine_plan(plan, {std::get<RefinementRequest>(esc).feedback}, *profile, config.planner);
      ++run.refinements;
    } catch (const Error& e) {
      run.score = fail_with(element.id, e.what(), history);
      return run;
    }
  }
}

DatasetEvaluation evaluate_dataset(const fs::path& root, const EngineConfig& config, EngineContext& ctx) {
  DatasetEvaluation ev;
  FileReader& reader = ctx.reader ? *ctx.reader : default_reader();
  auto profile = std::make_shared<DataProfile>(build_profile(root, config.profile, reader));
  ev.profile = profile;
  ev.manifest = build_manifest(*profile, ctx.registry, ctx.kb.facts());
  const std::string digest = profile_digest(*profile);

  std::vector<const AtomicElement*> active;
  for (const auto& d : ev.manifest.decisions) {
    if (d.status == ActivationStatus::active) active.push_back(ctx.registry.find_element(d.element_id));
  }
  ev.runs.resize(active.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < active.size(); i = next++) {
      ev.runs[i] = run_element(*active[i], profile, digest, config, ctx);
    }
  };
  std::size_t threads = std::min<std::size_t>(std::max<std::size_t>(1, config.parallelism), active.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ElementScore> scores;
  for (const auto& d : ev.manifest.decisions) {
    if (d.status == ActivationStatus::pruned) scores.push_back(pruned_score(d.element_id, d.reason));
  }
  for (const auto& r : ev.runs) scores.push_back(r.score);
  ScoreTree tree = aggregate(scores, ctx.registry);
  RunMetadata meta{config.planner.seed, json_digest(config_to_json(config)), ctx.registry.version};
  ev.report = build_report(dataset_name(root), *profile, manifest_to_json(ev.manifest), std::move(tree), ctx.registry,
                           meta, config.report);
  return ev;
}

}  // namespace aiready
