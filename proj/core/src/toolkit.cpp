#include "aiready/toolkit.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

#include "aiready/check_program.hpp"
#include "aiready/error.hpp"
#include "aiready/evaluators.hpp"

namespace aiready {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_spec(const std::string& what) { fail(ErrorCode::InvalidToolSpec, "tool spec: " + what); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::PersistenceFailure, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fd_fully(int fd, std::string_view data, const fs::path& p) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::PersistenceFailure, "write to " + p.string() + " failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Write to a temporary sibling, sync, then rename over the target.
void write_atomic(const fs::path& p, std::string_view data) {
  fs::path tmp = p;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail(ErrorCode::PersistenceFailure, "cannot create " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_fd_fully(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fdatasync(fd) != 0 || ::close(fd) != 0) fail(ErrorCode::PersistenceFailure, "sync failed for " + tmp.string());
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) fail(ErrorCode::PersistenceFailure, "rename to " + p.string() + " failed: " + ec.message());
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path version_file(const fs::path& dir, const std::string& id, int version) {
  return dir / (id + ".v" + std::to_string(version) + ".json");
}

}  // namespace

// ---------------------------------------------------------------- specs

json tool_to_json(const ToolSpec& s) {
  json kinds = json::array();
  for (auto k : s.metadata.input_requirements.column_kinds) kinds.push_back(std::string(to_string(k)));
  json j = {
      {"metadata",
       {{"tool_id", s.metadata.tool_id},
        {"scope", s.metadata.scope},
        {"input_requirements",
         {{"evidence", std::string(to_string(s.metadata.input_requirements.evidence))}, {"column_kinds", kinds}}},
        {"domain_applicability", s.metadata.domain_applicability},
        {"method_summary", s.metadata.method_summary},
        {"version", s.metadata.version}}},
      {"kind", std::string(to_string(s.kind))},
  };
  switch (s.kind) {
    case ToolKind::builtin:
      j["body"] = {{"evaluator_id", s.evaluator_id}, {"default_bindings", s.default_bindings}};
      break;
    case ToolKind::dsl:
      j["body"] = {{"program", s.program}};
      break;
    case ToolKind::external:
      j["body"] = {{"executable", s.external.executable},
                   {"args", s.external.args},
                   {"protocol_version", s.external.protocol_version}};
      break;
  }
  return j;
}

ToolSpec tool_from_json(const json& j) {
  try {
    ToolSpec s;
    const json& m = j.at("metadata");
    s.metadata.tool_id = m.at("tool_id").get<std::string>();
    s.metadata.scope = m.at("scope").get<std::vector<std::string>>();
    const json& req = m.at("input_requirements");
    auto ev = evidence_class_from_string(req.at("evidence").get<std::string>());
    if (!ev) bad_spec("unknown evidence class");
    s.metadata.input_requirements.evidence = *ev;
    for (const auto& k : req.value("column_kinds", json::array())) {
      auto ck = column_kind_from_string(k.get<std::string>());
      if (!ck) bad_spec("unknown column kind");
      s.metadata.input_requirements.column_kinds.push_back(*ck);
    }
    s.metadata.domain_applicability = m.value("domain_applicability", std::vector<std::string>{"any"});
    s.metadata.method_summary = m.value("method_summary", std::string());
    s.metadata.version = m.value("version", 0);
    auto kind = tool_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) bad_spec("unknown kind");
    s.kind = *kind;
    const json& b = j.at("body");
    switch (s.kind) {
      case ToolKind::builtin:
        s.evaluator_id = b.at("evaluator_id").get<std::string>();
        s.default_bindings = b.value("default_bindings", json::object());
        break;
      case ToolKind::dsl:
        s.program = b.at("program");
        break;
      case ToolKind::external:
        s.external.executable = b.at("executable").get<std::string>();
        s.external.args = b.value("args", std::vector<std::string>{});
        s.external.protocol_version = b.value("protocol_version", 1);
        break;
    }
    return s;
  } catch (const json::exception& e) {
    bad_spec(e.what());
  }
}

void validate_tool(const ToolSpec& s) {
  static const std::regex id_re("[A-Za-z0-9][A-Za-z0-9._-]*");
  if (!std::regex_match(s.metadata.tool_id, id_re)) bad_spec("tool_id '" + s.metadata.tool_id + "' is not a plain name");
  if (s.metadata.scope.empty()) bad_spec("tool '" + s.metadata.tool_id + "' has an empty scope");
  if (s.metadata.domain_applicability.empty()) bad_spec("domain_applicability must list tags or \"any\"");
  switch (s.kind) {
    case ToolKind::builtin: {
      const EvaluatorSignature* sig = find_signature(s.evaluator_id);
      if (!sig) bad_spec("unknown evaluator '" + s.evaluator_id + "'");
      try {
        validate_bindings(*sig, s.default_bindings);
      } catch (const Error& e) {
        bad_spec(e.what());
      }
      break;
    }
    case ToolKind::dsl:
      try {
        validate_program(s.program);
      } catch (const Error& e) {
        bad_spec(e.what());
      }
      break;
    case ToolKind::external:
      if (s.external.executable.empty()) bad_spec("external tool needs an executable");
      if (s.external.protocol_version != 1) bad_spec("unsupported protocol version");
      break;
  }
}

bool requirements_met(const InputRequirements& req, const DataProfile& p) {
  switch (req.evidence) {
    case EvidenceClass::tabular:
      if (!has_tabular_evidence(p)) return false;
      break;
    case EvidenceClass::image:
      if (image_files(p).empty()) return false;
      break;
    case EvidenceClass::files:
      if (p.files.empty()) return false;
      break;
    default:
      break;
  }
  for (auto kind : req.column_kinds) {
    bool found = std::any_of(p.schema_cues.begin(), p.schema_cues.end(), [&](const SchemaCue& s) {
      return std::any_of(s.columns.begin(), s.columns.end(), [&](const ColumnCue& c) { return c.kind == kind; });
    });
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------- library

ToolLibrary::ToolLibrary(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_)) fail(ErrorCode::PersistenceFailure, "cannot create tool library " + dir_.string());
  fs::path index = dir_ / "index.json";
  if (!fs::exists(index)) return;
  auto doc = json::parse(read_file(index), nullptr, false);
  if (doc.is_discarded() || !doc.contains("tools") || !doc["tools"].is_object()) {
    fail(ErrorCode::PersistenceFailure, "tool library index is damaged: " + index.string());
  }
  for (const auto& [id, latest] : doc["tools"].items()) {
    auto& history = tools_[id];
    for (int v = 1; v <= latest.get<int>(); ++v) {
      fs::path f = version_file(dir_, id, v);
      auto spec_doc = json::parse(read_file(f), nullptr, false);
      if (spec_doc.is_discarded()) fail(ErrorCode::PersistenceFailure, "tool file is damaged: " + f.string());
      history.push_back(tool_from_json(spec_doc));
    }
  }
}

void ToolLibrary::persist(const ToolSpec& spec) {
  if (dir_.empty()) return;
  write_atomic(version_file(dir_, spec.metadata.tool_id, spec.metadata.version), canonical_dump_pretty(tool_to_json(spec)));
  json index = {{"tools", json::object()}};
  for (const auto& [id, history] : tools_) index["tools"][id] = history.back().metadata.version;
  write_atomic(dir_ / "index.json", canonical_dump_pretty(index));
}

std::string ToolLibrary::register_tool(ToolSpec spec) {
  validate_tool(spec);
  std::lock_guard lock(mu_);
  auto& history = tools_[spec.metadata.tool_id];
  spec.metadata.version = history.empty() ? 1 : history.back().metadata.version + 1;
  history.push_back(spec);
  try {
    persist(spec);
  } catch (...) {
    history.pop_back();
    if (history.empty()) tools_.erase(spec.metadata.tool_id);
    throw;
  }
  return spec.metadata.tool_id;
}

std::optional<ToolSpec> ToolLibrary::find(std::string_view tool_id) const {
  std::lock_guard lock(mu_);
  auto it = tools_.find(tool_id);
  if (it == tools_.end()) return std::nullopt;
  return it->second.back();
}

std::vector<ToolSpec> ToolLibrary::versions(std::string_view tool_id) const {
  std::lock_guard lock(mu_);
  auto it = tools_.find(tool_id);
  return it == tools_.end() ? std::vector<ToolSpec>{} : it->second;
}

std::vector<ToolSpec> ToolLibrary::latest() const {
  std::lock_guard lock(mu_);
  std::vector<ToolSpec> out;
  for (const auto& [id, history] : tools_) out.push_back(history.back());
  return out;
}

bool ToolLibrary::contains(std::string_view tool_id) const {
  std::lock_guard lock(mu_);
  return tools_.find(tool_id) != tools_.end();
}

// ---------------------------------------------------------------- memory

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::runtime_failure: return "runtime_failure";
    case Outcome::semantic_failure: return "semantic_failure";
  }
  return "success";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
  for (auto o : {Outcome::success, Outcome::runtime_failure, Outcome::semantic_failure}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

json entry_to_json(const ToolMemoryEntry& e) {
  json j = {{"tool_id", e.tool_id},
            {"tool_version", e.tool_version},
            {"element_id", e.element_id},
            {"profile_digest", e.profile_digest},
            {"modality", std::string(to_string(e.modality))},
            {"outcome", std::string(to_string(e.outcome))},
            {"iterations_used", e.iterations_used},
            {"timestamp", e.timestamp}};
  if (e.failure_signature) j["failure_signature"] = *e.failure_signature;
  return j;
}

ToolMemoryEntry entry_from_json(const json& j) {
  ToolMemoryEntry e;
  e.tool_id = j.at("tool_id").get<std::string>();
  e.tool_version = j.value("tool_version", 0);
  e.element_id = j.at("element_id").get<std::string>();
  e.profile_digest = j.value("profile_digest", std::string());
  e.modality = modality_from_string(j.value("modality", std::string("unknown"))).value_or(Modality::unknown);
  auto o = outcome_from_string(j.at("outcome").get<std::string>());
  if (!o) throw std::invalid_argument("unknown outcome");
  e.outcome = *o;
  e.iterations_used = j.value("iterations_used", 0);
  if (e.iterations_used < 0) throw std::invalid_argument("negative iterations");
  if (j.contains("failure_signature")) e.failure_signature = j["failure_signature"].get<std::string>();
  if (e.outcome == Outcome::success && e.failure_signature) throw std::invalid_argument("success with failure signature");
  e.timestamp = j.value("timestamp", std::string());
  return e;
}

ToolMemory::ToolMemory(fs::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path(), ec);
  if (!fs::exists(path_)) return;
  std::string data = read_file(path_);
  std::size_t complete = data.rfind('\n');
  complete = complete == std::string::npos ? 0 : complete + 1;
  std::size_t pos = 0;
  while (pos < complete) {
    std::size_t nl = data.find('\n', pos);
    std::string_view line(data.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++rejected_;
      continue;
    }
    try {
      entries_.push_back(entry_from_json(j));
    } catch (const std::exception&) {
      ++rejected_;
    }
  }
  if (complete < data.size()) {
    // A record cut off mid-write; drop it so the next append starts clean.
    ++rejected_;
    fs::resize_file(path_, complete, ec);
    if (ec) fail(ErrorCode::PersistenceFailure, "cannot trim partial record in " + path_.string());
  }
}

void ToolMemory::record(const ToolLibrary& library, ToolMemoryEntry entry) {
  if (!library.contains(entry.tool_id)) fail(ErrorCode::UnknownTool, "tool '" + entry.tool_id + "' is not registered");
  if (entry.outcome == Outcome::success) entry.failure_signature.reset();
  if (entry.timestamp.empty()) entry.timestamp = utc_now();
  std::lock_guard lock(mu_);
  if (!path_.empty()) {
    std::string line = canonical_dump(entry_to_json(entry)) + "\n";
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::PersistenceFailure, "cannot open " + path_.string() + ": " + std::strerror(errno));
    try {
      write_fd_fully(fd, line, path_);
    } catch (...) {
      ::close(fd);
      throw;
    }
    if (::fdatasync(fd) != 0) {
      ::close(fd);
      fail(ErrorCode::PersistenceFailure, "fdatasync failed for " + path_.string());
    }
    ::close(fd);
  }
  entries_.push_back(std::move(entry));
}

std::vector<ToolMemoryEntry> ToolMemory::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t ToolMemory::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------- retrieval

std::vector<ToolSpec> find_compatible(const ToolLibrary& library, const ToolMemory& memory, const AtomicElement& element,
                                      const DataProfile& profile, std::string digest) {
  if (digest.empty()) digest = profile_digest(profile);
  const auto entries = memory.entries();
  struct Ranked {
    ToolSpec spec;
    bool demoted;
    double rate;
  };
  std::vector<Ranked> ranked;
  for (auto& spec : library.latest()) {
    const auto& m = spec.metadata;
    bool in_scope = std::find(m.scope.begin(), m.scope.end(), element.id) != m.scope.end() ||
                    std::find(m.scope.begin(), m.scope.end(), element.sub_dimension) != m.scope.end();
    if (!in_scope || !requirements_met(m.input_requirements, profile)) continue;
    bool domain_ok = std::find(m.domain_applicability.begin(), m.domain_applicability.end(), "any") !=
                         m.domain_applicability.end() ||
                     (profile.domain_hint && std::find(m.domain_applicability.begin(), m.domain_applicability.end(),
                                                       *profile.domain_hint) != m.domain_applicability.end());
    if (!domain_ok) continue;

    std::size_t exact_n = 0, exact_ok = 0, mod_n = 0, mod_ok = 0;
    int trailing_semantic = 0;
    for (const auto& e : entries) {
      if (e.tool_id != m.tool_id || e.tool_version != m.version) continue;
      bool ok = e.outcome == Outcome::success;
      if (e.profile_digest == digest) {
        ++exact_n;
        exact_ok += ok;
      } else if (e.modality == profile.modality) {
        ++mod_n;
        mod_ok += ok;
      }
      if (e.element_id == element.id) {
        trailing_semantic = e.outcome == Outcome::semantic_failure ? trailing_semantic + 1 : 0;
      }
    }
    double rate = exact_n ? double(exact_ok) / double(exact_n) : mod_n ? double(mod_ok) / double(mod_n) : 0.0;
    ranked.push_back({std::move(spec), trailing_semantic >= 2, rate});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.demoted != b.demoted) return !a.demoted;
    if (a.rate != b.rate) return a.rate > b.rate;
    if (a.spec.metadata.version != b.spec.metadata.version) return a.spec.metadata.version > b.spec.metadata.version;
    return a.spec.metadata.tool_id < b.spec.metadata.tool_id;
  });
  std::vector<ToolSpec> out;
  for (auto& r : ranked) out.push_back(std::move(r.spec));
  return out;
}

std::size_t seed_builtin_tools(ToolLibrary& library, const Registry& registry) {
  std::size_t added = 0;
  for (const auto& e : registry.elements) {
    const EvaluatorSignature* sig = find_signature(e.evaluator_hint);
    if (!sig) continue;
    std::string id = "builtin." + e.id;
    if (library.contains(id)) continue;
    ToolSpec spec;
    spec.metadata.tool_id = id;
    spec.metadata.scope = {e.id};
    spec.metadata.input_requirements.evidence = sig->required_evidence;
    spec.metadata.method_summary = sig->recipe;
    spec.kind = ToolKind::builtin;
    spec.evaluator_id = sig->evaluator_id;
    library.register_tool(spec);
    ++added;
  }
  return added;
}

}  // namespace aiready
