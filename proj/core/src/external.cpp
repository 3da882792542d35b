#include "aiready/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "aiready/check_program.hpp"
#include "aiready/error.hpp"

namespace aiready {

namespace {

bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() >= suf.size() && s.substr(s.size() - suf.size()) == suf;
}

bool count_name(std::string_view n) {
  return n == "n" || n == "k" || ends_with(n, "_count") || ends_with(n, "_cells") || ends_with(n, "_rows") ||
         ends_with(n, "_files") || ends_with(n, "_counts");
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input, double timeout_secs,
                          std::size_t max_output) {
  if (argv.empty()) fail(ErrorCode::ProtocolViolation, "empty command");
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) fail(ErrorCode::ProtocolViolation, "pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail(ErrorCode::ProtocolViolation, "pipe failed");
  }
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    fail(ErrorCode::ProtocolViolation, "pipe failed");
  }
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    fail(ErrorCode::ProtocolViolation, "fork failed");
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(err_pipe[1], 2);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  int to_child = in_pipe[1];
  ::fcntl(to_child, F_SETFL, O_NONBLOCK);
  signal(SIGPIPE, SIG_IGN);

  ProcessResult r;
  std::size_t written = 0;
  if (input.empty()) {
    ::close(to_child);
    to_child = -1;
  }
  bool out_open = true, err_open = true;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_secs);
  char buf[65536];
  while (out_open || err_open) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) {
      r.timed_out = true;
      break;
    }
    pollfd fds[3];
    int n = 0;
    int idx_in = -1, idx_out = -1, idx_err = -1;
    if (to_child >= 0) {
      fds[n] = {to_child, POLLOUT, 0};
      idx_in = n++;
    }
    if (out_open) {
      fds[n] = {out_pipe[0], POLLIN, 0};
      idx_out = n++;
    }
    if (err_open) {
      fds[n] = {err_pipe[0], POLLIN, 0};
      idx_err = n++;
    }
    int rc = ::poll(fds, n, static_cast<int>(std::min<long long>(left, 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    if (idx_in >= 0 && fds[idx_in].revents) {
      ssize_t w = ::write(to_child, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();  // child closed stdin
      if (written >= input.size()) {
        ::close(to_child);
        to_child = -1;
      }
    }
    auto drain = [&](int idx, int fd, std::string& sink, bool& open) {
      if (idx < 0 || !fds[idx].revents) return;
      ssize_t got = ::read(fd, buf, sizeof buf);
      if (got > 0) {
        sink.append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || (errno != EINTR && errno != EAGAIN)) {
        open = false;
      }
    };
    drain(idx_out, out_pipe[0], r.out, out_open);
    drain(idx_err, err_pipe[0], r.err, err_open);
    if (r.out.size() + r.err.size() > max_output) break;
  }
  if (to_child >= 0) ::close(to_child);
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);
  int status = 0;
  if (r.timed_out || out_open || err_open) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    r.exit_code = -1;
    return r;
  }
  // Output closed; give the child the rest of the window to exit.
  for (;;) {
    pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      r.timed_out = true;
      return r;
    }
    ::usleep(1000);
  }
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void validate_response(const json& r) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ProtocolViolation, "external response: " + what); };
  if (!r.is_object()) bad("not a JSON object");
  if (r.contains("dsl_program")) {
    if (r.contains("score")) bad("both score and dsl_program present");
    return;
  }
  if (!r.contains("score") || !r["score"].is_number()) bad("missing numeric score");
  if (r.contains("interpretables") && !r["interpretables"].is_object()) bad("interpretables must be an object");
  if (r.contains("rationale") && !r["rationale"].is_string()) bad("rationale must be text");
}

json call_external(const ExternalDescriptor& exe, const json& request, double timeout_secs) {
  std::vector<std::string> argv{exe.executable};
  argv.insert(argv.end(), exe.args.begin(), exe.args.end());
  ProcessResult pr = run_process(argv, canonical_dump(request) + "\n", timeout_secs);
  if (pr.timed_out) {
    fail(ErrorCode::ExternalTimeout, "external tool '" + exe.executable + "' exceeded " +
                                         std::to_string(static_cast<int>(timeout_secs)) + " s");
  }
  if (pr.exit_code != 0) {
    fail(ErrorCode::ProtocolViolation, "external tool '" + exe.executable + "' exited with status " +
                                           std::to_string(pr.exit_code));
  }
  auto resp = json::parse(pr.out, nullptr, false);
  if (resp.is_discarded()) fail(ErrorCode::ProtocolViolation, "external response is not JSON");
  validate_response(resp);
  return resp;
}

json generic_program(const std::vector<std::string>& interpretables) {
  json steps = json::array();
  steps.push_back({{"id", "files"}, {"op", "select"}, {"file_set", "all"}});
  steps.push_back({{"id", "readable"}, {"op", "reduce"}, {"input", "files"}, {"fn", "fraction_matching"},
                   {"predicate", "file_readable"}});
  steps.push_back({{"id", "file_count"}, {"op", "reduce"}, {"input", "files"}, {"fn", "count"}});
  json outs = json::object();
  for (const auto& name : interpretables) outs[name] = count_name(name) ? "file_count" : "readable";
  steps.push_back({{"op", "emit"}, {"score", "readable"}, {"interpretables", outs}});
  return {{"steps", steps}};
}

json ScriptedGenerator::generate(const json& request) {
  ++calls_;
  if (script_.empty()) fail(ErrorCode::ProtocolViolation, "scripted generator has no script");
  std::size_t idx = request.contains("failure_context") ? request["failure_context"].size() : 0;
  const json& entry = script_[std::min(idx, script_.size() - 1)];
  std::vector<std::string> wanted;
  if (request.contains("plan")) {
    wanted = request["plan"].at("scoring").value("interpretables", std::vector<std::string>{});
  }
  std::string emit = entry.is_object() ? entry.value("emit", std::string()) : std::string();
  if (emit == "valid") return {{"dsl_program", generic_program(wanted)}};
  if (emit == "out_of_range") {
    json outs = json::object();
    for (const auto& n : wanted) outs[n] = count_name(n) ? 1 : 0.5;
    return {{"score", 1.3}, {"interpretables", outs}, {"rationale", "scripted"}};
  }
  if (emit == "missing_field") return {{"score", 0.5}, {"interpretables", json::object()}, {"rationale", "scripted"}};
  if (emit == "crash") {
    json steps = json::array();
    steps.push_back({{"op", "emit"}, {"score", {{"div", {1, 0}}}}});
    return {{"dsl_program", {{"steps", steps}}}};
  }
  return entry;
}

std::unique_ptr<ScriptedGenerator> inject_faults(const FaultPlan& plan) {
  std::vector<json> script;
  switch (plan.pattern) {
    case FaultPlan::Pattern::fail_then_succeed:
      for (const auto& f : plan.failures) script.push_back({{"emit", f}});
      script.push_back({{"emit", "valid"}});
      break;
    case FaultPlan::Pattern::always_out_of_range:
      script.push_back({{"emit", "out_of_range"}});
      break;
    case FaultPlan::Pattern::always_crash:
      script.push_back({{"emit", "crash"}});
      break;
  }
  return std::make_unique<ScriptedGenerator>(std::move(script));
}

std::unique_ptr<Generator> generator_from_env(double timeout_secs) {
  const char* exe = std::getenv("AIREADY_GENERATOR");
  if (!exe || !*exe) return nullptr;
  return std::make_unique<ProcessGenerator>(ExternalDescriptor{exe, {}, 1}, timeout_secs);
}

}  // namespace aiready
