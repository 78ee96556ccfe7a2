#include <sys/stat.h>
#include <unistd.h>

#include <chrono>
#include <regex>
#include <thread>

#include <fmt/format.h>

#include "skillforge/sandbox/keystrokes.hpp"
#include "skillforge/sandbox/pty.hpp"
#include "skillforge/sandbox/session.hpp"
#include "skillforge/util/fs.hpp"
#include "skillforge/util/subprocess.hpp"
#include "skillforge/util/tree_hash.hpp"

namespace fs = std::filesystem;

namespace skillforge::sandbox {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-';
}

// Replaces standard-dir prefixes only at word boundaries, so "/app/x" maps
// but "/application" does not.
std::string replace_prefix(const std::string& text, const std::string& from,
                           const std::string& to) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t hit = text.find(from, pos);
    if (hit == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    size_t end = hit + from.size();
    if (end < text.size() && is_word_char(text[end])) {
      out.append(text, pos, end - pos);
      pos = end;
      continue;
    }
    out.append(text, pos, hit - pos);
    out.append(to);
    pos = end;
  }
  return out;
}

std::string validate_logical(const std::string& path) {
  if (path.empty() || path[0] != '/')
    throw ConfinementViolation("sandbox paths must be absolute: " + path);
  if (path.find("..") != std::string::npos)
    throw ConfinementViolation("sandbox paths must not contain '..': " + path);
  for (const auto& dir : kStandardDirs) {
    if (path == dir) return dir;
    if (path.rfind(dir + "/", 0) == 0) return dir;
  }
  throw ConfinementViolation("path outside the sandbox roots: " + path);
}

class LocalSession final : public Session {
 public:
  LocalSession(const SandboxProfile& profile,
               const std::vector<InitialFile>& files)
      : profile_(profile),
        base_(util::make_temp_dir("skf-sbx")),
        root_(base_ / "root") {
    id_ = base_.filename().string();
    for (const auto& dir : kStandardDirs) {
      fs::path p = root_ / dir.substr(1);
      fs::create_directories(p);
      fs::permissions(p, fs::perms::all);
    }
    for (const auto& f : files) {
      std::string dir = validate_logical(f.path);
      if (dir != "/app" && dir != "/tests")
        throw ConfinementViolation("initial files are confined to /app and /tests: " +
                                   f.path);
      write_file(f.path, f.content);
    }
    spawn_shell();
    snapshot("initial");
    state_ = SessionState::fresh;
  }

  ~LocalSession() override {
    pty_.reset();
    std::error_code ec;
    fs::remove_all(base_, ec);
  }

  const std::string& id() const override { return id_; }
  const SandboxProfile& profile() const override { return profile_; }
  SessionState state() const override { return state_; }

  void write_file(const std::string& path, std::string_view content) override {
    ensure_open();
    try {
      // /tests and /logs hold executable content (verifier suites, tool
      // scripts); their embedded sandbox paths must resolve inside this
      // session. Workspace data under /app stays byte-exact.
      std::string dir = validate_logical(path);
      if (dir == "/tests" || dir == "/logs")
        util::write_file(translate(path), to_physical(std::string(content)));
      else
        util::write_file(translate(path), content);
    } catch (const ConfinementViolation&) {
      throw;
    } catch (const std::exception& e) {
      throw WriteFailed(e.what());
    }
  }

  std::string read_file(const std::string& path) override {
    ensure_open();
    std::string dir = validate_logical(path);
    std::string content = util::read_file(translate(path));
    if (dir == "/tests" || dir == "/logs") return to_logical(content);
    return content;
  }

  bool exists(const std::string& path) override {
    ensure_open();
    return fs::exists(translate(path));
  }

  ExecResult run_script(const std::vector<std::string>& lines,
                        ScriptPolicy policy) override {
    ensure_open();
    ensure_budget();
    state_ = SessionState::dirty;

    std::string script = "set -o pipefail\n";
    for (size_t i = 0; i < lines.size(); ++i) {
      script += to_physical(lines[i]) + "\n";
      script += fmt::format("__skf_rc=$?; printf '\\035RC:{}:%d\\035\\n' \"$__skf_rc\"", i);
      if (policy == ScriptPolicy::fail_fast)
        script += "; [ \"$__skf_rc\" -ne 0 ] && exit \"$__skf_rc\"";
      script += "\n";
    }
    script += "exit 0\n";

    util::RunOptions opts;
    opts.cwd = (root_ / "app").string();
    opts.env = script_env();
    opts.timeout_s =
        profile_.limits.command_timeout_s * std::max<size_t>(1, lines.size());
    auto run = util::run_process({"/bin/bash", "-c", script}, opts);
    consumed_s_ += run.duration_s;
    if (run.timed_out)
      throw SandboxTimeout(fmt::format("script exceeded {:.0f}s", opts.timeout_s));

    // Split captured output on the per-line markers.
    ExecResult result;
    result.duration_s = run.duration_s;
    static const std::regex marker_re("\x1dRC:([0-9]+):(-?[0-9]+)\x1d\n?");
    std::vector<std::string> segments;
    std::string rest = run.output;
    std::smatch m;
    while (std::regex_search(rest, m, marker_re)) {
      segments.push_back(m.prefix().str());
      result.per_line_codes.push_back(std::stoi(m[2].str()));
      rest = m.suffix().str();
    }
    for (size_t i = 0; i < result.per_line_codes.size(); ++i) {
      result.output += "+ " + lines[i] + "\n";
      result.output += to_logical(segments[i]);
    }
    result.output += to_logical(rest);

    if (policy == ScriptPolicy::fail_fast) {
      result.exit_code = 0;
      for (int code : result.per_line_codes)
        if (code != 0) {
          result.exit_code = code;
          break;
        }
    } else {
      for (int code : result.per_line_codes)
        result.exit_code = std::max(result.exit_code, code);
    }
    return result;
  }

  std::string send_keys(const std::string& keystrokes,
                        double duration_s) override {
    ensure_open();
    ensure_budget();
    consumed_s_ += duration_s;
    if (!keystrokes.empty()) {
      state_ = SessionState::dirty;
      pty_->write_input(decode_keystrokes(to_physical(keystrokes)));
    }
    if (duration_s > 0)
      std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
    return screen();
  }

  std::string screen() override {
    ensure_open();
    return to_logical(pty_->tail());
  }

  std::vector<int> drain_exit_statuses() override {
    ensure_open();
    return pty_->drain_statuses();
  }

  void snapshot(const std::string& name) override {
    ensure_open();
    fs::path dst = base_ / "snapshots" / name;
    fs::remove_all(dst);
    util::copy_tree(root_, dst);
  }

  void reset(const std::string& name) override {
    ensure_open();
    fs::path src = base_ / "snapshots" / name;
    if (!fs::exists(src)) throw UnknownSnapshot("no snapshot named " + name);
    pty_.reset();  // terminates the shell and anything on its terminal
    fs::remove_all(root_);
    util::copy_tree(src, root_);
    spawn_shell();
    state_ = SessionState::fresh;
  }

  bool has_snapshot(const std::string& name) const override {
    return fs::exists(base_ / "snapshots" / name);
  }

  std::string tree_hash() override {
    ensure_open();
    return util::hash_tree(root_);
  }

  void close() override {
    if (state_ == SessionState::closed) return;
    pty_.reset();
    state_ = SessionState::closed;
  }

 private:
  void ensure_open() const {
    if (state_ == SessionState::closed)
      throw SessionClosed("session " + id_ + " is closed");
  }

  void ensure_budget() const {
    if (consumed_s_ > profile_.limits.task_budget_s)
      throw SandboxTimeout(
          fmt::format("session exceeded its {:.0f}s task budget",
                      profile_.limits.task_budget_s));
  }

  fs::path translate(const std::string& path) const {
    validate_logical(path);
    return root_ / path.substr(1);
  }

  std::string to_physical(const std::string& text) const {
    std::string out = text;
    for (const auto& dir : kStandardDirs)
      out = replace_prefix(out, dir, root_.string() + dir);
    return out;
  }

  std::string to_logical(const std::string& text) const {
    std::string out = text;
    size_t pos;
    while ((pos = out.find(root_.string())) != std::string::npos)
      out.erase(pos, root_.string().size());
    return out;
  }

  std::map<std::string, std::string> shell_env() const {
    std::map<std::string, std::string> env;
    const char* path = ::getenv("PATH");
    env["PATH"] = path ? path : "/usr/local/bin:/usr/bin:/bin";
    env["HOME"] = root_.string();
    env["LANG"] = "C";
    env["TERM"] = "dumb";
    for (const auto& [k, v] : profile_.env) env[k] = to_physical(v);
    return env;
  }

  std::map<std::string, std::string> script_env() const { return shell_env(); }

  void spawn_shell() {
    auto env = shell_env();
    env["PS1"] = "$ ";
    // The prompt sentinel embeds the last exit status into the stream; the
    // pty reader strips it from captures and queues the statuses.
    env["PROMPT_COMMAND"] = "printf '\\035%d\\035\\n' $?";
    pty_ = std::make_unique<PtyProcess>(
        std::vector<std::string>{"/bin/bash", "--norc", "--noprofile", "-i"},
        env, (root_ / "app").string(), profile_.screen_tail_chars);
  }

  SandboxProfile profile_;
  fs::path base_;
  fs::path root_;
  std::string id_;
  SessionState state_ = SessionState::fresh;
  double consumed_s_ = 0.0;  // against limits.task_budget_s
  std::unique_ptr<PtyProcess> pty_;
};

}  // namespace

std::unique_ptr<Session> make_local_session(
    const SandboxProfile& profile, const std::vector<InitialFile>& files) {
  return std::make_unique<LocalSession>(profile, files);
}

}  // namespace skillforge::sandbox
