#include <chrono>
#include <regex>
#include <thread>

#include <fmt/format.h>

#include "skillforge/sandbox/keystrokes.hpp"
#include "skillforge/sandbox/pty.hpp"
#include "skillforge/sandbox/session.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/subprocess.hpp"
#include "skillforge/util/text.hpp"
#include "skillforge/util/tree_hash.hpp"

#include <unistd.h>
#include <cstdlib>

namespace skillforge::sandbox {

namespace {

std::string docker_binary() {
  for (const char* candidate :
       {"/usr/bin/docker", "/usr/local/bin/docker", "/bin/docker"})
    if (::access(candidate, X_OK) == 0) return candidate;
  return "docker";
}

util::RunResult docker(const std::vector<std::string>& args, double timeout_s,
                       const std::string& stdin_data = "") {
  std::vector<std::string> argv = {docker_binary()};
  argv.insert(argv.end(), args.begin(), args.end());
  util::RunOptions opts;
  opts.timeout_s = timeout_s;
  opts.stdin_data = stdin_data;
  return util::run_process(argv, opts);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string validate_logical_path(const std::string& path) {
  if (path.empty() || path[0] != '/')
    throw ConfinementViolation("sandbox paths must be absolute: " + path);
  if (path.find("..") != std::string::npos)
    throw ConfinementViolation("sandbox paths must not contain '..': " + path);
  for (const auto& dir : kStandardDirs)
    if (path == dir || path.rfind(dir + "/", 0) == 0) return dir;
  throw ConfinementViolation("path outside the sandbox roots: " + path);
}

// Docker-backed session: files live in a long-running container, snapshots
// are image commits, the terminal is `docker exec -it bash` under our pty.
class ContainerSession final : public Session {
 public:
  ContainerSession(const SandboxProfile& profile,
                   const std::vector<InitialFile>& files)
      : profile_(profile) {
    if (!container_driver_available())
      throw DriverUnavailable("docker is not available");
    std::string image = profile.image.empty() ? "debian:13" : profile.image;
    start_container(image);
    id_ = "ctr-" + container_.substr(0, 12);
    auto mkdirs = docker({"exec", container_, "bash", "-c",
                          "mkdir -p /app /output /logs /tests /solution && "
                          "chmod 777 /app /output /logs /tests /solution"},
                         60);
    if (mkdirs.exit_code != 0)
      throw DriverUnavailable("cannot prepare container dirs: " + mkdirs.output);
    for (const auto& f : files) {
      std::string dir = validate_logical_path(f.path);
      if (dir != "/app" && dir != "/tests")
        throw ConfinementViolation(
            "initial files are confined to /app and /tests: " + f.path);
      write_file(f.path, f.content);
    }
    spawn_shell();
    snapshot("initial");
    state_ = SessionState::fresh;
  }

  ~ContainerSession() override {
    try {
      close();
    } catch (...) {
    }
    for (const auto& [_, image] : snapshots_) docker({"rmi", "-f", image}, 60);
  }

  const std::string& id() const override { return id_; }
  const SandboxProfile& profile() const override { return profile_; }
  SessionState state() const override { return state_; }

  void write_file(const std::string& path, std::string_view content) override {
    ensure_open();
    validate_logical_path(path);
    std::string parent = path.substr(0, path.find_last_of('/'));
    auto r = docker({"exec", "-i", container_, "bash", "-c",
                     "mkdir -p " + shell_quote(parent) + " && cat > " +
                         shell_quote(path)},
                    profile_.limits.command_timeout_s, std::string(content));
    if (r.exit_code != 0) throw WriteFailed("container write failed: " + path);
  }

  std::string read_file(const std::string& path) override {
    ensure_open();
    validate_logical_path(path);
    auto r = docker({"exec", container_, "cat", path},
                    profile_.limits.command_timeout_s);
    if (r.exit_code != 0) throw SandboxError("cannot read " + path);
    return r.output;
  }

  bool exists(const std::string& path) override {
    ensure_open();
    validate_logical_path(path);
    return docker({"exec", container_, "test", "-e", path},
                  profile_.limits.command_timeout_s)
               .exit_code == 0;
  }

  ExecResult run_script(const std::vector<std::string>& lines,
                        ScriptPolicy policy) override {
    ensure_open();
    state_ = SessionState::dirty;
    std::string script = "cd /app\nset -o pipefail\n";
    for (size_t i = 0; i < lines.size(); ++i) {
      script += lines[i] + "\n";
      script += fmt::format(
          "__skf_rc=$?; printf '\\035RC:{}:%d\\035\\n' \"$__skf_rc\"", i);
      if (policy == ScriptPolicy::fail_fast)
        script += "; [ \"$__skf_rc\" -ne 0 ] && exit \"$__skf_rc\"";
      script += "\n";
    }
    script += "exit 0\n";

    double timeout =
        profile_.limits.command_timeout_s * std::max<size_t>(1, lines.size());
    auto run = docker({"exec", container_, "bash", "-c", script}, timeout);
    if (run.timed_out)
      throw SandboxTimeout(fmt::format("script exceeded {:.0f}s", timeout));

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
      result.output += "+ " + lines[i] + "\n" + segments[i];
    }
    result.output += rest;
    if (policy == ScriptPolicy::fail_fast) {
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
    if (!keystrokes.empty()) {
      state_ = SessionState::dirty;
      pty_->write_input(decode_keystrokes(keystrokes));
    }
    if (duration_s > 0)
      std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
    return screen();
  }

  std::string screen() override {
    ensure_open();
    return pty_->tail();
  }

  std::vector<int> drain_exit_statuses() override {
    ensure_open();
    return pty_->drain_statuses();
  }

  void snapshot(const std::string& name) override {
    ensure_open();
    std::string image = fmt::format("skillforge-snap:{}-{}", id_, name);
    auto r = docker({"commit", container_, image}, 300);
    if (r.exit_code != 0) throw SandboxError("docker commit failed: " + r.output);
    snapshots_[name] = image;
  }

  void reset(const std::string& name) override {
    ensure_open();
    auto it = snapshots_.find(name);
    if (it == snapshots_.end()) throw UnknownSnapshot("no snapshot named " + name);
    pty_.reset();
    docker({"rm", "-f", container_}, 120);
    start_container(it->second);
    spawn_shell();
    state_ = SessionState::fresh;
  }

  bool has_snapshot(const std::string& name) const override {
    return snapshots_.count(name) > 0;
  }

  std::string tree_hash() override {
    ensure_open();
    // Canonical in-container walk: sorted paths with mode and content hash.
    auto r = docker(
        {"exec", container_, "bash", "-c",
         "cd / && find app output logs tests solution -mindepth 1 "
         "\\( -type f -printf '%p %m file\\n' -o -type d -printf '%p %m dir\\n' \\) "
         "| sort && find app output logs tests solution -type f | sort | "
         "xargs -r sha256sum"},
        300);
    if (r.exit_code != 0) throw SandboxError("tree walk failed: " + r.output);
    return util::sha256_hex(r.output);
  }

  void close() override {
    if (state_ == SessionState::closed) return;
    pty_.reset();
    docker({"rm", "-f", container_}, 120);
    state_ = SessionState::closed;
  }

 private:
  void ensure_open() const {
    if (state_ == SessionState::closed)
      throw SessionClosed("session " + id_ + " is closed");
  }

  void start_container(const std::string& image) {
    std::vector<std::string> args = {"run", "-d", "--network", "none"};
    for (const auto& [k, v] : profile_.env) {
      args.push_back("-e");
      args.push_back(k + "=" + v);
    }
    args.insert(args.end(), {image, "sleep", "infinity"});
    auto r = docker(args, 300);
    if (r.exit_code != 0)
      throw DriverUnavailable("docker run failed: " + r.output);
    container_ = util::trim(r.output);
  }

  void spawn_shell() {
    std::map<std::string, std::string> env;  // host env for the docker client
    const char* path = ::getenv("PATH");
    env["PATH"] = path ? path : "/usr/bin:/bin";
    const char* home = ::getenv("HOME");
    if (home) env["HOME"] = home;
    pty_ = std::make_unique<PtyProcess>(
        std::vector<std::string>{
            docker_binary(), "exec", "-it", "-e", "PS1=$ ",
            "-e", "PROMPT_COMMAND=printf '\\035%d\\035\\n' $?",
            "-e", "TERM=dumb", "-w", "/app", container_, "bash", "--norc",
            "--noprofile", "-i"},
        env, "/", profile_.screen_tail_chars);
  }

  SandboxProfile profile_;
  std::string id_;
  std::string container_;
  std::map<std::string, std::string> snapshots_;  // name -> image tag
  SessionState state_ = SessionState::fresh;
  std::unique_ptr<PtyProcess> pty_;
};

}  // namespace

bool container_driver_available() {
  static int cached = -1;
  if (cached < 0) {
    auto r = docker({"info"}, 20);
    cached = (r.exit_code == 0) ? 1 : 0;
    if (!cached) log::info("container driver unavailable (docker info failed)");
  }
  return cached == 1;
}

std::unique_ptr<Session> make_local_session(const SandboxProfile&,
                                            const std::vector<InitialFile>&);

std::unique_ptr<Session> create_session(const SandboxProfile& profile,
                                        const std::vector<InitialFile>& files) {
  if (profile.driver == DriverKind::container)
    return std::make_unique<ContainerSession>(profile, files);
  return make_local_session(profile, files);
}

}  // namespace skillforge::sandbox
