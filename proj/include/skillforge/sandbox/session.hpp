#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skillforge::sandbox {

enum class DriverKind { local_process, container };
enum class SessionState { fresh, dirty, closed };
enum class ScriptPolicy { fail_fast, run_all };

struct ResourceLimits {
  double command_timeout_s = 120.0;
  double task_budget_s = 1800.0;
};

inline const std::vector<std::string> kStandardDirs = {
    "/app", "/output", "/logs", "/tests", "/solution"};

struct SandboxProfile {
  DriverKind driver = DriverKind::local_process;
  std::string image;  // container driver only
  std::map<std::string, std::string> env;
  ResourceLimits limits;
  int screen_tail_chars = 10000;
};

struct InitialFile {
  std::string path;  // absolute, under /app or /tests
  std::string content;
};

struct ExecResult {
  int exit_code = 0;
  std::string output;
  double duration_s = 0.0;
  std::vector<int> per_line_codes;
};

// ---- errors ----
struct SandboxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DriverUnavailable : SandboxError {
  using SandboxError::SandboxError;
};
struct WriteFailed : SandboxError {
  using SandboxError::SandboxError;
};
struct SessionClosed : SandboxError {
  using SandboxError::SandboxError;
};
struct UnknownSnapshot : SandboxError {
  using SandboxError::SandboxError;
};
struct SandboxTimeout : SandboxError {
  using SandboxError::SandboxError;
};
struct ConfinementViolation : SandboxError {
  using SandboxError::SandboxError;
};

// An isolated execution session: a file tree rooted at the standard dirs, a
// live shell on a pseudo-terminal, named bit-exact snapshots, and script
// execution under fail-fast or run-everything policies. A session is owned
// by one worker at a time; ops on a closed session throw SessionClosed.
class Session {
 public:
  virtual ~Session() = default;

  virtual const std::string& id() const = 0;
  virtual const SandboxProfile& profile() const = 0;
  virtual SessionState state() const = 0;

  virtual void write_file(const std::string& path, std::string_view content) = 0;
  virtual std::string read_file(const std::string& path) = 0;
  virtual bool exists(const std::string& path) = 0;

  // fail_fast stops at the first nonzero exit; run_all executes every line
  // and reports per-line codes plus the worst one.
  virtual ExecResult run_script(const std::vector<std::string>& lines,
                                ScriptPolicy policy) = 0;

  // Decodes tmux-style escapes, writes to the session terminal, waits
  // `duration_s`, returns the current screen capture. Empty keystrokes with
  // a positive duration is the poll idiom.
  virtual std::string send_keys(const std::string& keystrokes,
                                double duration_s) = 0;
  virtual std::string screen() = 0;
  // Exit statuses of shell commands completed since the previous drain
  // (harvested from the prompt sentinel stream).
  virtual std::vector<int> drain_exit_statuses() = 0;

  virtual void snapshot(const std::string& name) = 0;
  virtual void reset(const std::string& name) = 0;
  virtual bool has_snapshot(const std::string& name) const = 0;
  virtual std::string tree_hash() = 0;

  virtual void close() = 0;
};

// Creates a session, writes the initial files byte-exact, takes the
// "initial" snapshot. Initial files are confined to /app and /tests.
std::unique_ptr<Session> create_session(const SandboxProfile& profile,
                                        const std::vector<InitialFile>& files);

bool container_driver_available();

}  // namespace skillforge::sandbox
