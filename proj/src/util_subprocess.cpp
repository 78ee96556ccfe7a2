#include "skillforge/util/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

extern char** environ;

namespace skillforge::util {

RunResult run_process(const std::vector<std::string>& argv,
                      const RunOptions& opts) {
  if (argv.empty()) throw std::invalid_argument("run_process: empty argv");

  int out_pipe[2];
  int in_pipe[2];
  if (::pipe(out_pipe) != 0 || ::pipe(in_pipe) != 0)
    throw std::runtime_error("pipe failed");

  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("fork failed");

  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(out_pipe[1], 2);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    if (!opts.cwd.empty() && ::chdir(opts.cwd.c_str()) != 0) ::_exit(127);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    if (opts.env) {
      std::vector<std::string> env_strings;
      for (const auto& [k, v] : *opts.env) env_strings.push_back(k + "=" + v);
      std::vector<char*> envp;
      for (auto& s : env_strings) envp.push_back(s.data());
      envp.push_back(nullptr);
      ::execve(argv[0].c_str(), args.data(), envp.data());
    } else {
      ::execve(argv[0].c_str(), args.data(), environ);
    }
    ::_exit(127);
  }

  ::setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(in_pipe[0]);

  if (!opts.stdin_data.empty()) {
    size_t off = 0;
    while (off < opts.stdin_data.size()) {
      ssize_t n = ::write(in_pipe[1], opts.stdin_data.data() + off,
                          opts.stdin_data.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
  }
  ::close(in_pipe[1]);

  RunResult result;
  auto deadline = start + std::chrono::duration_cast<
                              std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(opts.timeout_s));
  char buf[4096];
  bool open = true;
  while (open) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    struct pollfd pfd {out_pipe[0], POLLIN, 0};
    int rc = ::poll(&pfd, 1, std::min(wait_ms, 200));
    if (rc < 0 && errno != EINTR) break;
    if (rc > 0 && (pfd.revents & (POLLIN | POLLHUP))) {
      ssize_t n = ::read(out_pipe[0], buf, sizeof(buf));
      if (n > 0)
        result.output.append(buf, static_cast<size_t>(n));
      else
        open = false;
    }
  }
  // Drain whatever is left after a timeout kill.
  while (true) {
    ssize_t n = ::read(out_pipe[0], buf, sizeof(buf));
    if (n <= 0) break;
    result.output.append(buf, static_cast<size_t>(n));
  }
  ::close(out_pipe[0]);

  int status = 0;
  ::waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  result.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

RunResult run_shell(const std::string& command, const RunOptions& opts) {
  return run_process({"/bin/bash", "-o", "pipefail", "-c", command}, opts);
}

}  // namespace skillforge::util
