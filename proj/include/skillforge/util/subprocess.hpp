#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skillforge::util {

struct RunOptions {
  std::string cwd;
  std::optional<std::map<std::string, std::string>> env;  // nullopt: inherit
  double timeout_s = 120.0;
  std::string stdin_data;
};

struct RunResult {
  int exit_code = 0;       // 128+signal when signalled
  bool timed_out = false;  // process group was killed at the deadline
  std::string output;      // stdout + stderr interleaved
  double duration_s = 0.0;
};

// Runs argv[0] with the given arguments (no shell). The child gets its own
// process group so a timeout kill reaps descendants too.
RunResult run_process(const std::vector<std::string>& argv,
                      const RunOptions& opts = {});

// Convenience: /bin/bash -o pipefail -c command.
RunResult run_shell(const std::string& command, const RunOptions& opts = {});

}  // namespace skillforge::util
