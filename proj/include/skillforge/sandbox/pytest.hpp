#pragma once

#include <map>
#include <string>
#include <vector>

#include "skillforge/sandbox/session.hpp"

namespace skillforge::sandbox {

// The pytest verifier bundle for one task: declared packages, helper files
// (paths under tests/), and the test module source.
struct VerifierSuite {
  std::vector<std::string> system_packages;
  std::vector<std::string> python_packages;
  std::vector<std::pair<std::string, std::string>> helper_files;
  std::string test_source;  // becomes tests/test_outputs.py
};

enum class TestOutcome { passed, failed, errored };

struct PytestReport {
  std::map<std::string, TestOutcome> outcomes;  // test name -> outcome
  int passed = 0;
  int failed = 0;
  int errored = 0;
  std::string raw_output;
  int collected() const { return passed + failed + errored; }
};

struct CollectionError : SandboxError {
  using SandboxError::SandboxError;
};
struct MissingPackages : SandboxError {
  using SandboxError::SandboxError;
};

// Stages the suite under /tests and executes it against the session's
// current state. Declared python packages are probed first (MissingPackages
// lists the absent ones); a syntax/import failure during collection throws
// CollectionError, which is distinct from tests failing.
PytestReport run_pytest(Session& session, const VerifierSuite& suite);

// Collection only; returns the number of collected tests.
int collect_pytest(Session& session, const VerifierSuite& suite);

}  // namespace skillforge::sandbox
