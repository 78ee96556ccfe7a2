#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skillforge/envb/stages.hpp"

namespace skillforge::pipeline {

// Writes the Harbor-style task directory:
//   instruction.md
//   environment/  (initial files re-rooted from /app, plus setup.sh)
//   tests/test_outputs.py (+ helper files)
//   task.json     (criteria, guideline, provenance, GVR attempt counts)
// Atomic (built in a temp dir, then renamed) and idempotent: re-exporting
// produces an identical tree. `skill_kind` tags the manifest for stats.
std::filesystem::path export_task_dir(const envb::SandboxTask& task,
                                      const std::filesystem::path& parent,
                                      const std::string& skill_kind);

// Rebuilds a SandboxTask from an exported directory (enough for rollout and
// verification: initial files, setup commands, verifier suite, metadata).
envb::SandboxTask load_task_dir(const std::filesystem::path& dir);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

// Layout completeness, non-empty instruction, setup.sh parseable (bash -n),
// verifier collectible in a throwaway session, and the must-fail-initially
// property. Findings go in the report; nothing throws.
ValidationReport validate_task_dir(const std::filesystem::path& dir,
                                   const sandbox::SandboxProfile& profile);

}  // namespace skillforge::pipeline
