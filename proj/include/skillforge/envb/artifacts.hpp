#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillforge/sandbox/pytest.hpp"
#include "skillforge/synth/types.hpp"

namespace skillforge::envb {

using sandbox::VerifierSuite;

enum class ArtifactKind { files, setup, verifier };
enum class GvrStatus { accepted, discarded };

std::string to_string(ArtifactKind kind);
std::string to_string(GvrStatus status);

enum class FindingOwner { llm_direct, specialized, unattributed };

struct VerifyFinding {
  std::optional<std::string> filepath;  // absent for global findings
  std::string reason;
  std::string repair_instructions;  // non-empty on every finding
  FindingOwner primary_owner = FindingOwner::unattributed;
};

struct VerifyReport {
  bool pass = false;
  std::vector<VerifyFinding> findings;
};

struct GvrOutcome {
  ArtifactKind kind = ArtifactKind::files;
  GvrStatus status = GvrStatus::discarded;
  int attempts_used = 0;  // 1..T+1
  std::vector<std::vector<VerifyFinding>> findings_history;
};

struct ToolCallRecord {
  std::string tool_name;
  nlohmann::json arguments;
  std::string observation;
};

struct FileArtifact {
  std::string path;  // equals its FileSpec path exactly
  std::string content;
  synth::GenMode provenance = synth::GenMode::llm_direct;
  std::vector<ToolCallRecord> generator_log;
};

struct SetupScript {
  std::vector<std::string> commands;      // non-empty when setup_steps are
  std::vector<std::string> probe_script;  // diagnostic lines, once probed
};

// Concrete artifacts for one task, ready for Harbor export.
struct SandboxTask {
  synth::TaskSpec task;
  std::vector<FileArtifact> files;
  SetupScript setup;
  VerifierSuite suite;
  GvrOutcome files_outcome;
  GvrOutcome setup_outcome;
  GvrOutcome verifier_outcome;
  int collected_tests = 0;
};

// ---- errors ----
struct EnvBuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PathMismatch : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct TurnBudgetExceeded : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct FetchFailed : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct MalformedFileJSON : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct ProtocolViolation : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct NoBashBlock : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct PreseededOverwrite : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct MalformedSuiteJSON : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};
struct SandboxUnavailable : EnvBuildError {
  using EnvBuildError::EnvBuildError;
};

}  // namespace skillforge::envb
