#pragma once

#include "skillforge/envb/gvr.hpp"
#include "skillforge/envb/tooling.hpp"
#include "skillforge/gateway/gateway.hpp"

namespace skillforge::envb {

struct EnvBuildConfig {
  std::string backend_id;
  int gvr_budget = 3;          // T, per artifact
  int local_tool_turns = 8;
  int remote_fetch_turns = 10;
  int verify_turns = 12;
};

// ---- initial files (F) ----

class FileStage {
 public:
  FileStage(gateway::LlmGateway& gateway, ToolRegistry tools,
            EnvBuildConfig config);

  // Routes the spec to its generation agent (llm_direct single completion,
  // local_tool python loop, remote_fetch search/fetch/download loop), writes
  // the artifact into the session and returns it. `repair_notes` carries
  // verifier findings back into the generation prompt on repair runs.
  FileArtifact generate_file(const synth::FileSpec& spec,
                             const synth::TaskSpec& task,
                             const std::vector<FileArtifact>& prior,
                             sandbox::Session& session,
                             const std::string& repair_notes = "");

  // Multi-turn verification protocol: the model inspects the written files
  // with read-only commands (the tree is snapshotted and restored), then
  // finalizes {overall_verdict, file_findings, global_findings}. Verdict /
  // findings inconsistencies get one re-ask, then ProtocolViolation. Hitting
  // the turn budget counts as a failed verdict with an unattributed finding.
  VerifyReport verify_files(const std::vector<FileArtifact>& files,
                            const synth::TaskSpec& task,
                            sandbox::Session& session);

  GvrOutcome run(const synth::TaskSpec& task, sandbox::Session& session,
                 std::vector<FileArtifact>& out);

 private:
  FileArtifact generate_llm_direct(const synth::FileSpec& spec,
                                   const synth::TaskSpec& task,
                                   const std::vector<FileArtifact>& prior,
                                   sandbox::Session& session,
                                   const std::string& repair_notes);
  FileArtifact generate_with_tools(const synth::FileSpec& spec,
                                   const synth::TaskSpec& task,
                                   sandbox::Session& session,
                                   const std::string& repair_notes);

  gateway::LlmGateway& gateway_;
  ToolRegistry tools_;  // shared-ptr map; held by value so callers may pass
                        // temporaries
  EnvBuildConfig config_;
};

// ---- setup script (B_env) ----

class SetupStage {
 public:
  SetupStage(gateway::LlmGateway& gateway, EnvBuildConfig config);

  // Extracts the final fenced bash block as the command list and statically
  // rejects any command whose write target is a pre-seeded path.
  SetupScript build_setup_script(const synth::TaskSpec& task,
                                 const std::vector<FileArtifact>& preseeded);

  // Runs model-generated probes without fail-fast (every line executes);
  // any nonzero line fails the verdict and becomes a repair finding.
  VerifyReport probe_setup(SetupScript& script, const synth::TaskSpec& task,
                           const std::vector<FileArtifact>& preseeded,
                           sandbox::Session& session);

  // GVR over: reset to post_files, execute fail-fast, probe. Repair
  // regenerates the FULL command list and re-runs it in a fresh sandbox.
  GvrOutcome run(const synth::TaskSpec& task,
                 const std::vector<FileArtifact>& preseeded,
                 sandbox::Session& session, SetupScript& out);

 private:
  SetupScript parse_setup_response(const std::string& text,
                                   const std::vector<FileArtifact>& preseeded);

  gateway::LlmGateway& gateway_;
  EnvBuildConfig config_;
};

// Conservative lexical scan for write targets (redirections, cp/mv,
// curl -o, wget -O, tee, dd of=). Returns the first pre-seeded path hit.
std::optional<std::string> find_preseeded_write(
    const std::string& command, const std::vector<std::string>& preseeded);

// Splits a fenced bash block into executable entries: strips shebang, bare
// `set -...` lines, blanks and comments; keeps heredocs and
// backslash-continuations as single entries.
std::vector<std::string> split_command_entries(const std::string& block);

// ---- pytest verifier (T_test) ----

struct GateResult {
  bool executable = false;
  bool all_fail_initially = false;
  int collected = 0;
  std::vector<VerifyFinding> findings;
  bool pass() const { return executable && all_fail_initially; }
};

class VerifierStage {
 public:
  VerifierStage(gateway::LlmGateway& gateway, EnvBuildConfig config);

  // Strict JSON with exactly {system_packages, python_packages,
  // helper_files, test_outputs_py}; helper paths normalized under tests/.
  // One re-ask on malformed JSON, then MalformedSuiteJSON.
  VerifierSuite generate_verifier_suite(const synth::TaskSpec& task,
                                        const std::vector<FileArtifact>& files,
                                        const SetupScript& setup,
                                        const std::string& repair_notes = "");

  // Resets to the post-setup, pre-solution snapshot and checks
  // executability (collects, >= 1 test) plus reliability (every test fails
  // on the initial state).
  GateResult gate_verifier_suite(const VerifierSuite& suite,
                                 sandbox::Session& session);

  GvrOutcome run(const synth::TaskSpec& task,
                 const std::vector<FileArtifact>& files,
                 const SetupScript& setup, sandbox::Session& session,
                 VerifierSuite& out, int& collected_tests);

 private:
  gateway::LlmGateway& gateway_;
  EnvBuildConfig config_;
};

// ---- facade ----

struct BuildResult {
  std::optional<SandboxTask> task;
  std::string drop_reason;  // set when task is nullopt
};

// Runs the three GVR stages in order (forward-only: a later stage failure
// does not restart an earlier one). Snapshots: "initial" at creation,
// "post_files" after file acceptance, "post_setup" after setup acceptance.
BuildResult build_sandbox_task(const synth::TaskSpec& task,
                               sandbox::Session& session,
                               gateway::LlmGateway& gateway,
                               const ToolRegistry& tools,
                               const EnvBuildConfig& config);

}  // namespace skillforge::envb
