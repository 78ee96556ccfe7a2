#include <fmt/format.h>

#include "skillforge/envb/stages.hpp"
#include "skillforge/util/log.hpp"

namespace skillforge::envb {

namespace {

std::string last_findings(const GvrOutcome& outcome) {
  if (outcome.findings_history.empty()) return "";
  std::string out;
  for (const auto& f : outcome.findings_history.back()) {
    if (!out.empty()) out += "; ";
    out += f.reason;
  }
  return out.empty() ? "" : " (" + out + ")";
}

}  // namespace

BuildResult build_sandbox_task(const synth::TaskSpec& task,
                               sandbox::Session& session,
                               gateway::LlmGateway& gateway,
                               const ToolRegistry& tools,
                               const EnvBuildConfig& config) {
  SandboxTask built;
  built.task = task;

  FileStage file_stage(gateway, tools, config);
  built.files_outcome = file_stage.run(task, session, built.files);
  if (built.files_outcome.status == GvrStatus::discarded)
    return {std::nullopt,
            fmt::format("files discarded after {} attempts{}",
                        built.files_outcome.attempts_used,
                        last_findings(built.files_outcome))};
  session.snapshot("post_files");

  SetupStage setup_stage(gateway, config);
  built.setup_outcome =
      setup_stage.run(task, built.files, session, built.setup);
  if (built.setup_outcome.status == GvrStatus::discarded)
    return {std::nullopt,
            fmt::format("setup discarded after {} attempts{}",
                        built.setup_outcome.attempts_used,
                        last_findings(built.setup_outcome))};
  session.snapshot("post_setup");

  VerifierStage verifier_stage(gateway, config);
  built.verifier_outcome =
      verifier_stage.run(task, built.files, built.setup, session, built.suite,
                         built.collected_tests);
  if (built.verifier_outcome.status == GvrStatus::discarded)
    return {std::nullopt,
            fmt::format("verifier discarded after {} attempts{}",
                        built.verifier_outcome.attempts_used,
                        last_findings(built.verifier_outcome))};

  log::info("built sandbox task {} (files {} / setup {} / verifier {} attempts)",
            task.id, built.files_outcome.attempts_used,
            built.setup_outcome.attempts_used,
            built.verifier_outcome.attempts_used);
  return {std::move(built), ""};
}

}  // namespace skillforge::envb
