#include "skillforge/traj/export.hpp"

namespace skillforge::traj {

nlohmann::ordered_json export_sft(const Trajectory& trajectory,
                                  const synth::TaskSpec& task) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  messages.push_back(
      {{"role", "system"},
       {"content",
        render_agent_prompt(task, /*with_guideline=*/false,
                            trajectory.initial_screen)}});
  for (const auto& step : trajectory.steps) {
    messages.push_back({{"role", "assistant"}, {"content", step.action_raw}});
    messages.push_back({{"role", "user"}, {"content", step.observation}});
  }

  nlohmann::ordered_json metadata = {
      {"schema", "sft/v1"},
      {"task_id", trajectory.task_id},
      {"verified", trajectory.verified},
      {"verifier_passed", trajectory.verifier_passed},
      {"verifier_failed", trajectory.verifier_failed},
      {"terminal_reason", to_string(trajectory.terminal_reason)},
      {"steps", trajectory.steps.size()},
      {"guideline_used_in_collection", trajectory.guideline_used},
  };
  return {{"messages", messages}, {"metadata", metadata}};
}

nlohmann::ordered_json trajectory_to_json(const Trajectory& trajectory) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& step : trajectory.steps) {
    steps.push_back({{"step_index", step.step_index},
                     {"action_raw", step.action_raw},
                     {"observation", step.observation},
                     {"exit_statuses", step.exit_statuses},
                     {"warnings", step.warnings}});
  }
  return {{"schema", "traj/v1"},
          {"task_id", trajectory.task_id},
          {"initial_screen", trajectory.initial_screen},
          {"steps", steps},
          {"verified", trajectory.verified},
          {"verifier_passed", trajectory.verifier_passed},
          {"verifier_failed", trajectory.verifier_failed},
          {"verify_note", trajectory.verify_note},
          {"prompt_tokens", trajectory.prompt_tokens},
          {"completion_tokens", trajectory.completion_tokens},
          {"guideline_used", trajectory.guideline_used},
          {"terminal_reason", to_string(trajectory.terminal_reason)}};
}

namespace {

TerminalReason terminal_reason_from_string(const std::string& name) {
  if (name == "task_complete") return TerminalReason::task_complete;
  if (name == "token_limit") return TerminalReason::token_limit;
  if (name == "timeout") return TerminalReason::timeout;
  if (name == "protocol_abort") return TerminalReason::protocol_abort;
  return TerminalReason::step_limit;
}

}  // namespace

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.task_id = j.at("task_id").get<std::string>();
  t.initial_screen = j.value("initial_screen", "");
  for (const auto& s : j.value("steps", nlohmann::json::array())) {
    Step step;
    step.step_index = s.value("step_index", 0);
    step.action_raw = s.value("action_raw", "");
    step.observation = s.value("observation", "");
    step.exit_statuses = s.value("exit_statuses", std::vector<int>{});
    step.warnings = s.value("warnings", std::vector<std::string>{});
    step.action = parse_action(step.action_raw).action;
    t.steps.push_back(std::move(step));
  }
  t.verified = j.value("verified", false);
  t.verifier_passed = j.value("verifier_passed", 0);
  t.verifier_failed = j.value("verifier_failed", 0);
  t.verify_note = j.value("verify_note", "");
  t.prompt_tokens = j.value("prompt_tokens", 0LL);
  t.completion_tokens = j.value("completion_tokens", 0LL);
  t.guideline_used = j.value("guideline_used", false);
  t.terminal_reason =
      terminal_reason_from_string(j.value("terminal_reason", "step_limit"));
  return t;
}

}  // namespace skillforge::traj
