#pragma once

#include <string>
#include <vector>

#include "skillforge/envb/artifacts.hpp"
#include "skillforge/gateway/gateway.hpp"
#include "skillforge/sandbox/pytest.hpp"
#include "skillforge/sandbox/session.hpp"
#include "skillforge/traj/action.hpp"

namespace skillforge::traj {

struct Step {
  AgentAction action;
  std::string action_raw;   // exact assistant text, re-parseable
  std::string observation;  // screen after the batch's last command
  int step_index = 0;
  double wall_s = 0.0;      // in-memory only; stores omit wall-clock data
  std::vector<int> exit_statuses;  // per completed command, when known
  std::vector<std::string> warnings;
};

enum class TerminalReason {
  task_complete,
  step_limit,
  token_limit,
  timeout,
  protocol_abort
};

std::string to_string(TerminalReason reason);

struct Trajectory {
  std::string task_id;
  std::string initial_screen;  // terminal state rendered into the prompt
  std::vector<Step> steps;
  bool verified = false;
  int verifier_passed = 0;
  int verifier_failed = 0;
  std::string verify_note;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  bool guideline_used = false;
  TerminalReason terminal_reason = TerminalReason::step_limit;
};

struct RolloutConfig {
  std::string backend_id;
  int max_steps = 50;
  long long context_budget_tokens = 60000;
  int compaction_keep_recent = 5;  // K
  double episode_budget_s = 1800.0;
};

// Renders the agent system prompt for a task. The guideline, when given, is
// appended to the task description under a "Guidance:" heading; exports
// re-render without it.
std::string render_agent_prompt(const synth::TaskSpec& task,
                                bool with_guideline,
                                const std::string& terminal_state);

// Drives the teacher over the action protocol from the post-setup state:
// completion -> parse_action -> send_keys per command -> observation, until
// task_complete, the step/token/wall-clock limits, or two consecutive parse
// failures (protocol_abort; the trajectory is retained as failed).
Trajectory rollout(const envb::SandboxTask& task, sandbox::Session& session,
                   gateway::LlmGateway& gateway, const RolloutConfig& config,
                   bool with_guideline);

// Runs the verifier suite against the CURRENT session state (no reset
// between rollout and verification) and annotates the trajectory. Both
// successful and failed trajectories are retained.
Trajectory verify_and_annotate(Trajectory trajectory,
                               sandbox::Session& session,
                               const sandbox::VerifierSuite& suite);

// ---- history compaction ----

struct HistoryMessage {
  gateway::Role role;
  std::string text;
};

struct BudgetTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

long long history_tokens(const std::vector<HistoryMessage>& history);

// Keeps the system prompt, the first exchange and the most recent K
// exchanges verbatim; the elided middle collapses into one marker message
// carrying the elided-step count and the last 200 chars of each elided
// observation. Throws BudgetTooSmall when even the mandatory parts exceed
// the budget.
std::vector<HistoryMessage> compact_history(
    const std::vector<HistoryMessage>& history, long long budget_tokens,
    int keep_recent);

inline constexpr const char* kCompactionMarkerPrefix =
    "Context limit reached. History compressed. [compact/v1]";

}  // namespace skillforge::traj
