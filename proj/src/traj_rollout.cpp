#include "skillforge/traj/rollout.hpp"

#include <chrono>
#include <thread>

#include <fmt/format.h>

#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::traj {

std::string to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::task_complete: return "task_complete";
    case TerminalReason::step_limit: return "step_limit";
    case TerminalReason::token_limit: return "token_limit";
    case TerminalReason::timeout: return "timeout";
    case TerminalReason::protocol_abort: return "protocol_abort";
  }
  return "step_limit";
}

std::string render_agent_prompt(const synth::TaskSpec& task,
                                bool with_guideline,
                                const std::string& terminal_state) {
  std::string instruction = task.instruction;
  if (with_guideline && !task.guideline.empty()) {
    instruction += "\n\nGuidance:\n";
    for (const auto& step : task.guideline) instruction += step + "\n";
  }
  return prompts::render("terminus", {{"instruction", instruction},
                                      {"terminal_state", terminal_state}});
}

long long history_tokens(const std::vector<HistoryMessage>& history) {
  long long total = 0;
  for (const auto& m : history) total += util::approx_tokens(m.text);
  return total;
}

std::vector<HistoryMessage> compact_history(
    const std::vector<HistoryMessage>& history, long long budget_tokens,
    int keep_recent) {
  if (history_tokens(history) <= budget_tokens) return history;
  if (history.size() < 2) throw BudgetTooSmall("nothing to compact");

  // history = [system, (assistant, user) x n]
  size_t exchanges = (history.size() - 1) / 2;
  auto exchange_at = [&](size_t i) {
    return std::pair<const HistoryMessage&, const HistoryMessage&>(
        history[1 + 2 * i], history[2 + 2 * i]);
  };

  size_t keep_tail = static_cast<size_t>(std::max(0, keep_recent));
  if (exchanges <= 1 + keep_tail)
    throw BudgetTooSmall("history has no middle to elide");

  size_t elide_begin = 1;                      // first exchange stays
  size_t elide_end = exchanges - keep_tail;    // exclusive
  std::string marker = fmt::format("{} elided_steps={}\n",
                                   kCompactionMarkerPrefix,
                                   elide_end - elide_begin);
  for (size_t i = elide_begin; i < elide_end; ++i) {
    const auto& observation = exchange_at(i).second.text;
    std::string tail = observation.size() > 200
                           ? observation.substr(observation.size() - 200)
                           : observation;
    marker += fmt::format("[step {} observation tail] {}\n", i, tail);
  }

  std::vector<HistoryMessage> out;
  out.push_back(history[0]);
  out.push_back(exchange_at(0).first);
  out.push_back(exchange_at(0).second);
  out.push_back({gateway::Role::user, marker});
  for (size_t i = elide_end; i < exchanges; ++i) {
    out.push_back(exchange_at(i).first);
    out.push_back(exchange_at(i).second);
  }
  if (history_tokens(out) > budget_tokens)
    throw BudgetTooSmall(
        fmt::format("compacted history still needs {} tokens (budget {})",
                    history_tokens(out), budget_tokens));
  return out;
}

namespace {

std::string wait_for_prompt(sandbox::Session& session) {
  for (int i = 0; i < 40; ++i) {
    std::string screen = session.screen();
    if (screen.find('$') != std::string::npos) return screen;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return session.screen();
}

}  // namespace

Trajectory rollout(const envb::SandboxTask& task, sandbox::Session& session,
                   gateway::LlmGateway& gateway, const RolloutConfig& config,
                   bool with_guideline) {
  Trajectory trajectory;
  trajectory.task_id = task.task.id;
  trajectory.guideline_used = with_guideline;
  trajectory.terminal_reason = TerminalReason::step_limit;

  std::string initial_screen = wait_for_prompt(session);
  session.drain_exit_statuses();  // swallow the startup prompt's sentinel
  trajectory.initial_screen = initial_screen;

  std::vector<HistoryMessage> history;
  history.push_back({gateway::Role::system,
                     render_agent_prompt(task.task, with_guideline,
                                         initial_screen)});

  auto start = std::chrono::steady_clock::now();
  int consecutive_parse_failures = 0;

  while (static_cast<int>(trajectory.steps.size()) < config.max_steps) {
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > config.episode_budget_s) {
      trajectory.terminal_reason = TerminalReason::timeout;
      break;
    }
    if (history_tokens(history) > config.context_budget_tokens) {
      try {
        history = compact_history(history, config.context_budget_tokens,
                                  config.compaction_keep_recent);
      } catch (const BudgetTooSmall&) {
        trajectory.terminal_reason = TerminalReason::token_limit;
        break;
      }
    }

    gateway::ChatRequest request;
    request.backend_id = config.backend_id;
    request.stage_tag = gateway::StageTag::trajectory;
    for (const auto& m : history) request.messages.push_back({m.role, m.text});

    auto response = gateway.complete(request);
    trajectory.prompt_tokens += response.usage.prompt_tokens;
    trajectory.completion_tokens += response.usage.completion_tokens;

    ParsedAction parsed;
    try {
      parsed = parse_action(response.text);
    } catch (const ActionError& e) {
      if (++consecutive_parse_failures >= 2) {
        trajectory.terminal_reason = TerminalReason::protocol_abort;
        break;  // retained as failed
      }
      history.push_back({gateway::Role::assistant, response.text});
      history.push_back(
          {gateway::Role::user,
           std::string("Your reply was not a valid action JSON (") + e.what() +
               "). Respond again with the required JSON object."});
      continue;
    }
    consecutive_parse_failures = 0;

    auto step_start = std::chrono::steady_clock::now();
    Step step;
    step.action = parsed.action;
    step.action_raw = response.text;
    step.warnings = parsed.warnings;
    step.step_index = static_cast<int>(trajectory.steps.size());

    session.drain_exit_statuses();
    std::string screen = session.screen();
    for (const auto& command : parsed.action.commands)
      screen = session.send_keys(command.keystrokes, command.duration_s);
    step.observation = screen;  // capture after the batch's last command
    step.exit_statuses = session.drain_exit_statuses();
    step.wall_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - step_start)
                      .count();

    history.push_back({gateway::Role::assistant, step.action_raw});
    history.push_back({gateway::Role::user, step.observation});
    bool complete = step.action.task_complete;
    trajectory.steps.push_back(std::move(step));

    if (complete) {
      trajectory.terminal_reason = TerminalReason::task_complete;
      break;
    }
  }
  return trajectory;
}

Trajectory verify_and_annotate(Trajectory trajectory,
                               sandbox::Session& session,
                               const sandbox::VerifierSuite& suite) {
  try {
    auto report = sandbox::run_pytest(session, suite);
    trajectory.verifier_passed = report.passed;
    trajectory.verifier_failed = report.failed + report.errored;
    trajectory.verified =
        trajectory.verifier_failed == 0 && trajectory.verifier_passed >= 1;
  } catch (const sandbox::CollectionError&) {
    trajectory.verified = false;
    trajectory.verify_note = "collection_error";
  } catch (const sandbox::MissingPackages& e) {
    trajectory.verified = false;
    trajectory.verify_note = std::string("missing_packages: ") + e.what();
  }
  return trajectory;
}

}  // namespace skillforge::traj
