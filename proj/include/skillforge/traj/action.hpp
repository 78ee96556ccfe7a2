#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace skillforge::traj {

struct CommandBatch {
  std::string keystrokes;
  double duration_s = 1.0;
};

// One decoded agent turn on the wire protocol: analysis, plan, a command
// batch, and the optional completion flag (defaults false when absent).
struct AgentAction {
  std::string analysis;
  std::string plan;
  std::vector<CommandBatch> commands;  // empty is valid (observe only)
  bool task_complete = false;
};

struct ParsedAction {
  AgentAction action;
  std::vector<std::string> warnings;  // extra text outside the JSON, etc.
};

struct ActionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoJsonObject : ActionError {
  using ActionError::ActionError;
};
struct MissingRequiredField : ActionError {
  using ActionError::ActionError;
};

// Extracts the last balanced JSON object from the reply and validates the
// required keys (analysis, plan, commands). Text outside the JSON is
// tolerated and reported as a warning, not an error.
ParsedAction parse_action(const std::string& text);

// Canonical wire form of an action (stable key order).
std::string serialize_action(const AgentAction& action);

}  // namespace skillforge::traj
