#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace skillforge::gateway {

enum class Role { system, user, assistant, tool };
enum class StageTag { task_gen, env_build, trajectory, judge, other };

std::string to_string(Role role);
std::string to_string(StageTag tag);
StageTag stage_tag_from_string(const std::string& name);

struct Message {
  Role role = Role::user;
  std::string text;
};

struct Sampling {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 8192;
};

struct ToolDecl {
  std::string name;
  std::string description;
  nlohmann::json parameters;  // JSON-schema-shaped argument description
};

struct ToolCall {
  std::string tool_name;
  nlohmann::json arguments;

  bool operator==(const ToolCall&) const = default;
};

struct ChatRequest {
  std::string backend_id;
  std::vector<Message> messages;
  Sampling sampling;
  std::vector<ToolDecl> tool_schemas;
  StageTag stage_tag = StageTag::other;
};

struct Usage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  std::vector<ToolCall> tool_calls;
  Usage usage;
};

// ---- error taxonomy ----

struct GatewayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Retries exhausted against a failing backend.
struct BackendUnavailable : GatewayError {
  using GatewayError::GatewayError;
};
// A scripted backend ran out of entries for the request's match key; this
// signals a test-fixture gap, not a runtime condition.
struct ScriptExhausted : GatewayError {
  using GatewayError::GatewayError;
};
// Provider returned an undecodable payload.
struct MalformedResponse : GatewayError {
  using GatewayError::GatewayError;
};
struct DuplicateBackend : GatewayError {
  using GatewayError::GatewayError;
};
struct UnknownBackend : GatewayError {
  using GatewayError::GatewayError;
};
// Request violated a ChatRequest invariant (empty messages, negative
// temperature, ...). Deliberately not retried.
struct InvalidRequest : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Backends throw this for conditions worth retrying (timeouts, 5xx, rate
// limits); everything else surfaces immediately.
struct TransientBackendError : GatewayError {
  using GatewayError::GatewayError;
};

}  // namespace skillforge::gateway
