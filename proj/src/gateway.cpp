#include "skillforge/gateway/gateway.hpp"

#include <chrono>
#include <thread>

#include <fmt/format.h>

#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::gateway {

std::string to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

std::string to_string(StageTag tag) {
  switch (tag) {
    case StageTag::task_gen: return "task_gen";
    case StageTag::env_build: return "env_build";
    case StageTag::trajectory: return "trajectory";
    case StageTag::judge: return "judge";
    case StageTag::other: return "other";
  }
  return "other";
}

StageTag stage_tag_from_string(const std::string& name) {
  if (name == "task_gen") return StageTag::task_gen;
  if (name == "env_build") return StageTag::env_build;
  if (name == "trajectory") return StageTag::trajectory;
  if (name == "judge") return StageTag::judge;
  if (name == "other") return StageTag::other;
  throw InvalidRequest("unknown stage tag: " + name);
}

void validate_request(const ChatRequest& request) {
  if (request.backend_id.empty())
    throw InvalidRequest("chat request needs a backend id");
  if (request.messages.empty())
    throw InvalidRequest("chat request needs at least one message");
  Role first = request.messages.front().role;
  if (first != Role::system && first != Role::user)
    throw InvalidRequest("first message must be system or user");
  if (request.sampling.temperature < 0)
    throw InvalidRequest("temperature must be >= 0");
  if (request.sampling.max_tokens <= 0)
    throw InvalidRequest("max_tokens must be > 0");
}

Usage estimate_usage(const ChatRequest& request, const ChatResponse& response) {
  long long prompt = 0;
  for (const auto& m : request.messages) prompt += util::approx_tokens(m.text);
  long long completion = util::approx_tokens(response.text);
  for (const auto& call : response.tool_calls)
    completion += util::approx_tokens(call.tool_name) +
                  util::approx_tokens(call.arguments.dump());
  return Usage{prompt, completion};
}

// ---- ScriptBackend ----

ScriptBackend::ScriptBackend(std::vector<ScriptEntry> entries) {
  for (auto& e : entries) queues_[e.match_key].push_back(std::move(e));
}

ChatResponse ScriptBackend::complete(const ChatRequest& request) {
  std::string key = to_string(request.stage_tag);
  std::lock_guard lk(mu_);
  auto it = queues_.find(key);
  long long& pos = next_[key];
  if (it == queues_.end() || pos >= static_cast<long long>(it->second.size()))
    throw ScriptExhausted(
        fmt::format("no scripted entry left for match key '{}' (consumed {})",
                    key, pos));
  const ScriptEntry& entry = it->second[static_cast<size_t>(pos)];
  ++pos;
  ChatResponse response;
  response.text = entry.text;
  response.tool_calls = entry.tool_calls;
  response.usage = estimate_usage(request, response);
  return response;
}

void ScriptBackend::fast_forward(
    const std::map<std::string, long long>& consumed) {
  std::lock_guard lk(mu_);
  for (const auto& [key, n] : consumed) next_[key] = std::max(next_[key], n);
}

std::map<std::string, long long> ScriptBackend::consumed() const {
  std::lock_guard lk(mu_);
  return next_;
}

// ---- LlmGateway ----

void LlmGateway::register_backend(const std::string& backend_id,
                                  std::shared_ptr<ChatBackend> backend) {
  std::lock_guard lk(mu_);
  if (backends_.count(backend_id))
    throw DuplicateBackend("backend already registered: " + backend_id);
  backends_[backend_id] = std::move(backend);
}

void LlmGateway::register_script(const std::string& backend_id,
                                 std::vector<ScriptEntry> entries) {
  std::lock_guard lk(mu_);
  if (auto it = backends_.find(backend_id); it != backends_.end()) {
    if (!it->second->scripted())
      throw DuplicateBackend("backend id bound to a remote backend: " +
                             backend_id);
    throw DuplicateBackend("script already registered: " + backend_id);
  }
  backends_[backend_id] = std::make_shared<ScriptBackend>(std::move(entries));
}

bool LlmGateway::has_backend(const std::string& backend_id) const {
  std::lock_guard lk(mu_);
  return backends_.count(backend_id) > 0;
}

std::shared_ptr<ChatBackend> LlmGateway::backend_for(
    const std::string& id) const {
  std::lock_guard lk(mu_);
  auto it = backends_.find(id);
  if (it == backends_.end()) throw UnknownBackend("unknown backend: " + id);
  return it->second;
}

ChatResponse LlmGateway::complete(const ChatRequest& request) {
  validate_request(request);
  auto backend = backend_for(request.backend_id);

  // Per-backend in-flight limit.
  std::shared_ptr<Gate> gate;
  if (retry_.max_concurrent_per_backend > 0) {
    {
      std::lock_guard lk(mu_);
      auto& slot = gates_[request.backend_id];
      if (!slot) slot = std::make_shared<Gate>();
      gate = slot;
    }
    std::unique_lock lk(gate->mu);
    gate->cv.wait(lk, [&] {
      return gate->in_flight < retry_.max_concurrent_per_backend;
    });
    ++gate->in_flight;
  }
  struct Release {
    std::shared_ptr<Gate> gate;
    ~Release() {
      if (!gate) return;
      {
        std::lock_guard lk(gate->mu);
        --gate->in_flight;
      }
      gate->cv.notify_one();
    }
  } release{gate};

  std::string last_error;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    try {
      ChatResponse response = backend->complete(request);
      if (response.text.empty() && response.tool_calls.empty())
        throw MalformedResponse("backend returned neither text nor tool calls");
      ledger_.record(request.stage_tag, request.backend_id, response.usage);
      return response;
    } catch (const TransientBackendError& e) {
      last_error = e.what();
      log::warn("backend {} attempt {}/{} failed: {}", request.backend_id,
                attempt, retry_.max_attempts, last_error);
      if (attempt < retry_.max_attempts && retry_.sleep &&
          !backend->scripted()) {
        double delay = retry_.base_delay_s * (1 << (attempt - 1));
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
    }
  }
  throw BackendUnavailable(fmt::format("backend {} unavailable after {} attempts: {}",
                                       request.backend_id, retry_.max_attempts,
                                       last_error));
}

std::map<std::string, long long> LlmGateway::script_positions() const {
  std::map<std::string, long long> out;
  std::lock_guard lk(mu_);
  for (const auto& [id, backend] : backends_) {
    if (auto* script = dynamic_cast<ScriptBackend*>(backend.get())) {
      for (const auto& [key, n] : script->consumed())
        out[id + "/" + key] = n;
    }
  }
  return out;
}

void LlmGateway::fast_forward_scripts(
    const std::map<std::string, long long>& consumed) {
  std::lock_guard lk(mu_);
  for (const auto& [id, backend] : backends_) {
    auto* script = dynamic_cast<ScriptBackend*>(backend.get());
    if (!script) continue;
    std::map<std::string, long long> local;
    std::string prefix = id + "/";
    for (const auto& [key, n] : consumed)
      if (key.rfind(prefix, 0) == 0) local[key.substr(prefix.size())] = n;
    script->fast_forward(local);
  }
}

}  // namespace skillforge::gateway
