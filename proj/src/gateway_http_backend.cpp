#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "skillforge/gateway/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace skillforge::gateway {

using nlohmann::json;

HttpBackend::HttpBackend(RemoteBackendConfig config)
    : config_(std::move(config)) {}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  json body = {{"model", config_.model},
               {"temperature", request.sampling.temperature},
               {"top_p", request.sampling.top_p},
               {"max_tokens", request.sampling.max_tokens}};
  json messages = json::array();
  for (const auto& m : request.messages)
    messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  body["messages"] = std::move(messages);
  if (!request.tool_schemas.empty()) {
    json tools = json::array();
    for (const auto& t : request.tool_schemas)
      tools.push_back({{"type", "function"},
                       {"function",
                        {{"name", t.name},
                         {"description", t.description},
                         {"parameters", t.parameters}}}});
    body["tools"] = std::move(tools);
  }

  httplib::Client client(config_.base_url);
  client.set_read_timeout(static_cast<time_t>(config_.timeout_s), 0);
  client.set_connection_timeout(static_cast<time_t>(config_.timeout_s), 0);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res)
    throw TransientBackendError("no response from " + config_.base_url);
  if (res->status == 429 || res->status >= 500)
    throw TransientBackendError("http status " + std::to_string(res->status));
  if (res->status != 200)
    throw MalformedResponse("http status " + std::to_string(res->status) +
                            ": " + res->body);

  json payload = json::parse(res->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("choices") ||
      payload["choices"].empty())
    throw MalformedResponse("undecodable completion payload");

  const json& msg = payload["choices"][0].value("message", json::object());
  ChatResponse out;
  if (msg.contains("content") && msg["content"].is_string())
    out.text = msg["content"].get<std::string>();
  for (const auto& call : msg.value("tool_calls", json::array())) {
    ToolCall tc;
    tc.tool_name = call.value("function", json::object()).value("name", "");
    std::string args =
        call.value("function", json::object()).value("arguments", "{}");
    tc.arguments = json::parse(args, nullptr, false);
    if (tc.arguments.is_discarded())
      throw MalformedResponse("undecodable tool call arguments");
    out.tool_calls.push_back(std::move(tc));
  }
  const json& usage = payload.value("usage", json::object());
  out.usage.prompt_tokens = usage.value("prompt_tokens", 0LL);
  out.usage.completion_tokens = usage.value("completion_tokens", 0LL);
  if (out.usage.prompt_tokens == 0 && out.usage.completion_tokens == 0)
    out.usage = estimate_usage(request, out);
  return out;
}

}  // namespace skillforge::gateway
