#pragma once

#include <string>

#include "skillforge/gateway/gateway.hpp"

namespace skillforge::gateway {

// Remote chat-completions backend (OpenAI-compatible wire shape). The API
// key is read from the named environment variable at call time; secrets
// never live in config files.
struct RemoteBackendConfig {
  std::string base_url;            // e.g. https://api.example.com
  std::string model;               // provider model name
  std::string api_key_env;         // e.g. SKILLFORGE_API_KEY_TEACHER
  std::string path = "/v1/chat/completions";
  double timeout_s = 120.0;
};

class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(RemoteBackendConfig config);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  RemoteBackendConfig config_;
};

}  // namespace skillforge::gateway
