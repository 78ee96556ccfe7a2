#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "skillforge/gateway/ledger.hpp"
#include "skillforge/gateway/types.hpp"

namespace skillforge::gateway {

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual bool scripted() const { return false; }
};

struct ScriptEntry {
  std::string match_key;  // usually the stage tag name
  std::string text;
  std::vector<ToolCall> tool_calls;
};

// Deterministic replay backend. Entries are consumed per match key in FIFO
// order; the key is derived from the request's stage tag only, never from
// message content, so fixtures survive prompt edits.
class ScriptBackend : public ChatBackend {
 public:
  explicit ScriptBackend(std::vector<ScriptEntry> entries);

  ChatResponse complete(const ChatRequest& request) override;
  bool scripted() const override { return true; }

  // Skips already-consumed entries when a checkpointed run resumes.
  void fast_forward(const std::map<std::string, long long>& consumed);
  std::map<std::string, long long> consumed() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<ScriptEntry>> queues_;
  std::map<std::string, long long> next_;
};

struct RetryPolicy {
  int max_attempts = 3;
  double base_delay_s = 1.0;  // doubles per retry
  bool jitter = false;        // kept off under scripted backends
  bool sleep = true;          // tests instrument without waiting
  // Per-backend cap on in-flight requests; 0 = unlimited.
  int max_concurrent_per_backend = 0;
};

// Provider-agnostic chat-completion front door. Shareable across workers:
// backend registry, ledger updates and script consumption are all locked.
class LlmGateway {
 public:
  LlmGateway() = default;

  void register_backend(const std::string& backend_id,
                        std::shared_ptr<ChatBackend> backend);
  // Binds a scripted backend; refuses ids already bound to a remote one.
  void register_script(const std::string& backend_id,
                       std::vector<ScriptEntry> entries);
  bool has_backend(const std::string& backend_id) const;

  ChatResponse complete(const ChatRequest& request);

  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

  void set_retry_policy(RetryPolicy policy) { retry_ = policy; }
  const RetryPolicy& retry_policy() const { return retry_; }

  // Script bookkeeping for checkpoint/resume.
  std::map<std::string, long long> script_positions() const;
  void fast_forward_scripts(const std::map<std::string, long long>& consumed);

 private:
  std::shared_ptr<ChatBackend> backend_for(const std::string& id) const;

  // Simple per-backend in-flight limiter (the internal rate limit).
  struct Gate {
    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
  };

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<ChatBackend>> backends_;
  std::map<std::string, std::shared_ptr<Gate>> gates_;
  CostLedger ledger_;
  RetryPolicy retry_;
};

void validate_request(const ChatRequest& request);

// Deterministic usage estimate for backends that do not meter tokens
// (scripted replay): ~chars/4 on both sides.
Usage estimate_usage(const ChatRequest& request, const ChatResponse& response);

}  // namespace skillforge::gateway
