#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "skillforge/gateway/gateway.hpp"

namespace skillforge::pipeline {

// Append-only per-stage checkpoint: one JSON line per completed item with an
// arbitrary payload. Idempotent item processing makes at-least-once
// resumption safe; an item appearing twice keeps its first payload.
class StageCheckpoint {
 public:
  StageCheckpoint(const std::filesystem::path& dir, const std::string& stage);

  bool done(const std::string& item) const;
  const std::map<std::string, nlohmann::json>& payloads() const {
    return payloads_;
  }
  void record(const std::string& item, nlohmann::json payload);
  size_t size() const { return payloads_.size(); }

 private:
  std::filesystem::path file_;
  std::map<std::string, nlohmann::json> payloads_;
};

// Gateway-side run state that must survive a kill: script queue positions
// and the cost ledger. Written atomically after every completed item.
void save_run_state(const std::filesystem::path& run_dir,
                    const gateway::LlmGateway& gateway);
void restore_run_state(const std::filesystem::path& run_dir,
                       gateway::LlmGateway& gateway);

}  // namespace skillforge::pipeline
