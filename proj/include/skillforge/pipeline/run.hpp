#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillforge/pipeline/config.hpp"

namespace skillforge::pipeline {

struct StageRow {
  std::string name;
  long long inputs = 0;
  long long added = 0;  // composites created (compose stage only)
  long long accepted = 0;
  long long dropped = 0;
  std::map<std::string, long long> drop_reasons;
};

struct RunManifest {
  std::string run_id;
  unsigned long long seed = 0;
  std::vector<StageRow> stages;
  std::string build_success_rate;  // percent string when build ran
  nlohmann::ordered_json cost;
  nlohmann::ordered_json config;
  std::map<std::string, std::string> tool_versions;

  nlohmann::ordered_json to_json() const;
};

// Executes the enabled stages in order (collect -> compose -> synthesize ->
// build -> rollout -> export), resuming from per-stage checkpoints under
// the run directory. Per-item failures become drop records; the manifest is
// written atomically after every stage.
RunManifest run(const PipelineConfig& config);

}  // namespace skillforge::pipeline
