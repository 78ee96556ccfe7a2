#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillforge/envb/stages.hpp"
#include "skillforge/gateway/http_backend.hpp"
#include "skillforge/sandbox/session.hpp"
#include "skillforge/traj/rollout.hpp"

namespace skillforge::pipeline {

struct StageToggles {
  bool collect = true;
  bool compose = true;
  bool synthesize = true;
  bool build = true;
  bool rollout = true;
  bool export_stage = true;
};

struct PipelineConfig {
  std::string run_id = "run-001";
  std::filesystem::path output_root = "runs";
  std::filesystem::path corpus_dir;
  std::filesystem::path personas_file;

  // Deterministic offline mode: script files replace every backend and the
  // sandbox driver is forced local. Scripted stages run serially so script
  // consumption order is reproducible.
  std::optional<std::filesystem::path> scripted_dir;

  StageToggles stages;
  int parallelism = 8;
  unsigned long long seed = 0;
  int gvr_budget = 3;  // T
  long long path_search_budget = 1'000'000;

  std::vector<std::string> denylist = {"skill creator"};
  size_t popularity_top_k = 1000;
  size_t cross_pair_budget = 50;
  bool with_guideline = true;

  // stage tag name -> backend id
  std::map<std::string, std::string> backends;
  std::map<std::string, gateway::RemoteBackendConfig> remote_backends;
  std::map<std::string, gateway::PriceEntry> prices;

  traj::RolloutConfig rollout;
  sandbox::SandboxProfile sandbox_profile;

  std::string backend_for(gateway::StageTag tag) const;
  bool scripted() const { return scripted_dir.has_value(); }
  int effective_parallelism() const { return scripted() ? 1 : parallelism; }
  std::filesystem::path run_dir() const { return output_root / run_id; }
};

// Reads the config document (JSON). Relative paths stay relative to the
// process working directory. Unknown keys are rejected to catch typos.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

}  // namespace skillforge::pipeline
