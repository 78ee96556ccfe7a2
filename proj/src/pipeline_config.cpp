#include "skillforge/pipeline/config.hpp"

#include <set>

#include "skillforge/util/fs.hpp"

namespace skillforge::pipeline {

using nlohmann::json;

std::string PipelineConfig::backend_for(gateway::StageTag tag) const {
  auto it = backends.find(gateway::to_string(tag));
  if (it != backends.end()) return it->second;
  return scripted() ? "scripted" : "default";
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(json::parse(util::read_file(path)));
}

PipelineConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {
      "run_id", "output_root", "corpus_dir", "personas_file", "scripted_dir",
      "stages", "parallelism", "seed", "gvr_budget", "path_search_budget",
      "denylist", "popularity_top_k", "cross_pair_budget", "with_guideline",
      "backends", "remote_backends", "prices", "rollout", "sandbox"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("unknown config key: " + it.key());

  PipelineConfig c;
  c.run_id = j.value("run_id", c.run_id);
  c.output_root = j.value("output_root", c.output_root.string());
  c.corpus_dir = j.value("corpus_dir", "");
  c.personas_file = j.value("personas_file", "");
  if (j.contains("scripted_dir"))
    c.scripted_dir = std::filesystem::path(j["scripted_dir"].get<std::string>());

  if (j.contains("stages")) {
    const auto& s = j["stages"];
    c.stages.collect = s.value("collect", true);
    c.stages.compose = s.value("compose", true);
    c.stages.synthesize = s.value("synthesize", true);
    c.stages.build = s.value("build", true);
    c.stages.rollout = s.value("rollout", true);
    c.stages.export_stage = s.value("export", true);
  }

  c.parallelism = j.value("parallelism", c.parallelism);
  c.seed = j.value("seed", c.seed);
  c.gvr_budget = j.value("gvr_budget", c.gvr_budget);
  c.path_search_budget = j.value("path_search_budget", c.path_search_budget);
  c.denylist = j.value("denylist", c.denylist);
  c.popularity_top_k = j.value("popularity_top_k", c.popularity_top_k);
  c.cross_pair_budget = j.value("cross_pair_budget", c.cross_pair_budget);
  c.with_guideline = j.value("with_guideline", c.with_guideline);

  json backends = j.value("backends", json::object());
  for (auto it = backends.begin(); it != backends.end(); ++it)
    c.backends[it.key()] = it.value().get<std::string>();

  json remotes = j.value("remote_backends", json::object());
  for (auto it = remotes.begin(); it != remotes.end(); ++it) {
    gateway::RemoteBackendConfig r;
    r.base_url = it.value().at("base_url").get<std::string>();
    r.model = it.value().value("model", "");
    r.api_key_env = it.value().value("api_key_env", "");
    r.path = it.value().value("path", r.path);
    r.timeout_s = it.value().value("timeout_s", r.timeout_s);
    c.remote_backends[it.key()] = r;
  }

  json prices = j.value("prices", json::object());
  for (auto it = prices.begin(); it != prices.end(); ++it) {
    c.prices[it.key()] = {
        it.value().value("prompt_micro_per_mtok", 0LL),
        it.value().value("completion_micro_per_mtok", 0LL)};
  }

  if (j.contains("rollout")) {
    const auto& r = j["rollout"];
    c.rollout.max_steps = r.value("max_steps", c.rollout.max_steps);
    c.rollout.context_budget_tokens =
        r.value("context_budget_tokens", c.rollout.context_budget_tokens);
    c.rollout.compaction_keep_recent =
        r.value("keep_recent", c.rollout.compaction_keep_recent);
    c.rollout.episode_budget_s =
        r.value("episode_budget_s", c.rollout.episode_budget_s);
  }

  if (j.contains("sandbox")) {
    const auto& s = j["sandbox"];
    std::string driver = s.value("driver", "local_process");
    c.sandbox_profile.driver = driver == "container"
                                   ? sandbox::DriverKind::container
                                   : sandbox::DriverKind::local_process;
    c.sandbox_profile.image = s.value("image", "");
    c.sandbox_profile.limits.command_timeout_s =
        s.value("command_timeout_s", c.sandbox_profile.limits.command_timeout_s);
    c.sandbox_profile.limits.task_budget_s =
        s.value("task_budget_s", c.sandbox_profile.limits.task_budget_s);
    c.sandbox_profile.screen_tail_chars =
        s.value("screen_tail_chars", c.sandbox_profile.screen_tail_chars);
  }

  if (c.scripted())  // deterministic offline runs use the local driver
    c.sandbox_profile.driver = sandbox::DriverKind::local_process;
  return c;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j = {
      {"run_id", c.run_id},
      {"corpus_dir", c.corpus_dir.string()},
      {"personas_file", c.personas_file.string()},
      {"scripted", c.scripted()},
      {"parallelism", c.parallelism},
      {"effective_parallelism", c.effective_parallelism()},
      {"seed", c.seed},
      {"gvr_budget", c.gvr_budget},
      {"path_search_budget", c.path_search_budget},
      {"denylist", c.denylist},
      {"popularity_top_k", c.popularity_top_k},
      {"cross_pair_budget", c.cross_pair_budget},
      {"with_guideline", c.with_guideline},
      {"rollout",
       {{"max_steps", c.rollout.max_steps},
        {"context_budget_tokens", c.rollout.context_budget_tokens},
        {"keep_recent", c.rollout.compaction_keep_recent},
        {"episode_budget_s", c.rollout.episode_budget_s}}},
      {"sandbox",
       {{"driver", c.sandbox_profile.driver == sandbox::DriverKind::container
                       ? "container"
                       : "local_process"},
        {"command_timeout_s", c.sandbox_profile.limits.command_timeout_s},
        {"task_budget_s", c.sandbox_profile.limits.task_budget_s},
        {"screen_tail_chars", c.sandbox_profile.screen_tail_chars}}},
  };
  return j;
}

}  // namespace skillforge::pipeline
