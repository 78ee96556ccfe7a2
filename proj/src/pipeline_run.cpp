#include "skillforge/pipeline/run.hpp"

#include <algorithm>
#include <mutex>
#include <random>

#include <fmt/format.h>

#include "skillforge/compose/flatten.hpp"
#include "skillforge/compose/graph.hpp"
#include "skillforge/corpus/filtering.hpp"
#include "skillforge/gateway/script_io.hpp"
#include "skillforge/pipeline/checkpoints.hpp"
#include "skillforge/pipeline/harbor.hpp"
#include "skillforge/synth/synthesizer.hpp"
#include "skillforge/traj/export.hpp"
#include "skillforge/util/fs.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/money.hpp"
#include "skillforge/util/text.hpp"
#include "skillforge/util/worker_pool.hpp"

namespace fs = std::filesystem;

namespace skillforge::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Runner {
  const PipelineConfig& config;
  fs::path run_dir;
  gateway::LlmGateway gateway;
  std::shared_ptr<envb::FixtureFetchExecutor> fetch_stub;
  envb::ToolRegistry tools;
  RunManifest manifest;
  std::mutex mu;  // checkpoint + state writes from worker threads

  explicit Runner(const PipelineConfig& cfg)
      : config(cfg), run_dir(cfg.run_dir()) {
    fs::create_directories(run_dir / "tasks");
    fs::create_directories(run_dir / "trajectories" / "parts");
    fs::create_directories(run_dir / "exports");
    fs::create_directories(run_dir / "checkpoints");
    fs::create_directories(run_dir / "stages");

    if (config.scripted()) {
      gateway::register_scripts_from_dir(gateway, *config.scripted_dir);
      auto retry = gateway.retry_policy();
      retry.sleep = false;
      gateway.set_retry_policy(retry);
    } else {
      for (const auto& [id, remote] : config.remote_backends)
        gateway.register_backend(id,
                                 std::make_shared<gateway::HttpBackend>(remote));
    }
    for (const auto& [id, price] : config.prices)
      gateway.ledger().set_price(id, price);

    fetch_stub = std::make_shared<envb::FixtureFetchExecutor>();
    if (config.scripted()) {
      fs::path fixtures = *config.scripted_dir / "fetch_fixtures.json";
      if (fs::exists(fixtures)) {
        json j = json::parse(util::read_file(fixtures));
        json pages = j.value("pages", json::object());
        for (auto it = pages.begin(); it != pages.end(); ++it)
          fetch_stub->add_page(it.key(), it.value().get<std::string>());
        json results = j.value("search_results", json::object());
        for (auto it = results.begin(); it != results.end(); ++it)
          fetch_stub->add_search_result(it.key(),
                                        it.value().get<std::string>());
      }
    }
    tools = envb::make_tool_registry(fetch_stub);

    restore_run_state(run_dir, gateway);
    manifest.run_id = config.run_id;
    manifest.seed = config.seed;
    manifest.config = config_to_json(config);
    manifest.tool_versions = {{"skillforge", kVersion},
                              {"task_schema", "task/v1"},
                              {"traj_schema", "traj/v1"},
                              {"sft_schema", "sft/v1"}};
  }

  std::string backend(gateway::StageTag tag) const {
    return config.backend_for(tag);
  }

  void checkpoint_item(StageCheckpoint& cp, const std::string& item,
                       json payload) {
    std::lock_guard lk(mu);
    cp.record(item, std::move(payload));
    save_run_state(run_dir, gateway);
  }

  void write_manifest() {
    // Units per stage for average-cost lines.
    std::map<gateway::StageTag, long long> units;
    std::optional<long long> total_units;
    for (const auto& row : manifest.stages) {
      if (row.name == "synthesize")
        units[gateway::StageTag::task_gen] = row.accepted;
      if (row.name == "build")
        units[gateway::StageTag::env_build] = row.accepted;
      if (row.name == "rollout") {
        units[gateway::StageTag::trajectory] = row.accepted;
        total_units = row.accepted;
      }
    }
    manifest.cost = gateway::cost_report(gateway.ledger(), units, total_units)
                        .to_json();
    util::atomic_write_file(run_dir / "manifest.json",
                            manifest.to_json().dump(2) + "\n");
    util::atomic_write_file(run_dir / "ledger.json",
                            json(gateway.ledger().to_json()).dump(2) + "\n");
  }

  // ---- stage: collect ----
  void stage_collect() {
    auto skills = corpus::load_corpus(config.corpus_dir);
    StageCheckpoint cp(run_dir / "checkpoints", "collect");

    auto process = [&](const corpus::Skill& skill) {
      if (cp.done(skill.id)) return;
      json payload;
      auto rule = corpus::rule_filter(skill, config.denylist);
      if (rule.verdict == corpus::Verdict::drop) {
        payload = {{"verdict", "drop"}, {"stage", "rule"},
                   {"reason", rule.reason}};
      } else {
        auto [score, decision] = corpus::llm_score_filter(
            skill, gateway, backend(gateway::StageTag::judge));
        if (decision.verdict == corpus::Verdict::drop)
          payload = {{"verdict", "drop"}, {"stage", "llm"},
                     {"reason", decision.reason}};
        else
          payload = {{"verdict", "keep"}};
      }
      checkpoint_item(cp, skill.id, std::move(payload));
    };
    util::parallel_for_each(skills, config.effective_parallelism(), process);

    // Popularity selection over the kept set closes the stage.
    std::vector<corpus::Skill> kept;
    StageRow row{"collect", static_cast<long long>(skills.size()), 0, 0, 0, {}};
    for (const auto& skill : skills) {
      const json& payload = cp.payloads().at(skill.id);
      if (payload.value("verdict", "") == "keep") {
        kept.push_back(skill);
      } else {
        ++row.dropped;
        ++row.drop_reasons["filter_" + payload.value("stage", "?")];
      }
    }
    auto selected = corpus::popularity_select(kept, config.popularity_top_k);
    long long popularity_drops =
        static_cast<long long>(kept.size() - selected.size());
    row.dropped += popularity_drops;
    if (popularity_drops > 0)
      row.drop_reasons["filter_popularity"] = popularity_drops;
    row.accepted = static_cast<long long>(selected.size());

    ordered_json out = ordered_json::array();
    for (const auto& s : selected) out.push_back(corpus::skill_to_json(s));
    util::atomic_write_file(run_dir / "stages" / "collected.json",
                            out.dump(2) + "\n");
    manifest.stages.push_back(std::move(row));
  }

  std::vector<corpus::Skill> load_stage_skills(const std::string& file) {
    json j = json::parse(util::read_file(run_dir / "stages" / file));
    std::vector<corpus::Skill> out;
    for (const auto& s : j) out.push_back(corpus::skill_from_json(s));
    return out;
  }

  // ---- stage: compose ----
  void stage_compose() {
    auto collected = load_stage_skills("collected.json");
    StageCheckpoint cp(run_dir / "checkpoints", "compose");

    if (!cp.done("compose")) {
      auto pairs =
          compose::candidate_pairs(collected, config.cross_pair_budget);
      auto classified = compose::classify_relations(
          collected, pairs, gateway, backend(gateway::StageTag::other));
      auto dedup = compose::dedup_similar(collected, classified.relations);

      std::map<std::string, const corpus::Skill*> by_id;
      for (const auto& s : dedup.skills) by_id[s.id] = &s;
      auto members_of = [&](const std::vector<std::string>& ids) {
        std::vector<corpus::Skill> out;
        for (const auto& id : ids) out.push_back(*by_id.at(id));
        return out;
      };

      std::vector<corpus::Skill> primitives = dedup.skills;
      for (const auto& team :
           compose::build_teams(dedup.skills, dedup.relations))
        primitives.push_back(compose::flatten_composite(
            members_of(team.member_ids), corpus::SkillKind::team, &gateway,
            backend(gateway::StageTag::other)));

      auto graph =
          compose::CompositionGraph::from_relations(dedup.skills,
                                                    dedup.relations);
      for (const auto& path :
           compose::greedy_path_cover(graph, config.path_search_budget))
        primitives.push_back(compose::flatten_composite(
            members_of(path), corpus::SkillKind::graph));

      ordered_json prim_json = ordered_json::array();
      for (const auto& p : primitives) prim_json.push_back(corpus::skill_to_json(p));
      util::atomic_write_file(run_dir / "stages" / "primitives.json",
                              prim_json.dump(2) + "\n");
      util::atomic_write_file(run_dir / "stages" / "relations.jsonl",
                              compose::relations_to_jsonl(classified.relations));

      json payload = {
          {"inputs", collected.size()},
          {"primitives", primitives.size()},
          {"dedup_dropped", collected.size() - dedup.skills.size()},
          {"skipped_pairs", classified.skipped.size()},
      };
      checkpoint_item(cp, "compose", std::move(payload));
    }

    const json& payload = cp.payloads().at("compose");
    StageRow row{"compose", payload.value("inputs", 0LL), 0, 0, 0, {}};
    row.accepted = payload.value("primitives", 0LL);
    row.dropped = payload.value("dedup_dropped", 0LL);
    row.added = row.accepted + row.dropped - row.inputs;
    if (row.dropped > 0) row.drop_reasons["dedup_similar"] = row.dropped;
    manifest.stages.push_back(std::move(row));
  }

  // ---- stage: synthesize ----
  void stage_synthesize() {
    auto primitives = load_stage_skills("primitives.json");
    auto personas =
        synth::load_personas(util::read_file(config.personas_file));
    if (personas.empty()) throw std::runtime_error("no personas loaded");

    // Persona pairing: uniform per primitive, one deterministic stream
    // drawn up front so resumption never shifts later assignments.
    std::mt19937_64 rng(config.seed);
    std::vector<size_t> assignment(primitives.size());
    for (auto& slot : assignment)
      slot = static_cast<size_t>(rng() % personas.size());

    StageCheckpoint cp(run_dir / "checkpoints", "synthesize");
    std::vector<size_t> indices(primitives.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    auto process = [&](size_t index) {
      const corpus::Skill& skill = primitives[index];
      const synth::Persona& persona = personas[assignment[index]];
      if (cp.done(skill.id)) return;
      json payload;
      try {
        auto task = synth::synthesize_task(skill, persona, gateway,
                                           backend(gateway::StageTag::task_gen));
        if (task.relevance == synth::Relevance::unrelated) {
          payload = {{"status", "dropped"}, {"reason", "unrelated_pair"}};
        } else {
          task = synth::generate_guideline(task, skill, gateway,
                                           backend(gateway::StageTag::task_gen));
          task = synth::judge_task(task, persona, skill, gateway,
                                   backend(gateway::StageTag::judge));
          if (!task.judge_accepted) {
            payload = {{"status", "dropped"}, {"reason", "judge_rejected"}};
          } else {
            util::atomic_write_file(
                run_dir / "tasks" / (task.id + ".json"),
                synth::task_to_json(task).dump(2) + "\n");
            payload = {{"status", "accepted"}, {"task_id", task.id}};
          }
        }
      } catch (const synth::MalformedTaskJSON&) {
        payload = {{"status", "dropped"}, {"reason", "malformed_task_json"}};
      } catch (const synth::MalformedGuideline&) {
        payload = {{"status", "dropped"}, {"reason", "malformed_guideline"}};
      } catch (const synth::MalformedJudgeJSON&) {
        payload = {{"status", "dropped"}, {"reason", "malformed_judge_json"}};
      }
      checkpoint_item(cp, skill.id, std::move(payload));
    };
    util::parallel_for_each(indices, config.effective_parallelism(), process);

    StageRow row{"synthesize", static_cast<long long>(primitives.size()), 0, 0,
                 0, {}};
    for (const auto& skill : primitives) {
      const json& payload = cp.payloads().at(skill.id);
      if (payload.value("status", "") == "accepted") {
        ++row.accepted;
      } else {
        ++row.dropped;
        ++row.drop_reasons[payload.value("reason", "unknown")];
      }
    }
    manifest.stages.push_back(std::move(row));
  }

  std::vector<fs::path> task_spec_files() const {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(run_dir / "tasks"))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<fs::path> harbor_dirs() const {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(run_dir / "tasks"))
      if (entry.is_directory() && fs::exists(entry.path() / "task.json"))
        out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string skill_kind_of(const std::string& skill_id) {
    // Primitive kinds come from the persisted compose output.
    static std::map<std::string, std::string> cache;
    if (cache.empty()) {
      for (const auto& s : load_stage_skills("primitives.json"))
        cache[s.id] = corpus::to_string(s.kind);
    }
    auto it = cache.find(skill_id);
    return it == cache.end() ? "single" : it->second;
  }

  // ---- stage: build ----
  void stage_build() {
    auto specs = task_spec_files();
    StageCheckpoint cp(run_dir / "checkpoints", "build");

    envb::EnvBuildConfig env_config;
    env_config.backend_id = backend(gateway::StageTag::env_build);
    env_config.gvr_budget = config.gvr_budget;

    auto process = [&](const fs::path& file) {
      auto task = synth::task_from_json(json::parse(util::read_file(file)));
      if (cp.done(task.id)) return;
      json payload;
      try {
        auto session = sandbox::create_session(config.sandbox_profile, {});
        auto result = envb::build_sandbox_task(task, *session, gateway, tools,
                                               env_config);
        if (result.task) {
          export_task_dir(*result.task, run_dir / "tasks",
                          skill_kind_of(task.source_skill_id));
          payload = {{"status", "built"}};
        } else {
          payload = {{"status", "dropped"}, {"reason", result.drop_reason}};
        }
        session->close();
      } catch (const std::exception& e) {
        payload = {{"status", "dropped"},
                   {"reason", std::string("build_error: ") + e.what()}};
      }
      checkpoint_item(cp, task.id, std::move(payload));
    };
    util::parallel_for_each(specs, config.effective_parallelism(), process);

    StageRow row{"build", static_cast<long long>(specs.size()), 0, 0, 0, {}};
    for (const auto& file : specs) {
      auto id = file.stem().string();
      const json& payload = cp.payloads().at(id);
      if (payload.value("status", "") == "built") {
        ++row.accepted;
      } else {
        ++row.dropped;
        std::string reason = payload.value("reason", "unknown");
        ++row.drop_reasons[reason.substr(0, reason.find(':'))];
      }
    }
    if (row.inputs > 0)
      manifest.build_success_rate =
          util::format_percent(row.accepted, row.inputs, 1);
    manifest.stages.push_back(std::move(row));
  }

  // ---- stage: rollout ----
  void stage_rollout() {
    auto dirs = harbor_dirs();
    StageCheckpoint cp(run_dir / "checkpoints", "rollout");

    traj::RolloutConfig rollout_config = config.rollout;
    rollout_config.backend_id = backend(gateway::StageTag::trajectory);

    auto process = [&](const fs::path& dir) {
      std::string id = dir.filename().string();
      if (cp.done(id)) return;
      json payload;
      try {
        auto task = load_task_dir(dir);
        std::vector<sandbox::InitialFile> files;
        for (const auto& f : task.files) files.push_back({f.path, f.content});
        auto session = sandbox::create_session(config.sandbox_profile, files);
        auto setup = session->run_script(task.setup.commands,
                                         sandbox::ScriptPolicy::fail_fast);
        if (setup.exit_code != 0)
          throw std::runtime_error(
              fmt::format("setup exited {} at rollout", setup.exit_code));
        session->snapshot("post_setup");
        session->reset("post_setup");

        auto trajectory = traj::rollout(task, *session, gateway,
                                        rollout_config, config.with_guideline);
        trajectory = traj::verify_and_annotate(std::move(trajectory), *session,
                                               task.suite);
        util::atomic_write_file(
            run_dir / "trajectories" / "parts" / (id + ".json"),
            traj::trajectory_to_json(trajectory).dump(2) + "\n");
        payload = {{"status", "collected"},
                   {"verified", trajectory.verified},
                   {"terminal_reason", to_string(trajectory.terminal_reason)}};
        session->close();
      } catch (const std::exception& e) {
        payload = {{"status", "dropped"},
                   {"reason", std::string("rollout_error: ") + e.what()}};
      }
      checkpoint_item(cp, id, std::move(payload));
    };
    util::parallel_for_each(dirs, config.effective_parallelism(), process);

    StageRow row{"rollout", static_cast<long long>(dirs.size()), 0, 0, 0, {}};
    for (const auto& dir : dirs) {
      const json& payload = cp.payloads().at(dir.filename().string());
      if (payload.value("status", "") == "collected") {
        ++row.accepted;  // failed trajectories are retained too
      } else {
        ++row.dropped;
        ++row.drop_reasons["rollout_error"];
      }
    }
    manifest.stages.push_back(std::move(row));
  }

  // ---- stage: export ----
  void stage_export() {
    auto dirs = harbor_dirs();
    StageCheckpoint cp(run_dir / "checkpoints", "export");

    long long exported = 0, missing = 0;
    std::string traj_lines, sft_lines;
    for (const auto& dir : dirs) {
      std::string id = dir.filename().string();
      fs::path part = run_dir / "trajectories" / "parts" / (id + ".json");
      if (!fs::exists(part)) {
        ++missing;
        continue;
      }
      json record = json::parse(util::read_file(part));
      auto trajectory = traj::trajectory_from_json(record);
      auto task = load_task_dir(dir);
      traj_lines += json(record).dump() + "\n";
      sft_lines += traj::export_sft(trajectory, task.task).dump() + "\n";
      ++exported;
    }
    util::atomic_write_file(run_dir / "trajectories" / "trajectories.jsonl",
                            traj_lines);
    util::atomic_write_file(run_dir / "exports" / "sft.jsonl", sft_lines);
    if (!cp.done("export"))
      checkpoint_item(cp, "export", json{{"exported", exported}});

    StageRow row{"export", static_cast<long long>(dirs.size()), 0, exported,
                 missing, {}};
    if (missing > 0) row.drop_reasons["no_trajectory"] = missing;
    manifest.stages.push_back(std::move(row));
  }
};

}  // namespace

ordered_json RunManifest::to_json() const {
  ordered_json stage_rows = ordered_json::array();
  for (const auto& row : stages) {
    stage_rows.push_back({{"name", row.name},
                          {"inputs", row.inputs},
                          {"added", row.added},
                          {"accepted", row.accepted},
                          {"dropped", row.dropped},
                          {"drop_reasons", row.drop_reasons}});
  }
  ordered_json j = {{"schema", "manifest/v1"},
                    {"run_id", run_id},
                    {"seed", seed},
                    {"stages", stage_rows},
                    {"cost", cost},
                    {"tool_versions", tool_versions},
                    {"config", config}};
  if (!build_success_rate.empty())
    j["build_success_rate_percent"] = build_success_rate;
  return j;
}

RunManifest run(const PipelineConfig& config) {
  Runner runner(config);
  if (config.stages.collect) {
    runner.stage_collect();
    runner.write_manifest();
  }
  if (config.stages.compose) {
    runner.stage_compose();
    runner.write_manifest();
  }
  if (config.stages.synthesize) {
    runner.stage_synthesize();
    runner.write_manifest();
  }
  if (config.stages.build) {
    runner.stage_build();
    runner.write_manifest();
  }
  if (config.stages.rollout) {
    runner.stage_rollout();
    runner.write_manifest();
  }
  if (config.stages.export_stage) {
    runner.stage_export();
    runner.write_manifest();
  }
  return runner.manifest;
}

}  // namespace skillforge::pipeline
