#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "skillforge/analytics/stats.hpp"
#include "skillforge/pipeline/harbor.hpp"
#include "skillforge/pipeline/run.hpp"
#include "skillforge/traj/export.hpp"
#include "skillforge/util/fs.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;
using namespace skillforge;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<int> parallelism;
  std::optional<unsigned long long> seed;
  std::optional<std::string> resume;
  std::optional<std::string> scripted;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Pipeline config file (JSON)")
      ->required();
  cmd->add_option("--parallelism", flags.parallelism, "Worker pool size");
  cmd->add_option("--seed", flags.seed, "RNG seed (persona pairing)");
  cmd->add_option("--resume", flags.resume, "Resume the given run id");
  cmd->add_option("--scripted", flags.scripted,
                  "Script directory; forces scripted backends and the local "
                  "sandbox driver");
}

pipeline::PipelineConfig resolve_config(const CommonFlags& flags) {
  auto config = pipeline::load_config(flags.config_path);
  if (flags.parallelism) config.parallelism = *flags.parallelism;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.resume) config.run_id = *flags.resume;
  if (flags.scripted) {
    config.scripted_dir = fs::path(*flags.scripted);
    config.sandbox_profile.driver = sandbox::DriverKind::local_process;
  }
  return config;
}

int run_with_toggles(const CommonFlags& flags,
                     const pipeline::StageToggles& toggles) {
  auto config = resolve_config(flags);
  config.stages = toggles;
  auto manifest = pipeline::run(config);
  std::printf("%s\n", manifest.to_json().dump(2).c_str());
  return 0;
}

std::vector<traj::Trajectory> load_trajectories(const fs::path& run_dir) {
  std::vector<traj::Trajectory> out;
  fs::path store = run_dir / "trajectories" / "trajectories.jsonl";
  if (!fs::exists(store)) return out;
  for (const auto& line : util::split_lines(util::read_file(store))) {
    if (util::trim(line).empty()) continue;
    out.push_back(traj::trajectory_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skillforge: skills -> verified terminal-agent training data"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Verbose logging");

  CommonFlags flags;
  struct StagePlan {
    const char* name;
    const char* help;
    pipeline::StageToggles toggles;
  };
  const StagePlan plans[] = {
      {"collect", "Parse and filter the skill corpus",
       {true, false, false, false, false, false}},
      {"compose", "Build skill teams and graphs",
       {false, true, false, false, false, false}},
      {"synthesize", "Synthesize and judge task quadruples",
       {false, false, true, false, false, false}},
      {"build", "Construct sandboxes via generate-verify-repair",
       {false, false, false, true, false, false}},
      {"rollout", "Collect guided teacher trajectories",
       {false, false, false, false, true, false}},
      {"export", "Write the trajectory store and SFT records",
       {false, false, false, false, false, true}},
      {"run", "Run every stage end-to-end",
       {true, true, true, true, true, true}},
  };
  std::map<std::string, const StagePlan*> by_name;
  for (const auto& plan : plans) {
    auto* cmd = app.add_subcommand(plan.name, plan.help);
    add_common(cmd, flags);
    by_name[plan.name] = &plan;
  }

  auto* stats_cmd = app.add_subcommand("stats", "Dataset and behavior statistics");
  std::string stats_run_dir;
  bool stats_json = false;
  stats_cmd->add_option("--run-dir", stats_run_dir, "Run directory")->required();
  stats_cmd->add_flag("--json", stats_json, "Emit JSON instead of a table");

  auto* validate_cmd =
      app.add_subcommand("validate", "Validate Harbor task directories");
  std::vector<std::string> validate_dirs;
  validate_cmd->add_option("dirs", validate_dirs, "Task directories")
      ->required();

  CLI11_PARSE(app, argc, argv);
  log::set_threshold(verbose ? log::Level::info : log::Level::warn);

  try {
    for (const auto& [name, plan] : by_name)
      if (app.got_subcommand(name)) return run_with_toggles(flags, plan->toggles);

    if (app.got_subcommand("stats")) {
      fs::path run_dir(stats_run_dir);
      std::vector<fs::path> dirs;
      if (fs::exists(run_dir / "tasks"))
        for (const auto& entry : fs::directory_iterator(run_dir / "tasks"))
          if (entry.is_directory()) dirs.push_back(entry.path());
      std::sort(dirs.begin(), dirs.end());
      auto trajectories = load_trajectories(run_dir);
      auto stats = analytics::dataset_stats(dirs, trajectories);
      if (stats_json)
        std::printf("%s\n", analytics::to_json(stats).dump(2).c_str());
      else
        std::printf("%s", analytics::render_table(stats).c_str());
      if (!trajectories.empty()) {
        auto behavior = analytics::behavior_stats(trajectories);
        std::printf("avg steps %.2f, commands/step %.2f, total commands %.2f",
                    behavior.avg_steps, behavior.commands_per_step,
                    behavior.avg_total_commands);
        if (behavior.command_error_rate)
          std::printf(", command error rate %.3f", *behavior.command_error_rate);
        std::printf("\n");
      }
      return 0;
    }

    if (app.got_subcommand("validate")) {
      sandbox::SandboxProfile profile;  // local driver
      bool all_ok = true;
      for (const auto& dir : validate_dirs) {
        auto report = pipeline::validate_task_dir(dir, profile);
        for (const auto& check : report.checks)
          std::printf("[%s] %s: %s%s%s\n", report.all_pass() ? "ok" : "..",
                      dir.c_str(), check.name.c_str(),
                      check.pass ? " pass" : " FAIL",
                      check.note.empty() ? "" : (" (" + check.note + ")").c_str());
        all_ok = all_ok && report.all_pass();
      }
      return all_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
