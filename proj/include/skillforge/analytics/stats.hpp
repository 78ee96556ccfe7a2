#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillforge/traj/rollout.hpp"

namespace skillforge::analytics {

struct StatsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KExceedsRuns : StatsError {
  using StatsError::StatsError;
};
struct NoStatusData : StatsError {
  using StatsError::StatsError;
};

// Per-task outcomes across n independent runs (equal n per task).
using OutcomeGrid = std::vector<std::vector<bool>>;

// pass@1 = mean over all task-run cells; pass@k (k>1) = fraction of tasks
// with at least one success among the first k runs.
double pass_at_k(const OutcomeGrid& grid, int k);

struct BehaviorStats {
  double avg_steps = 0.0;
  double avg_total_commands = 0.0;
  double commands_per_step = 0.0;
  std::optional<double> command_error_rate;  // absent without status data
};

// A command is one element of a step's commands list whose keystrokes end
// with a newline. The error rate divides nonzero-exit commands by
// status-known commands; without any status data it is reported as absent.
BehaviorStats behavior_stats(const std::vector<traj::Trajectory>& trajectories);

// First whitespace token of each newline-terminated keystroke line after
// splitting on `&&`, `;`, `|` and stripping leading env assignments.
std::vector<std::string> leading_commands(const std::string& keystrokes);

struct DatasetStats {
  std::map<std::string, long long> tasks_by_kind;  // single/team/graph
  long long total_tasks = 0;
  std::optional<double> avg_initial_files;
  std::optional<double> avg_pytest_tests;
  long long distinct_file_extensions = 0;
  std::optional<double> avg_trajectory_steps;
  std::optional<double> avg_trajectory_tokens;
  long long distinct_leading_commands = 0;
  std::vector<std::string> malformed_dirs;  // listed, excluded from means
};

// Walks Harbor task directories plus the trajectory store.
DatasetStats dataset_stats(const std::vector<std::filesystem::path>& task_dirs,
                           const std::vector<traj::Trajectory>& trajectories);

nlohmann::ordered_json to_json(const DatasetStats& stats);
std::string render_table(const DatasetStats& stats);

}  // namespace skillforge::analytics
