#include "skillforge/analytics/stats.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>

#include "skillforge/util/fs.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;

namespace skillforge::analytics {

double pass_at_k(const OutcomeGrid& grid, int k) {
  if (grid.empty()) throw StatsError("empty outcome grid");
  size_t runs = grid[0].size();
  for (const auto& row : grid)
    if (row.size() != runs) throw StatsError("unequal run counts in grid");
  if (k < 1 || static_cast<size_t>(k) > runs)
    throw KExceedsRuns(fmt::format("k={} but grid has {} runs", k, runs));

  if (k == 1) {
    double wins = 0;
    for (const auto& row : grid)
      for (bool cell : row) wins += cell ? 1.0 : 0.0;
    return wins / static_cast<double>(grid.size() * runs);
  }
  double solved = 0;
  for (const auto& row : grid) {
    for (int i = 0; i < k; ++i)
      if (row[static_cast<size_t>(i)]) {
        solved += 1.0;
        break;
      }
  }
  return solved / static_cast<double>(grid.size());
}

std::vector<std::string> leading_commands(const std::string& keystrokes) {
  std::vector<std::string> out;
  static const std::regex env_assign_re(R"(^[A-Za-z_][A-Za-z0-9_]*=\S*$)");
  // Each '\n' terminates one executable line; an unterminated tail never
  // executes and is skipped.
  size_t pos = 0;
  while (pos < keystrokes.size()) {
    size_t nl = keystrokes.find('\n', pos);
    if (nl == std::string::npos) break;
    std::string line = keystrokes.substr(pos, nl - pos);
    pos = nl + 1;

    // Split on &&, ;, | (a '|' also covers '||').
    std::vector<std::string> segments;
    std::string current;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line.compare(i, 2, "&&") == 0) {
        segments.push_back(current);
        current.clear();
        ++i;
      } else if (line[i] == ';' || line[i] == '|') {
        segments.push_back(current);
        current.clear();
      } else {
        current += line[i];
      }
    }
    segments.push_back(current);

    for (auto& segment : segments) {
      std::string trimmed = util::trim(segment);
      if (trimmed.empty()) continue;
      // Strip leading VAR=value assignments.
      while (true) {
        size_t space = trimmed.find_first_of(" \t");
        std::string head =
            space == std::string::npos ? trimmed : trimmed.substr(0, space);
        if (std::regex_match(head, env_assign_re) &&
            space != std::string::npos) {
          trimmed = util::trim(trimmed.substr(space + 1));
        } else {
          break;
        }
      }
      if (trimmed.empty()) continue;
      size_t space = trimmed.find_first_of(" \t");
      out.push_back(space == std::string::npos ? trimmed
                                               : trimmed.substr(0, space));
    }
  }
  return out;
}

BehaviorStats behavior_stats(const std::vector<traj::Trajectory>& trajectories) {
  if (trajectories.empty()) throw StatsError("no trajectories");

  long long total_steps = 0, total_commands = 0;
  long long status_known = 0, status_nonzero = 0;
  for (const auto& t : trajectories) {
    total_steps += static_cast<long long>(t.steps.size());
    for (const auto& step : t.steps) {
      long long executable = 0;
      for (const auto& c : step.action.commands)
        if (!c.keystrokes.empty() && c.keystrokes.find('\n') != std::string::npos)
          ++executable;
      total_commands += executable;
      for (int code : step.exit_statuses) {
        ++status_known;
        if (code != 0) ++status_nonzero;
      }
    }
  }

  BehaviorStats stats;
  double n = static_cast<double>(trajectories.size());
  stats.avg_steps = static_cast<double>(total_steps) / n;
  stats.avg_total_commands = static_cast<double>(total_commands) / n;
  stats.commands_per_step =
      total_steps == 0 ? 0.0
                       : static_cast<double>(total_commands) /
                             static_cast<double>(total_steps);
  if (status_known > 0)
    stats.command_error_rate = static_cast<double>(status_nonzero) /
                               static_cast<double>(status_known);
  return stats;
}

DatasetStats dataset_stats(const std::vector<fs::path>& task_dirs,
                           const std::vector<traj::Trajectory>& trajectories) {
  DatasetStats stats;
  long long file_total = 0, test_total = 0, task_count = 0;
  std::set<std::string> extensions;

  for (const auto& dir : task_dirs) {
    fs::path manifest = dir / "task.json";
    if (!fs::exists(manifest) || !fs::exists(dir / "instruction.md") ||
        !fs::exists(dir / "tests" / "test_outputs.py")) {
      stats.malformed_dirs.push_back(dir.string());
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(util::read_file(manifest));
    } catch (const std::exception&) {
      stats.malformed_dirs.push_back(dir.string());
      continue;
    }
    ++task_count;
    std::string kind = j.value("skill_kind", "single");
    ++stats.tasks_by_kind[kind];

    auto files = j.value("initial_files", nlohmann::json::array());
    file_total += static_cast<long long>(files.size());
    for (const auto& f : files) {
      fs::path p(f.is_string() ? f.get<std::string>()
                               : f.value("filepath", ""));
      if (p.has_extension()) extensions.insert(p.extension().string());
    }
    if (j.contains("collected_tests"))
      test_total += j["collected_tests"].get<long long>();
    else {
      // Fall back to counting test functions in the suite source.
      std::string source =
          util::read_file(dir / "tests" / "test_outputs.py");
      static const std::regex def_re(R"(^def\s+test_)");
      for (const auto& line : util::split_lines(source))
        if (std::regex_search(line, def_re)) ++test_total;
    }
  }

  stats.total_tasks = task_count;
  if (task_count > 0) {
    stats.avg_initial_files =
        static_cast<double>(file_total) / static_cast<double>(task_count);
    stats.avg_pytest_tests =
        static_cast<double>(test_total) / static_cast<double>(task_count);
  }
  stats.distinct_file_extensions = static_cast<long long>(extensions.size());

  if (!trajectories.empty()) {
    long long steps = 0, tokens = 0;
    std::set<std::string> commands;
    for (const auto& t : trajectories) {
      steps += static_cast<long long>(t.steps.size());
      tokens += t.prompt_tokens + t.completion_tokens;
      for (const auto& step : t.steps)
        for (const auto& c : step.action.commands)
          for (const auto& lead : leading_commands(c.keystrokes))
            commands.insert(lead);
    }
    double n = static_cast<double>(trajectories.size());
    stats.avg_trajectory_steps = static_cast<double>(steps) / n;
    stats.avg_trajectory_tokens = static_cast<double>(tokens) / n;
    stats.distinct_leading_commands = static_cast<long long>(commands.size());
  }
  return stats;
}

nlohmann::ordered_json to_json(const DatasetStats& stats) {
  nlohmann::ordered_json j = {
      {"total_tasks", stats.total_tasks},
      {"tasks_by_kind", stats.tasks_by_kind},
      {"distinct_file_extensions", stats.distinct_file_extensions},
      {"distinct_leading_commands", stats.distinct_leading_commands},
      {"malformed_dirs", stats.malformed_dirs},
  };
  if (stats.avg_initial_files) j["avg_initial_files"] = *stats.avg_initial_files;
  if (stats.avg_pytest_tests) j["avg_pytest_tests"] = *stats.avg_pytest_tests;
  if (stats.avg_trajectory_steps)
    j["avg_trajectory_steps"] = *stats.avg_trajectory_steps;
  if (stats.avg_trajectory_tokens)
    j["avg_trajectory_tokens"] = *stats.avg_trajectory_tokens;
  return j;
}

std::string render_table(const DatasetStats& stats) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.2f}", *v) : std::string("-");
  };
  std::string out;
  out += fmt::format("{:<28} {:>10}\n", "statistic", "value");
  out += fmt::format("{:<28} {:>10}\n", "total tasks", stats.total_tasks);
  for (const auto& [kind, count] : stats.tasks_by_kind)
    out += fmt::format("{:<28} {:>10}\n", "  " + kind + " tasks", count);
  out += fmt::format("{:<28} {:>10}\n", "avg initial files",
                     opt(stats.avg_initial_files));
  out += fmt::format("{:<28} {:>10}\n", "avg pytest tests",
                     opt(stats.avg_pytest_tests));
  out += fmt::format("{:<28} {:>10}\n", "distinct file extensions",
                     stats.distinct_file_extensions);
  out += fmt::format("{:<28} {:>10}\n", "avg trajectory steps",
                     opt(stats.avg_trajectory_steps));
  out += fmt::format("{:<28} {:>10}\n", "avg trajectory tokens",
                     opt(stats.avg_trajectory_tokens));
  out += fmt::format("{:<28} {:>10}\n", "distinct leading commands",
                     stats.distinct_leading_commands);
  if (!stats.malformed_dirs.empty())
    out += fmt::format("{:<28} {:>10}\n", "malformed dirs",
                       stats.malformed_dirs.size());
  return out;
}

}  // namespace skillforge::analytics
