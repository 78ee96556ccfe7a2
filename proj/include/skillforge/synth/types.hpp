#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace skillforge::synth {

struct Persona {
  std::string id;
  std::string text;  // non-empty
  std::vector<std::string> labels;
};

enum class GenMode { llm_direct, local_tool, remote_fetch };

std::string to_string(GenMode mode);
std::optional<GenMode> gen_mode_from_string(const std::string& name);

struct FileSpec {
  std::string path;  // absolute
  GenMode mode = GenMode::llm_direct;
  std::string description;  // non-empty
};

struct Blueprint {
  std::vector<FileSpec> files;
  std::vector<std::string> setup_steps;
};

struct DimScore {
  int score = 0;  // 0..5
  std::string reason;
};

struct JudgeReport {
  DimScore instruction_quality;
  DimScore solvable_closed_world;
  DimScore blueprint_completeness;
  DimScore guideline_quality;
  DimScore evaluation_criteria_quality;

  int min_score() const;
  nlohmann::ordered_json to_json() const;
};

enum class Relevance { related, unrelated };

// The synthesized quadruple: instruction, blueprint (files + setup steps),
// evaluation criteria, guideline -- plus the relevance verdict and the
// judge's report once gated.
struct TaskSpec {
  std::string id;
  std::string title;
  std::string instruction;
  Blueprint blueprint;
  std::vector<std::string> eval_criteria;
  std::vector<std::string> guideline;  // entries start with "Step <n>: "
  Relevance relevance = Relevance::unrelated;
  std::optional<JudgeReport> judge;
  bool judge_accepted = false;
  std::string source_skill_id;
  std::string persona_id;
  // Normalized dump of the synthesis JSON; fed verbatim into the guideline
  // and judge prompts.
  std::string core_goal_json;
};

nlohmann::ordered_json task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const nlohmann::json& j);

std::vector<Persona> load_personas(const std::string& jsonl_text);

struct SynthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedTaskJSON : SynthError {
  using SynthError::SynthError;
};
struct MalformedGuideline : SynthError {
  using SynthError::SynthError;
};
struct MalformedJudgeJSON : SynthError {
  using SynthError::SynthError;
};
struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace skillforge::synth
