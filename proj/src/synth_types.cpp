#include "skillforge/synth/types.hpp"

#include <algorithm>

#include "skillforge/util/text.hpp"

namespace skillforge::synth {

std::string to_string(GenMode mode) {
  switch (mode) {
    case GenMode::llm_direct: return "llm_direct";
    case GenMode::local_tool: return "local_tool";
    case GenMode::remote_fetch: return "remote_fetch";
  }
  return "llm_direct";
}

std::optional<GenMode> gen_mode_from_string(const std::string& name) {
  if (name == "llm_direct") return GenMode::llm_direct;
  if (name == "local_tool") return GenMode::local_tool;
  if (name == "remote_fetch") return GenMode::remote_fetch;
  return std::nullopt;
}

int JudgeReport::min_score() const {
  return std::min({instruction_quality.score, solvable_closed_world.score,
                   blueprint_completeness.score, guideline_quality.score,
                   evaluation_criteria_quality.score});
}

nlohmann::ordered_json JudgeReport::to_json() const {
  auto dim = [](const DimScore& d) {
    return nlohmann::ordered_json{{"score", d.score}, {"reason", d.reason}};
  };
  return {{"instruction_quality", dim(instruction_quality)},
          {"solvable_closed_world", dim(solvable_closed_world)},
          {"blueprint_completeness", dim(blueprint_completeness)},
          {"guideline_quality", dim(guideline_quality)},
          {"evaluation_criteria_quality", dim(evaluation_criteria_quality)}};
}

nlohmann::ordered_json task_to_json(const TaskSpec& task) {
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : task.blueprint.files)
    files.push_back({{"filepath", f.path},
                     {"generation_mode", to_string(f.mode)},
                     {"description", f.description}});
  nlohmann::ordered_json j = {
      {"id", task.id},
      {"title", task.title},
      {"relevance",
       task.relevance == Relevance::related ? "related" : "unrelated"},
      {"instruction", task.instruction},
      {"initial_files", files},
      {"setup_steps", task.blueprint.setup_steps},
      {"evaluation_criteria", task.eval_criteria},
      {"guideline", task.guideline},
      {"source_skill_id", task.source_skill_id},
      {"persona_id", task.persona_id},
      {"judge_accepted", task.judge_accepted},
  };
  if (task.judge) j["judge"] = task.judge->to_json();
  return j;
}

namespace {

DimScore dim_from_json(const nlohmann::json& j) {
  return {j.at("score").get<int>(), j.value("reason", "")};
}

}  // namespace

TaskSpec task_from_json(const nlohmann::json& j) {
  TaskSpec task;
  task.id = j.at("id").get<std::string>();
  task.title = j.value("title", "");
  task.relevance = j.value("relevance", "unrelated") == "related"
                       ? Relevance::related
                       : Relevance::unrelated;
  task.instruction = j.value("instruction", "");
  for (const auto& f : j.value("initial_files", nlohmann::json::array())) {
    auto mode = gen_mode_from_string(f.at("generation_mode").get<std::string>());
    if (!mode) throw SynthError("bad generation_mode in stored task");
    task.blueprint.files.push_back({f.at("filepath").get<std::string>(), *mode,
                                    f.value("description", "")});
  }
  task.blueprint.setup_steps =
      j.value("setup_steps", std::vector<std::string>{});
  task.eval_criteria =
      j.value("evaluation_criteria", std::vector<std::string>{});
  task.guideline = j.value("guideline", std::vector<std::string>{});
  task.source_skill_id = j.value("source_skill_id", "");
  task.persona_id = j.value("persona_id", "");
  task.judge_accepted = j.value("judge_accepted", false);
  if (j.contains("judge")) {
    JudgeReport report;
    report.instruction_quality = dim_from_json(j["judge"]["instruction_quality"]);
    report.solvable_closed_world =
        dim_from_json(j["judge"]["solvable_closed_world"]);
    report.blueprint_completeness =
        dim_from_json(j["judge"]["blueprint_completeness"]);
    report.guideline_quality = dim_from_json(j["judge"]["guideline_quality"]);
    report.evaluation_criteria_quality =
        dim_from_json(j["judge"]["evaluation_criteria_quality"]);
    task.judge = report;
  }
  return task;
}

std::vector<Persona> load_personas(const std::string& jsonl_text) {
  std::vector<Persona> out;
  size_t index = 0;
  for (const auto& line : util::split_lines(jsonl_text)) {
    if (util::trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Persona p;
    p.id = j.value("id", "persona-" + std::to_string(index));
    p.text = j.at("text").get<std::string>();
    p.labels = j.value("labels", std::vector<std::string>{});
    if (p.text.empty()) throw SynthError("persona text must be non-empty");
    out.push_back(std::move(p));
    ++index;
  }
  return out;
}

}  // namespace skillforge::synth
