#include "skillforge/synth/synthesizer.hpp"

#include <regex>

#include <fmt/format.h>

#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/json_extract.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::synth {

namespace {

std::string sanitize_id(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '-';
  }
  return out;
}

gateway::ChatRequest one_shot(const std::string& backend_id,
                              gateway::StageTag tag, std::string prompt) {
  gateway::ChatRequest request;
  request.backend_id = backend_id;
  request.stage_tag = tag;
  request.messages = {{gateway::Role::user, std::move(prompt)}};
  return request;
}

// Validates the synthesis JSON and populates the task. Returns an error
// message on violation, empty string on success.
std::string apply_task_json(const nlohmann::json& j, TaskSpec& task) {
  std::string relevance = j.value("pair_relevance", "");
  std::string title = j.value("task_title", "");
  if (relevance == "unrelated" || title == "UNRELATED_PAIR") {
    task.relevance = Relevance::unrelated;
    task.title = title;
    return "";
  }
  if (relevance != "related") return "pair_relevance must be related/unrelated";
  if (!j.contains("instruction") || !j["instruction"].is_string() ||
      j["instruction"].get<std::string>().empty())
    return "missing or empty instruction";
  if (!j.contains("evaluation_criteria") || !j["evaluation_criteria"].is_array() ||
      j["evaluation_criteria"].empty())
    return "missing or empty evaluation_criteria";

  task.relevance = Relevance::related;
  task.title = title;
  task.instruction = j["instruction"].get<std::string>();
  for (const auto& c : j["evaluation_criteria"]) {
    if (!c.is_string()) return "evaluation_criteria entries must be strings";
    task.eval_criteria.push_back(c.get<std::string>());
  }
  for (const auto& f : j.value("initial_files", nlohmann::json::array())) {
    if (!f.contains("filepath") || !f["filepath"].is_string())
      return "initial file without filepath";
    FileSpec spec;
    spec.path = f["filepath"].get<std::string>();
    if (spec.path.empty() || spec.path[0] != '/')
      return "initial file path must be absolute: " + spec.path;
    auto mode = gen_mode_from_string(f.value("generation_mode", ""));
    if (!mode) return "bad generation_mode for " + spec.path;
    spec.mode = *mode;
    spec.description = f.value("description", "");
    if (spec.description.empty())
      return "initial file needs a description: " + spec.path;
    task.blueprint.files.push_back(std::move(spec));
  }
  for (const auto& s : j.value("setup_steps", nlohmann::json::array())) {
    if (!s.is_string()) return "setup_steps entries must be strings";
    task.blueprint.setup_steps.push_back(s.get<std::string>());
  }

  nlohmann::ordered_json goal = {
      {"task_title", task.title},
      {"instruction", task.instruction},
      {"initial_files", nlohmann::ordered_json::array()},
      {"setup_steps", task.blueprint.setup_steps},
      {"evaluation_criteria", task.eval_criteria},
  };
  for (const auto& f : task.blueprint.files)
    goal["initial_files"].push_back({{"filepath", f.path},
                                     {"generation_mode", to_string(f.mode)},
                                     {"description", f.description}});
  task.core_goal_json = goal.dump(2);
  return "";
}

}  // namespace

TaskSpec synthesize_task(const corpus::Skill& skill, const Persona& persona,
                         gateway::LlmGateway& gateway,
                         const std::string& backend_id) {
  if (persona.text.empty())
    throw PreconditionViolation("persona text must be non-empty");

  std::string prompt =
      prompts::render("task_synthesis", {{"skill", emit_skill_md(skill)},
                                         {"persona", persona.text}});

  std::string last_error = "no JSON object in reply";
  for (int ask = 0; ask < 2; ++ask) {
    auto response = gateway.complete(
        one_shot(backend_id, gateway::StageTag::task_gen, prompt));
    auto j = util::extract_last_json_object(response.text);
    if (!j) continue;
    TaskSpec task;
    task.id = sanitize_id(skill.id) + "__" + sanitize_id(persona.id);
    task.source_skill_id = skill.id;
    task.persona_id = persona.id;
    last_error = apply_task_json(*j, task);
    if (last_error.empty()) return task;
  }
  throw MalformedTaskJSON(fmt::format("task synthesis for ({}, {}): {}",
                                      skill.id, persona.id, last_error));
}

TaskSpec generate_guideline(TaskSpec task, const corpus::Skill& skill,
                            gateway::LlmGateway& gateway,
                            const std::string& backend_id) {
  if (task.relevance != Relevance::related)
    throw PreconditionViolation("guideline generation needs a related task");

  std::string prompt =
      prompts::render("guideline", {{"skill", emit_skill_md(skill)},
                                    {"core_goal_json", task.core_goal_json}});

  static const std::regex step_re(R"(^\s*Step\s+(\d+)\s*:(.*)$)");
  for (int ask = 0; ask < 2; ++ask) {
    auto response = gateway.complete(
        one_shot(backend_id, gateway::StageTag::task_gen, prompt));
    auto j = util::extract_last_json_object(response.text);
    if (!j || !j->contains("guideline") || !(*j)["guideline"].is_array() ||
        (*j)["guideline"].empty())
      continue;

    // Renumbering is pure normalization: only the "Step <n>:" prefix is
    // rewritten, the step text after the colon is never altered.
    std::vector<std::string> steps;
    bool ok = true;
    for (const auto& entry : (*j)["guideline"]) {
      if (!entry.is_string()) {
        ok = false;
        break;
      }
      std::smatch m;
      std::string text = entry.get<std::string>();
      if (!std::regex_match(text, m, step_re)) {
        ok = false;
        break;
      }
      steps.push_back(fmt::format("Step {}:{}", steps.size() + 1, m[2].str()));
    }
    if (!ok || steps.empty()) continue;
    task.guideline = std::move(steps);
    return task;
  }
  throw MalformedGuideline("guideline generation failed for " + task.id);
}

TaskSpec judge_task(TaskSpec task, const Persona& persona,
                    const corpus::Skill& skill, gateway::LlmGateway& gateway,
                    const std::string& backend_id) {
  if (task.guideline.empty())
    throw PreconditionViolation("judge needs a populated guideline");

  nlohmann::ordered_json goal = nlohmann::ordered_json::parse(task.core_goal_json);
  goal["guideline"] = task.guideline;
  std::string prompt =
      prompts::render("task_judge", {{"persona_text", persona.text},
                                     {"skill_text", emit_skill_md(skill)},
                                     {"goal_json", goal.dump(2)}});

  static const char* kDims[] = {
      "instruction_quality", "solvable_closed_world", "blueprint_completeness",
      "guideline_quality", "evaluation_criteria_quality"};

  for (int ask = 0; ask < 2; ++ask) {
    auto response =
        gateway.complete(one_shot(backend_id, gateway::StageTag::judge, prompt));
    auto j = util::extract_last_json_object(response.text);
    if (!j) continue;
    bool ok = true;
    JudgeReport report;
    DimScore* slots[] = {&report.instruction_quality,
                         &report.solvable_closed_world,
                         &report.blueprint_completeness,
                         &report.guideline_quality,
                         &report.evaluation_criteria_quality};
    for (size_t i = 0; i < 5; ++i) {
      if (!j->contains(kDims[i]) || !(*j)[kDims[i]].contains("score") ||
          !(*j)[kDims[i]]["score"].is_number_integer()) {
        ok = false;
        break;
      }
      slots[i]->score = (*j)[kDims[i]]["score"].get<int>();
      slots[i]->reason = (*j)[kDims[i]].value("reason", "");
      if (slots[i]->score < 0 || slots[i]->score > 5) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    task.judge = report;
    task.judge_accepted = report.min_score() >= 4;
    return task;
  }
  throw MalformedJudgeJSON("judge output unparseable for " + task.id);
}

}  // namespace skillforge::synth
