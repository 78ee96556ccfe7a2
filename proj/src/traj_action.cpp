#include "skillforge/traj/action.hpp"

#include "skillforge/util/json_extract.hpp"

namespace skillforge::traj {

using nlohmann::json;

ParsedAction parse_action(const std::string& text) {
  auto extracted = util::extract_last_json_object_verbose(text);
  if (!extracted) throw NoJsonObject("no JSON object in action reply");

  ParsedAction parsed;
  if (extracted->extra_text)
    parsed.warnings.push_back("extra text outside the JSON object");

  const json& j = extracted->value;
  for (const char* key : {"analysis", "plan", "commands"})
    if (!j.contains(key))
      throw MissingRequiredField(std::string("action is missing '") + key + "'");
  if (!j["commands"].is_array())
    throw MissingRequiredField("'commands' must be an array");

  AgentAction action;
  action.analysis = j["analysis"].is_string() ? j["analysis"].get<std::string>()
                                              : j["analysis"].dump();
  action.plan = j["plan"].is_string() ? j["plan"].get<std::string>()
                                      : j["plan"].dump();
  for (const auto& c : j["commands"]) {
    if (!c.contains("keystrokes") || !c["keystrokes"].is_string())
      throw MissingRequiredField("command without keystrokes");
    CommandBatch batch;
    batch.keystrokes = c["keystrokes"].get<std::string>();
    batch.duration_s = c.value("duration", 1.0);
    if (batch.duration_s <= 0)
      throw MissingRequiredField("command duration must be > 0");
    action.commands.push_back(std::move(batch));
  }
  if (j.contains("task_complete")) {
    if (j["task_complete"].is_boolean())
      action.task_complete = j["task_complete"].get<bool>();
    else
      parsed.warnings.push_back("task_complete is not a boolean; treated as false");
  }
  parsed.action = std::move(action);
  return parsed;
}

std::string serialize_action(const AgentAction& action) {
  nlohmann::ordered_json commands = nlohmann::ordered_json::array();
  for (const auto& c : action.commands)
    commands.push_back(
        {{"keystrokes", c.keystrokes}, {"duration", c.duration_s}});
  nlohmann::ordered_json j = {{"analysis", action.analysis},
                              {"plan", action.plan},
                              {"commands", commands},
                              {"task_complete", action.task_complete}};
  return j.dump();
}

}  // namespace skillforge::traj
