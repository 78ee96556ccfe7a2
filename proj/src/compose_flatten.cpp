#include "skillforge/compose/flatten.hpp"

#include <set>
#include <stdexcept>

#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::compose {

corpus::Skill flatten_composite(const std::vector<corpus::Skill>& members,
                                corpus::SkillKind kind,
                                gateway::LlmGateway* gateway,
                                const std::string& backend_id) {
  if (members.size() < 2)
    throw std::invalid_argument("composite needs at least 2 members");
  if (kind == corpus::SkillKind::single)
    throw std::invalid_argument("composites are teams or graphs");

  corpus::Skill out;
  out.kind = kind;

  std::vector<std::string> ids, names;
  for (const auto& m : members) {
    ids.push_back(m.id);
    names.push_back(m.name);
  }
  out.id = corpus::to_string(kind) + ":" + util::join(ids, "+");
  out.name = util::join(names, " + ");

  std::set<std::string> seen;
  for (const auto& m : members)
    for (const auto& t : m.tags)
      if (seen.insert(t).second) out.tags.push_back(t);

  std::vector<std::string> descriptions;
  for (const auto& m : members) descriptions.push_back(m.description);
  out.description = util::join(descriptions, " ");
  out.category = members.front().category;
  out.subcategory =
      kind == corpus::SkillKind::team ? members.front().subcategory : "";
  out.source = "composite";

  std::string concatenated;
  for (const auto& m : members) {
    concatenated += "## " + m.name + "\n\n";
    concatenated += m.description + "\n\n";
    if (!m.body.empty()) concatenated += m.body + "\n\n";
  }

  if (kind == corpus::SkillKind::team) {
    if (!gateway)
      throw std::invalid_argument("team flatten needs a gateway");
    gateway::ChatRequest request;
    request.backend_id = backend_id;
    request.stage_tag = gateway::StageTag::other;
    request.messages = {
        {gateway::Role::user,
         prompts::render("team_workflow", {{"member_skills", concatenated},
                                           {"team_name", out.name}})}};
    out.body = gateway->complete(request).text;
  } else {
    out.body = concatenated;
  }
  return out;
}

}  // namespace skillforge::compose
