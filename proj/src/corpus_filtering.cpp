#include "skillforge/corpus/filtering.hpp"

#include <algorithm>

#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/json_extract.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::corpus {

FilterDecision rule_filter(const Skill& skill,
                           const std::vector<std::string>& denylist) {
  for (const auto& pattern : denylist) {
    if (util::pattern_match(pattern, skill.name)) {
      return {skill.id, FilterStage::rule, Verdict::drop,
              "name matches denylist pattern '" + pattern + "'"};
    }
  }
  return {skill.id, FilterStage::rule, Verdict::keep, ""};
}

namespace {

std::optional<SkillScore> parse_score(const std::string& text) {
  auto j = util::extract_last_json_object(text);
  if (!j) return std::nullopt;
  if (!j->contains("applicability") || !j->contains("richness"))
    return std::nullopt;
  if (!(*j)["applicability"].is_number_integer() ||
      !(*j)["richness"].is_number_integer())
    return std::nullopt;
  SkillScore score;
  score.applicability = (*j)["applicability"].get<int>();
  score.richness = (*j)["richness"].get<int>();
  score.rationale = j->value("rationale", "");
  if (score.applicability < 1 || score.applicability > 3 ||
      score.richness < 1 || score.richness > 3)
    return std::nullopt;
  return score;
}

}  // namespace

std::pair<std::optional<SkillScore>, FilterDecision> llm_score_filter(
    const Skill& skill, gateway::LlmGateway& gateway,
    const std::string& backend_id) {
  gateway::ChatRequest request;
  request.backend_id = backend_id;
  request.stage_tag = gateway::StageTag::judge;
  request.messages = {{gateway::Role::user,
                       prompts::render("skill_score",
                                       {{"skill", emit_skill_md(skill)}})}};

  // One re-ask on a malformed score, then a conservative drop.
  std::optional<SkillScore> score;
  for (int ask = 0; ask < 2 && !score; ++ask)
    score = parse_score(gateway.complete(request).text);

  if (!score)
    return {std::nullopt,
            {skill.id, FilterStage::llm, Verdict::drop, "unscorable"}};
  if (score->applicability == 3 && score->richness == 3)
    return {score, {skill.id, FilterStage::llm, Verdict::keep, ""}};
  return {score,
          {skill.id, FilterStage::llm, Verdict::drop,
           "scored below maximum (applicability=" +
               std::to_string(score->applicability) +
               ", richness=" + std::to_string(score->richness) + ")"}};
}

std::vector<Skill> popularity_select(std::vector<Skill> skills, size_t k) {
  std::sort(skills.begin(), skills.end(), [](const Skill& a, const Skill& b) {
    if (a.downloads != b.downloads) return a.downloads > b.downloads;
    return a.id < b.id;
  });
  if (skills.size() > k) skills.resize(k);
  return skills;
}

}  // namespace skillforge::corpus
