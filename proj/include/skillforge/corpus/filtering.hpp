#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skillforge/corpus/skill.hpp"
#include "skillforge/gateway/gateway.hpp"

namespace skillforge::corpus {

struct SkillScore {
  int applicability = 0;  // 1..3
  int richness = 0;       // 1..3
  std::string rationale;
};

enum class FilterStage { rule, llm, popularity };
enum class Verdict { keep, drop };

struct FilterDecision {
  std::string skill_id;
  FilterStage stage = FilterStage::rule;
  Verdict verdict = Verdict::keep;
  std::string reason;  // non-empty whenever verdict == drop
};

// Drops the skill iff its name matches any denylist pattern (case-insensitive
// substring or glob); the reason names the matching pattern.
FilterDecision rule_filter(const Skill& skill,
                           const std::vector<std::string>& denylist);

// Asks the judge backend for {applicability, richness, rationale} as strict
// JSON; keeps only skills scoring the maximum (3) on both. A malformed reply
// gets one re-ask, then the skill drops as "unscorable".
std::pair<std::optional<SkillScore>, FilterDecision> llm_score_filter(
    const Skill& skill, gateway::LlmGateway& gateway,
    const std::string& backend_id);

// Top-k by downloads, ties broken by ascending id. Result sorted by
// (downloads desc, id asc).
std::vector<Skill> popularity_select(std::vector<Skill> skills, size_t k);

}  // namespace skillforge::corpus
