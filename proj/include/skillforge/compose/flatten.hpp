#pragma once

#include <vector>

#include "skillforge/corpus/skill.hpp"
#include "skillforge/gateway/gateway.hpp"

namespace skillforge::compose {

// Flattens an ordered member list into one composite skill.md-shaped Skill:
// joined name, union of tags, body = member bodies under per-member headings.
// Team bodies come from an LLM-backed multi-role workflow prompt (pass the
// gateway); graph bodies are deterministic concatenation in path order.
corpus::Skill flatten_composite(const std::vector<corpus::Skill>& members,
                                corpus::SkillKind kind,
                                gateway::LlmGateway* gateway = nullptr,
                                const std::string& backend_id = "");

}  // namespace skillforge::compose
