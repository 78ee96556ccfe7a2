#pragma once

#include "skillforge/corpus/skill.hpp"
#include "skillforge/gateway/gateway.hpp"
#include "skillforge/synth/types.hpp"

namespace skillforge::synth {

// Renders the task-synthesis template with the skill and persona, parses the
// strict-JSON reply, and returns the quadruple-in-progress. An unrelated
// verdict (pair_relevance="unrelated" or task_title="UNRELATED_PAIR") yields
// a TaskSpec with relevance=unrelated and empty content; no further stages
// run for it. Malformed output gets one re-ask, then MalformedTaskJSON.
TaskSpec synthesize_task(const corpus::Skill& skill, const Persona& persona,
                         gateway::LlmGateway& gateway,
                         const std::string& backend_id);

// Fills task.guideline from the guideline template. Entries must carry a
// "Step <n>:" prefix; skipped numbers are renumbered sequentially without
// touching the step text. Requires a related task.
TaskSpec generate_guideline(TaskSpec task, const corpus::Skill& skill,
                            gateway::LlmGateway& gateway,
                            const std::string& backend_id);

// Runs the five-dimension judge; accepts iff every dimension scores >= 4.
// Requires a populated guideline.
TaskSpec judge_task(TaskSpec task, const Persona& persona,
                    const corpus::Skill& skill, gateway::LlmGateway& gateway,
                    const std::string& backend_id);

}  // namespace skillforge::synth
