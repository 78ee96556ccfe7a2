#pragma once

#include <json.hpp>

#include "skillforge/traj/rollout.hpp"

namespace skillforge::traj {

// Multi-turn SFT record: system prompt rendered WITHOUT the guideline, then
// alternating assistant turns (raw action JSON) and user turns (the
// observations). Failed trajectories export too; metadata carries the
// verification outcome. No guideline step string may appear in any input
// turn.
nlohmann::ordered_json export_sft(const Trajectory& trajectory,
                                  const synth::TaskSpec& task);

// Persisted trajectory record (schema traj/v1; wall-clock data excluded so
// scripted runs are byte-reproducible).
nlohmann::ordered_json trajectory_to_json(const Trajectory& trajectory);

// Inverse of trajectory_to_json; step actions are re-parsed from their raw
// wire text.
Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace skillforge::traj
