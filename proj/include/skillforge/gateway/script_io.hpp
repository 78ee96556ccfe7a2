#pragma once

#include <filesystem>
#include <vector>

#include "skillforge/gateway/gateway.hpp"

namespace skillforge::gateway {

// Script files are JSON lines: {"match_key": "...", "text": "...",
// "tool_calls": [{"tool_name": ..., "arguments": {...}}]}. Blank lines and
// lines starting with '#' are skipped.
std::vector<ScriptEntry> load_script_file(const std::filesystem::path& path);

// Registers every *.jsonl in `dir` as a scripted backend named after the
// file stem.
void register_scripts_from_dir(LlmGateway& gateway,
                               const std::filesystem::path& dir);

}  // namespace skillforge::gateway
