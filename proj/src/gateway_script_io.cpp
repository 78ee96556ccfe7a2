#include "skillforge/gateway/script_io.hpp"

#include <algorithm>

#include "skillforge/util/fs.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;

namespace skillforge::gateway {

std::vector<ScriptEntry> load_script_file(const fs::path& path) {
  std::vector<ScriptEntry> entries;
  for (const auto& line : util::split_lines(util::read_file(path))) {
    std::string trimmed = util::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    nlohmann::json j = nlohmann::json::parse(trimmed);
    ScriptEntry e;
    e.match_key = j.at("match_key").get<std::string>();
    e.text = j.value("text", "");
    for (const auto& call : j.value("tool_calls", nlohmann::json::array())) {
      ToolCall tc;
      tc.tool_name = call.at("tool_name").get<std::string>();
      tc.arguments = call.value("arguments", nlohmann::json::object());
      e.tool_calls.push_back(std::move(tc));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void register_scripts_from_dir(LlmGateway& gateway, const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files)
    gateway.register_script(file.stem().string(), load_script_file(file));
}

}  // namespace skillforge::gateway
