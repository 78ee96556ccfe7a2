#include "skillforge/pipeline/checkpoints.hpp"

#include <fstream>

#include "skillforge/util/fs.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;

namespace skillforge::pipeline {

StageCheckpoint::StageCheckpoint(const fs::path& dir, const std::string& stage)
    : file_(dir / (stage + ".jsonl")) {
  fs::create_directories(dir);
  if (!fs::exists(file_)) return;
  for (const auto& line : util::split_lines(util::read_file(file_))) {
    if (util::trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("item")) continue;  // torn tail line
    payloads_.emplace(j["item"].get<std::string>(), j.value("payload",
                                                            nlohmann::json()));
  }
}

bool StageCheckpoint::done(const std::string& item) const {
  return payloads_.count(item) > 0;
}

void StageCheckpoint::record(const std::string& item, nlohmann::json payload) {
  if (payloads_.count(item)) return;
  nlohmann::json line = {{"item", item}, {"payload", payload}};
  std::ofstream out(file_, std::ios::app | std::ios::binary);
  out << line.dump() << "\n";
  out.flush();
  payloads_.emplace(item, std::move(payload));
}

void save_run_state(const fs::path& run_dir, const gateway::LlmGateway& gateway) {
  nlohmann::json state = {
      {"script_positions", gateway.script_positions()},
      {"ledger", gateway.ledger().to_json()},
  };
  util::atomic_write_file(run_dir / "state.json", state.dump(2));
}

void restore_run_state(const fs::path& run_dir, gateway::LlmGateway& gateway) {
  fs::path file = run_dir / "state.json";
  if (!fs::exists(file)) return;
  nlohmann::json state = nlohmann::json::parse(util::read_file(file));
  std::map<std::string, long long> positions;
  nlohmann::json recorded =
      state.value("script_positions", nlohmann::json::object());
  for (auto it = recorded.begin(); it != recorded.end(); ++it)
    positions[it.key()] = it.value().get<long long>();
  gateway.fast_forward_scripts(positions);
  if (state.contains("ledger")) gateway.ledger().load_json(state["ledger"]);
}

}  // namespace skillforge::pipeline
