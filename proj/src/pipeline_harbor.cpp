#include "skillforge/pipeline/harbor.hpp"

#include <fmt/format.h>

#include "skillforge/sandbox/pytest.hpp"
#include "skillforge/util/fs.hpp"
#include "skillforge/util/subprocess.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;

namespace skillforge::pipeline {

namespace {

// Initial files re-root from /app into environment/; anything else keeps
// its tree under environment/_roots/.
fs::path reroot(const std::string& logical) {
  if (logical.rfind("/app/", 0) == 0) return fs::path(logical.substr(5));
  return fs::path("_roots") / logical.substr(1);
}

std::string unroot(const fs::path& rel) {
  std::string s = rel.generic_string();
  if (s.rfind("_roots/", 0) == 0) return "/" + s.substr(7);
  return "/app/" + s;
}

std::string setup_sh_text(const envb::SetupScript& setup) {
  std::string out = "#!/usr/bin/env bash\nset -euxo pipefail\n\n";
  out += util::join(setup.commands, "\n");
  out += "\n";
  return out;
}

}  // namespace

fs::path export_task_dir(const envb::SandboxTask& task, const fs::path& parent,
                         const std::string& skill_kind) {
  if (task.suite.test_source.empty())
    throw std::logic_error("export needs an accepted verifier suite");

  fs::path final_dir = parent / task.task.id;
  fs::path tmp_dir = parent / (task.task.id + ".tmp-export");
  fs::remove_all(tmp_dir);
  fs::create_directories(tmp_dir);

  util::write_file(tmp_dir / "instruction.md", task.task.instruction + "\n");

  fs::path env_dir = tmp_dir / "environment";
  fs::create_directories(env_dir);
  for (const auto& f : task.files)
    util::write_file(env_dir / reroot(f.path), f.content);
  util::write_file(env_dir / "setup.sh", setup_sh_text(task.setup));

  fs::path tests_dir = tmp_dir / "tests";
  fs::create_directories(tests_dir);
  util::write_file(tests_dir / "test_outputs.py", task.suite.test_source);
  for (const auto& [path, content] : task.suite.helper_files) {
    // Helper paths are normalized to "tests/<name>" already.
    fs::path rel(path);
    util::write_file(tmp_dir / rel, content);
  }

  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : task.files)
    files.push_back({{"filepath", f.path},
                     {"generation_mode", synth::to_string(f.provenance)},
                     {"tool_calls", f.generator_log.size()}});
  nlohmann::ordered_json helper_paths = nlohmann::ordered_json::array();
  for (const auto& [path, _] : task.suite.helper_files) helper_paths.push_back(path);

  nlohmann::ordered_json manifest = {
      {"schema", "task/v1"},
      {"id", task.task.id},
      {"skill_kind", skill_kind},
      {"source_skill_id", task.task.source_skill_id},
      {"persona_id", task.task.persona_id},
      {"evaluation_criteria", task.task.eval_criteria},
      {"guideline", task.task.guideline},
      {"initial_files", files},
      {"setup_commands", task.setup.commands},
      {"probe_script", task.setup.probe_script},
      {"suite",
       {{"system_packages", task.suite.system_packages},
        {"python_packages", task.suite.python_packages},
        {"helper_paths", helper_paths}}},
      {"gvr_attempts",
       {{"files", task.files_outcome.attempts_used},
        {"setup", task.setup_outcome.attempts_used},
        {"verifier", task.verifier_outcome.attempts_used}}},
      {"collected_tests", task.collected_tests},
  };
  util::write_file(tmp_dir / "task.json", manifest.dump(2) + "\n");

  fs::remove_all(final_dir);
  fs::rename(tmp_dir, final_dir);
  return final_dir;
}

envb::SandboxTask load_task_dir(const fs::path& dir) {
  nlohmann::json manifest =
      nlohmann::json::parse(util::read_file(dir / "task.json"));

  envb::SandboxTask task;
  task.task.id = manifest.at("id").get<std::string>();
  task.task.source_skill_id = manifest.value("source_skill_id", "");
  task.task.persona_id = manifest.value("persona_id", "");
  task.task.relevance = synth::Relevance::related;
  task.task.judge_accepted = true;
  std::string instruction = util::read_file(dir / "instruction.md");
  if (!instruction.empty() && instruction.back() == '\n') instruction.pop_back();
  task.task.instruction = instruction;
  task.task.eval_criteria =
      manifest.value("evaluation_criteria", std::vector<std::string>{});
  task.task.guideline = manifest.value("guideline", std::vector<std::string>{});

  std::map<std::string, synth::GenMode> modes;
  for (const auto& f : manifest.value("initial_files", nlohmann::json::array())) {
    auto mode = synth::gen_mode_from_string(f.value("generation_mode", ""));
    modes[f.at("filepath").get<std::string>()] =
        mode.value_or(synth::GenMode::llm_direct);
  }

  fs::path env_dir = dir / "environment";
  for (const auto& entry : fs::recursive_directory_iterator(env_dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), env_dir);
    if (rel == fs::path("setup.sh")) continue;
    envb::FileArtifact artifact;
    artifact.path = unroot(rel);
    artifact.content = util::read_file(entry.path());
    auto it = modes.find(artifact.path);
    artifact.provenance =
        it == modes.end() ? synth::GenMode::llm_direct : it->second;
    task.files.push_back(std::move(artifact));
    task.task.blueprint.files.push_back(
        {task.files.back().path, task.files.back().provenance, "(exported)"});
  }
  std::sort(task.files.begin(), task.files.end(),
            [](const envb::FileArtifact& a, const envb::FileArtifact& b) {
              return a.path < b.path;
            });

  task.setup.commands =
      manifest.value("setup_commands", std::vector<std::string>{});
  task.setup.probe_script =
      manifest.value("probe_script", std::vector<std::string>{});

  task.suite.test_source = util::read_file(dir / "tests" / "test_outputs.py");
  const auto& suite = manifest.value("suite", nlohmann::json::object());
  task.suite.system_packages =
      suite.value("system_packages", std::vector<std::string>{});
  task.suite.python_packages =
      suite.value("python_packages", std::vector<std::string>{});
  for (const auto& p :
       suite.value("helper_paths", std::vector<std::string>{}))
    task.suite.helper_files.emplace_back(p, util::read_file(dir / p));

  task.collected_tests = manifest.value("collected_tests", 0);
  task.files_outcome.status = envb::GvrStatus::accepted;
  task.setup_outcome.status = envb::GvrStatus::accepted;
  task.verifier_outcome.status = envb::GvrStatus::accepted;
  return task;
}

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ValidationReport validate_task_dir(const fs::path& dir,
                                   const sandbox::SandboxProfile& profile) {
  ValidationReport report;
  auto add = [&](std::string name, bool pass, std::string note = "") {
    report.checks.push_back({std::move(name), pass, std::move(note)});
  };

  bool layout = fs::exists(dir / "instruction.md") &&
                fs::exists(dir / "environment" / "setup.sh") &&
                fs::exists(dir / "tests" / "test_outputs.py") &&
                fs::exists(dir / "task.json");
  add("layout", layout, layout ? "" : "missing required entries");
  if (!layout) return report;

  std::string instruction = util::read_file(dir / "instruction.md");
  add("instruction_nonempty", !util::trim(instruction).empty());

  auto bash_check = util::run_process(
      {"/bin/bash", "-n", (dir / "environment" / "setup.sh").string()}, {});
  add("setup_parseable", bash_check.exit_code == 0,
      bash_check.exit_code == 0 ? "" : util::trim(bash_check.output));

  envb::SandboxTask task;
  try {
    task = load_task_dir(dir);
  } catch (const std::exception& e) {
    add("manifest_loadable", false, e.what());
    return report;
  }
  add("manifest_loadable", true);

  // Throwaway session: seed the initial files, run setup, then demand that
  // the verifier collects and fails everywhere on the pre-solution state.
  try {
    std::vector<sandbox::InitialFile> files;
    for (const auto& f : task.files) files.push_back({f.path, f.content});
    auto session = sandbox::create_session(profile, files);
    auto setup = session->run_script(task.setup.commands,
                                     sandbox::ScriptPolicy::fail_fast);
    add("setup_runs", setup.exit_code == 0,
        setup.exit_code == 0 ? "" : fmt::format("exit {}", setup.exit_code));
    int collected = sandbox::collect_pytest(*session, task.suite);
    add("verifier_collectible", collected >= 1,
        fmt::format("{} tests collected", collected));
    auto result = sandbox::run_pytest(*session, task.suite);
    bool reliable = result.collected() >= 1 && result.passed == 0 &&
                    result.errored == 0;
    add("fails_initially", reliable,
        fmt::format("{} passed / {} failed / {} errored on initial state",
                    result.passed, result.failed, result.errored));
    session->close();
  } catch (const std::exception& e) {
    add("sandbox_checks", false, e.what());
  }
  return report;
}

}  // namespace skillforge::pipeline
