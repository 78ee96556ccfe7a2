#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "skillforge/pipeline/harbor.hpp"
#include "skillforge/pipeline/run.hpp"
#include "skillforge/util/fs.hpp"
#include "skillforge/util/tree_hash.hpp"

namespace fs = std::filesystem;
using namespace skillforge;
using namespace skillforge::pipeline;

namespace {

envb::SandboxTask tiny_task() {
  envb::SandboxTask task;
  task.task.id = "tiny-task";
  task.task.relevance = synth::Relevance::related;
  task.task.instruction = "Write 42 to /app/answer.txt.";
  task.task.eval_criteria = {"/app/answer.txt contains 42"};
  task.task.guideline = {"Step 1: echo 42 > /app/answer.txt -- verify."};
  task.files.push_back(
      {"/app/seed.txt", "seed\n", synth::GenMode::llm_direct, {}});
  task.setup.commands = {"cd /app", "true"};
  task.suite.test_source =
      "def test_answer():\n"
      "    assert open('/app/answer.txt').read().strip() == '42'\n";
  task.collected_tests = 1;
  task.files_outcome = {envb::ArtifactKind::files, envb::GvrStatus::accepted, 1, {}};
  task.setup_outcome = {envb::ArtifactKind::setup, envb::GvrStatus::accepted, 1, {}};
  task.verifier_outcome = {envb::ArtifactKind::verifier,
                           envb::GvrStatus::accepted, 2, {}};
  return task;
}

PipelineConfig fixture_config(const fs::path& output_root) {
  PipelineConfig config;
  config.run_id = "t";
  config.output_root = output_root;
  config.corpus_dir = std::string(SKF_FIXTURE_DIR) + "/corpus";
  config.personas_file = std::string(SKF_FIXTURE_DIR) + "/personas.jsonl";
  config.scripted_dir = fs::path(std::string(SKF_FIXTURE_DIR) + "/scripts");
  config.seed = 42;
  config.backends = {{"task_gen", "scripted"}, {"env_build", "scripted"},
                     {"trajectory", "scripted"}, {"judge", "scripted"},
                     {"other", "scripted"}};
  config.prices["scripted"] = {1'000'000, 2'000'000};
  config.rollout.max_steps = 20;
  config.rollout.episode_budget_s = 300;
  config.sandbox_profile.limits.command_timeout_s = 60;
  return config;
}

}  // namespace

TEST_CASE("export_task_dir writes the Harbor layout and is idempotent") {
  fs::path parent = util::make_temp_dir("harbor");
  auto task = tiny_task();
  fs::path dir = export_task_dir(task, parent, "single");

  CHECK(fs::exists(dir / "instruction.md"));
  CHECK(fs::exists(dir / "environment" / "seed.txt"));
  CHECK(fs::exists(dir / "environment" / "setup.sh"));
  CHECK(fs::exists(dir / "tests" / "test_outputs.py"));
  CHECK(fs::exists(dir / "task.json"));
  CHECK(util::read_file(dir / "environment" / "seed.txt") == "seed\n");

  std::string setup_sh = util::read_file(dir / "environment" / "setup.sh");
  CHECK(setup_sh.find("#!/usr/bin/env bash") == 0);
  CHECK(setup_sh.find("set -euxo pipefail") != std::string::npos);

  std::string hash1 = util::hash_tree(dir);
  export_task_dir(task, parent, "single");  // re-export
  CHECK(util::hash_tree(dir) == hash1);

  SUBCASE("round-trips through load_task_dir") {
    auto loaded = load_task_dir(dir);
    CHECK(loaded.task.id == task.task.id);
    CHECK(loaded.task.instruction == task.task.instruction);
    REQUIRE(loaded.files.size() == 1);
    CHECK(loaded.files[0].path == "/app/seed.txt");
    CHECK(loaded.files[0].content == "seed\n");
    CHECK(loaded.setup.commands == task.setup.commands);
    CHECK(loaded.suite.test_source == task.suite.test_source);
    CHECK(loaded.collected_tests == 1);
  }
  SUBCASE("missing verifier is a precondition error") {
    auto broken = tiny_task();
    broken.suite.test_source.clear();
    CHECK_THROWS_AS(export_task_dir(broken, parent, "single"),
                    std::logic_error);
  }
  fs::remove_all(parent);
}

TEST_CASE("validate_task_dir") {
  fs::path parent = util::make_temp_dir("validate");
  sandbox::SandboxProfile profile;

  SUBCASE("freshly exported fixture passes every check") {
    fs::path dir = export_task_dir(tiny_task(), parent, "single");
    auto report = validate_task_dir(dir, profile);
    for (const auto& check : report.checks)
      INFO(check.name, ": ", check.note);
    CHECK(report.all_pass());
  }
  SUBCASE("missing tests/ fails the layout check") {
    fs::path dir = export_task_dir(tiny_task(), parent, "single");
    fs::remove_all(dir / "tests");
    auto report = validate_task_dir(dir, profile);
    CHECK_FALSE(report.all_pass());
    CHECK(report.checks[0].name == "layout");
    CHECK_FALSE(report.checks[0].pass);
  }
  SUBCASE("verifier passing on the initial state fails reliability") {
    auto vacuous = tiny_task();
    vacuous.suite.test_source =
        "import os\n"
        "def test_seed():\n    assert os.path.exists('/app/seed.txt')\n";
    fs::path dir = export_task_dir(vacuous, parent, "single");
    auto report = validate_task_dir(dir, profile);
    CHECK_FALSE(report.all_pass());
    bool reliability_failed = false;
    for (const auto& check : report.checks)
      if (check.name == "fails_initially" && !check.pass)
        reliability_failed = true;
    CHECK(reliability_failed);
  }
  fs::remove_all(parent);
}

TEST_CASE("config loading rejects unknown keys") {
  CHECK_THROWS_AS(config_from_json({{"run_id", "x"}, {"tyop", 1}}),
                  std::invalid_argument);
  auto c = config_from_json({{"run_id", "x"}, {"seed", 7}});
  CHECK(c.run_id == "x");
  CHECK(c.seed == 7);
  CHECK(c.gvr_budget == 3);  // T defaults to 3
}

TEST_CASE("scripted fixture run: counts conserve and chain across stages") {
  fs::path root = util::make_temp_dir("pipe");
  auto manifest = run(fixture_config(root));

  REQUIRE(manifest.stages.size() == 6);
  for (const auto& row : manifest.stages) {
    INFO(row.name);
    CHECK(row.inputs + row.added == row.accepted + row.dropped);
  }
  for (size_t i = 1; i < manifest.stages.size(); ++i)
    CHECK(manifest.stages[i].inputs == manifest.stages[i - 1].accepted);

  CHECK(manifest.stages[0].name == "collect");
  CHECK(manifest.stages[0].inputs == 3);
  CHECK(manifest.stages[1].added == 2);  // one team, one graph
  CHECK(manifest.stages[2].accepted == 1);
  CHECK(manifest.stages[3].accepted == 1);
  CHECK(manifest.build_success_rate == "100.0");

  // No partially written task directory is ever visible.
  for (const auto& entry : fs::directory_iterator(root / "t" / "tasks"))
    CHECK(entry.path().string().find(".tmp") == std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("kill-and-resume: resumed run completes pending items byte-identically") {
  fs::path fresh_root = util::make_temp_dir("pipe-fresh");
  fs::path resumed_root = util::make_temp_dir("pipe-resume");

  // Uninterrupted reference run.
  run(fixture_config(fresh_root));

  // Interrupted run: stop after synthesize, then resume the full pipeline.
  auto partial = fixture_config(resumed_root);
  partial.stages = {true, true, true, false, false, false};
  run(partial);
  CHECK(fs::exists(resumed_root / "t" / "checkpoints" / "synthesize.jsonl"));
  auto manifest = run(fixture_config(resumed_root));
  CHECK(manifest.stages.size() == 6);

  for (const char* sub : {"tasks", "exports", "trajectories"}) {
    INFO(sub);
    CHECK(util::hash_tree(fresh_root / "t" / sub) ==
          util::hash_tree(resumed_root / "t" / sub));
  }
  CHECK(util::read_file(fresh_root / "t" / "ledger.json") ==
        util::read_file(resumed_root / "t" / "ledger.json"));
  fs::remove_all(fresh_root);
  fs::remove_all(resumed_root);
}
