#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "skillforge/envb/gvr.hpp"
#include "skillforge/envb/stages.hpp"
#include "skillforge/gateway/gateway.hpp"

using namespace skillforge;
using namespace skillforge::envb;
using nlohmann::json;

namespace {

synth::TaskSpec merge_task() {
  synth::TaskSpec task;
  task.id = "merge-task";
  task.relevance = synth::Relevance::related;
  task.instruction =
      "Merge /app/quiz_data.json and /app/gradebook.csv into "
      "/app/merged_students.csv and write /app/conflicts.json.";
  task.blueprint.files = {
      {"/app/quiz_data.json", synth::GenMode::llm_direct,
       "JSON array of students"},
      {"/app/gradebook.csv", synth::GenMode::llm_direct, "CSV gradebook"},
  };
  task.blueprint.setup_steps = {"Verify python3 is available."};
  task.eval_criteria = {"merged_students.csv exists"};
  return task;
}

std::string direct_response(const std::string& path, const std::string& body) {
  json j = {{"filepath", path}, {"content", body}};
  return "Generated.\n\n```json\n" + j.dump() + "\n```";
}

std::string finalize_pass() {
  return json{{"analysis", "ok"},
              {"status", "finalize"},
              {"result",
               {{"overall_verdict", "pass"},
                {"file_findings", json::array()},
                {"global_findings", json::array()}}}}
      .dump();
}

std::string finalize_fail_on(const std::string& path) {
  return json{{"analysis", "bad file"},
              {"status", "finalize"},
              {"result",
               {{"overall_verdict", "fail"},
                {"file_findings",
                 {{{"filepath", path},
                   {"reason", "content malformed"},
                   {"repair_instructions", "regenerate with 4 rows"}}}},
                {"global_findings", json::array()}}}}
      .dump();
}

std::unique_ptr<sandbox::Session> fresh_session() {
  return sandbox::create_session({}, {});
}

// Counts reset calls; everything else forwards.
class ResetCountingSession : public sandbox::Session {
 public:
  explicit ResetCountingSession(std::unique_ptr<sandbox::Session> inner)
      : inner_(std::move(inner)) {}
  int resets = 0;

  const std::string& id() const override { return inner_->id(); }
  const sandbox::SandboxProfile& profile() const override {
    return inner_->profile();
  }
  sandbox::SessionState state() const override { return inner_->state(); }
  void write_file(const std::string& p, std::string_view c) override {
    inner_->write_file(p, c);
  }
  std::string read_file(const std::string& p) override {
    return inner_->read_file(p);
  }
  bool exists(const std::string& p) override { return inner_->exists(p); }
  sandbox::ExecResult run_script(const std::vector<std::string>& l,
                                 sandbox::ScriptPolicy p) override {
    return inner_->run_script(l, p);
  }
  std::string send_keys(const std::string& k, double d) override {
    return inner_->send_keys(k, d);
  }
  std::string screen() override { return inner_->screen(); }
  std::vector<int> drain_exit_statuses() override {
    return inner_->drain_exit_statuses();
  }
  void snapshot(const std::string& n) override { inner_->snapshot(n); }
  void reset(const std::string& n) override {
    ++resets;
    inner_->reset(n);
  }
  bool has_snapshot(const std::string& n) const override {
    return inner_->has_snapshot(n);
  }
  std::string tree_hash() override { return inner_->tree_hash(); }
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<sandbox::Session> inner_;
};

}  // namespace

TEST_CASE("gvr call-count law over every pass/fail sequence and budget") {
  // Sequence bit i = verify call i passes. Length covers budgets 0..3.
  for (int budget = 0; budget <= 3; ++budget) {
    for (unsigned mask = 0; mask < (1u << (budget + 1)); ++mask) {
      int verify_calls = 0, repair_calls = 0, generate_calls = 0;
      int artifact = 0;
      auto outcome = gvr_run<int>(
          ArtifactKind::files, budget,
          [&] {
            ++generate_calls;
            return 0;
          },
          [&](int&) {
            bool pass = mask & (1u << verify_calls);
            ++verify_calls;
            return VerifyReport{pass, pass ? std::vector<VerifyFinding>{}
                                           : std::vector<VerifyFinding>{{}}};
          },
          [&](int x, const std::vector<VerifyFinding>&) {
            ++repair_calls;
            return x + 1;
          },
          artifact);

      int first_pass = -1;
      for (int t = 0; t <= budget; ++t)
        if (mask & (1u << t)) {
          first_pass = t;
          break;
        }

      CHECK(generate_calls == 1);
      if (first_pass >= 0) {
        CHECK(outcome.status == GvrStatus::accepted);
        CHECK(outcome.attempts_used == first_pass + 1);
        CHECK(verify_calls == outcome.attempts_used);
        CHECK(repair_calls == outcome.attempts_used - 1);
      } else {
        // Discard happens precisely when all budget+1 verifies fail.
        CHECK(outcome.status == GvrStatus::discarded);
        CHECK(outcome.attempts_used == budget + 1);
        CHECK(verify_calls == budget + 1);
        CHECK(repair_calls == budget);
      }
      CHECK(outcome.findings_history.size() ==
            static_cast<size_t>(verify_calls));
    }
  }
}

TEST_CASE("gvr spot checks from the contract") {
  int artifact = 0;
  SUBCASE("verify passes immediately: repair never called") {
    int repairs = 0;
    auto outcome = gvr_run<int>(
        ArtifactKind::setup, 3, [] { return 1; },
        [](int&) { return VerifyReport{true, {}}; },
        [&](int x, const std::vector<VerifyFinding>&) {
          ++repairs;
          return x;
        },
        artifact);
    CHECK(outcome.status == GvrStatus::accepted);
    CHECK(outcome.attempts_used == 1);
    CHECK(repairs == 0);
  }
  SUBCASE("always failing: exactly 4 verifies and 3 repairs at T=3") {
    int verifies = 0, repairs = 0;
    auto outcome = gvr_run<int>(
        ArtifactKind::verifier, 3, [] { return 1; },
        [&](int&) {
          ++verifies;
          return VerifyReport{false, {{}}};
        },
        [&](int x, const std::vector<VerifyFinding>&) {
          ++repairs;
          return x;
        },
        artifact);
    CHECK(outcome.status == GvrStatus::discarded);
    CHECK(verifies == 4);
    CHECK(repairs == 3);
  }
  SUBCASE("fail, fail, pass: accepted with attempts_used 3") {
    int verifies = 0, repairs = 0;
    auto outcome = gvr_run<int>(
        ArtifactKind::files, 3, [] { return 1; },
        [&](int&) {
          ++verifies;
          return VerifyReport{verifies == 3, verifies == 3
                                                 ? std::vector<VerifyFinding>{}
                                                 : std::vector<VerifyFinding>{{}}};
        },
        [&](int x, const std::vector<VerifyFinding>&) {
          ++repairs;
          return x;
        },
        artifact);
    CHECK(outcome.status == GvrStatus::accepted);
    CHECK(outcome.attempts_used == 3);
    CHECK(repairs == 2);
  }
}

TEST_CASE("llm_direct generation writes the artifact byte-exact") {
  auto session = fresh_session();
  gateway::LlmGateway gw;
  gw.register_script(
      "b", {{"env_build", direct_response("/app/quiz_data.json", "[1, 2]\n"), {}}});
  EnvBuildConfig config;
  config.backend_id = "b";
  FileStage stage(gw, make_tool_registry(nullptr), config);

  auto task = merge_task();
  auto artifact = stage.generate_file(task.blueprint.files[0], task, {}, *session);
  CHECK(artifact.path == "/app/quiz_data.json");
  CHECK(artifact.content == "[1, 2]\n");
  CHECK(session->read_file("/app/quiz_data.json") == "[1, 2]\n");
  session->close();
}

TEST_CASE("llm_direct path mismatch is fatal") {
  auto session = fresh_session();
  gateway::LlmGateway gw;
  gw.register_script(
      "b", {{"env_build", direct_response("/app/other.json", "{}"), {}}});
  EnvBuildConfig config;
  config.backend_id = "b";
  FileStage stage(gw, make_tool_registry(nullptr), config);
  auto task = merge_task();
  CHECK_THROWS_AS(
      stage.generate_file(task.blueprint.files[0], task, {}, *session),
      PathMismatch);
  session->close();
}

TEST_CASE("local_tool generation drives the python executor") {
  auto session = fresh_session();
  gateway::LlmGateway gw;
  gateway::ToolCall call;
  call.tool_name = "python";
  call.arguments = {{"target_filepath", "/app/made.txt"},
                    {"code", "open('/app/made.txt', 'w').write('made-by-tool')"}};
  gw.register_script("b", {{"env_build", "", {call}}});
  EnvBuildConfig config;
  config.backend_id = "b";
  FileStage stage(gw, make_tool_registry(nullptr), config);

  synth::TaskSpec task = merge_task();
  synth::FileSpec spec{"/app/made.txt", synth::GenMode::local_tool, "marker"};
  auto artifact = stage.generate_file(spec, task, {}, *session);
  CHECK(artifact.content == "made-by-tool");
  REQUIRE(artifact.generator_log.size() == 1);
  CHECK(artifact.generator_log[0].tool_name == "python");
  session->close();
}

TEST_CASE("local_tool target mismatch is a PathMismatch") {
  auto session = fresh_session();
  gateway::LlmGateway gw;
  gateway::ToolCall call;
  call.tool_name = "python";
  call.arguments = {{"target_filepath", "/app/elsewhere.txt"},
                    {"code", "print('hi')"}};
  gw.register_script("b", {{"env_build", "", {call}}});
  FileStage stage(gw, make_tool_registry(nullptr),
                  EnvBuildConfig{"b", 3, 8, 10, 12});
  synth::TaskSpec task = merge_task();
  synth::FileSpec spec{"/app/made.txt", synth::GenMode::local_tool, "marker"};
  CHECK_THROWS_AS(stage.generate_file(spec, task, {}, *session), PathMismatch);
  session->close();
}

TEST_CASE("remote_fetch generation via the fixture stub") {
  auto fetch = std::make_shared<FixtureFetchExecutor>();
  fetch->add_search_result("dataset", "https://example.test/data.csv");
  fetch->add_page("https://example.test/data.csv", "h1,h2\n1,2\n");
  auto registry = make_tool_registry(fetch);

  auto make_call = [](const std::string& tool, json args) {
    gateway::ToolCall c;
    c.tool_name = tool;
    c.arguments = std::move(args);
    return c;
  };

  synth::TaskSpec task = merge_task();
  synth::FileSpec spec{"/app/data.csv", synth::GenMode::remote_fetch,
                       "public dataset"};

  SUBCASE("search, fetch, download in separate turns") {
    gateway::LlmGateway gw;
    gw.register_script(
        "b",
        {{"env_build", "", {make_call("web_search", {{"query", "the dataset"}})}},
         {"env_build", "",
          {make_call("fetch_page", {{"url", "https://example.test/data.csv"},
                                    {"mode", "http"}})}},
         {"env_build", "",
          {make_call("download_file",
                     {{"url", "https://example.test/data.csv"},
                      {"save_as", "/app/data.csv"}})}}});
    auto session = fresh_session();
    FileStage stage(gw, registry, EnvBuildConfig{"b", 3, 8, 10, 12});
    auto artifact = stage.generate_file(spec, task, {}, *session);
    CHECK(artifact.content == "h1,h2\n1,2\n");
    CHECK(artifact.generator_log.size() == 3);
    session->close();
  }
  SUBCASE("save_as must match the requested path exactly") {
    gateway::LlmGateway gw;
    gw.register_script(
        "b", {{"env_build", "",
               {make_call("download_file",
                          {{"url", "https://example.test/data.csv"},
                           {"save_as", "/app/wrong.csv"}})}}});
    auto session = fresh_session();
    FileStage stage(gw, registry, EnvBuildConfig{"b", 3, 8, 10, 12});
    CHECK_THROWS_AS(stage.generate_file(spec, task, {}, *session), PathMismatch);
    session->close();
  }
  SUBCASE("unknown url fails the fetch") {
    gateway::LlmGateway gw;
    gw.register_script(
        "b", {{"env_build", "",
               {make_call("download_file", {{"url", "https://nope.test/x"},
                                            {"save_as", "/app/data.csv"}})}}});
    auto session = fresh_session();
    FileStage stage(gw, registry, EnvBuildConfig{"b", 3, 8, 10, 12});
    CHECK_THROWS_AS(stage.generate_file(spec, task, {}, *session), FetchFailed);
    session->close();
  }
  SUBCASE("turn budget exhausts") {
    gateway::LlmGateway gw;
    std::vector<gateway::ScriptEntry> entries;
    for (int i = 0; i < 4; ++i)
      entries.push_back({"env_build", "",
                         {make_call("web_search", {{"query", "dataset"}})}});
    gw.register_script("b", entries);
    auto session = fresh_session();
    EnvBuildConfig cfg{"b", 3, 8, 10, 12};
    cfg.remote_fetch_turns = 3;
    FileStage stage(gw, registry, cfg);
    CHECK_THROWS_AS(stage.generate_file(spec, task, {}, *session),
                    TurnBudgetExceeded);
    session->close();
  }
}

TEST_CASE("verify_files protocol") {
  auto task = merge_task();
  std::vector<FileArtifact> files = {
      {"/app/quiz_data.json", "[]", synth::GenMode::llm_direct, {}},
      {"/app/gradebook.csv", "id\n", synth::GenMode::llm_direct, {}}};
  auto write_files = [&](sandbox::Session& s) {
    for (const auto& f : files) s.write_file(f.path, f.content);
  };

  SUBCASE("finalize pass with empty arrays") {
    auto session = fresh_session();
    write_files(*session);
    gateway::LlmGateway gw;
    gw.register_script("b", {{"env_build", finalize_pass(), {}}});
    FileStage stage(gw, make_tool_registry(nullptr),
                    EnvBuildConfig{"b", 3, 8, 10, 12});
    auto report = stage.verify_files(files, task, *session);
    CHECK(report.pass);
    CHECK(report.findings.empty());
    session->close();
  }
  SUBCASE("continue turns execute inspection commands read-only") {
    auto session = fresh_session();
    write_files(*session);
    gateway::LlmGateway gw;
    gw.register_script(
        "b", {{"env_build",
               json{{"analysis", "look"},
                    {"status", "continue"},
                    {"commands", {"echo PROBE > /app/mutation.txt",
                                  "cat /app/quiz_data.json"}}}.dump(),
               {}},
              {"env_build", finalize_pass(), {}}});
    FileStage stage(gw, make_tool_registry(nullptr),
                    EnvBuildConfig{"b", 3, 8, 10, 12});
    auto report = stage.verify_files(files, task, *session);
    CHECK(report.pass);
    // The inspection wrote a file; the session must come back clean.
    CHECK_FALSE(session->exists("/app/mutation.txt"));
    session->close();
  }
  SUBCASE("pass with non-empty findings violates; one re-ask recovers") {
    auto session = fresh_session();
    write_files(*session);
    std::string inconsistent =
        json{{"analysis", "x"},
             {"status", "finalize"},
             {"result",
              {{"overall_verdict", "pass"},
               {"file_findings",
                {{{"filepath", "/app/quiz_data.json"},
                  {"reason", "r"},
                  {"repair_instructions", "ri"}}}},
               {"global_findings", json::array()}}}}
            .dump();
    gateway::LlmGateway gw;
    gw.register_script("b", {{"env_build", inconsistent, {}},
                             {"env_build", finalize_pass(), {}}});
    FileStage stage(gw, make_tool_registry(nullptr),
                    EnvBuildConfig{"b", 3, 8, 10, 12});
    auto report = stage.verify_files(files, task, *session);
    CHECK(report.pass);
    CHECK(gw.script_positions().at("b/env_build") == 2);
    session->close();
  }
  SUBCASE("two protocol violations abort") {
    auto session = fresh_session();
    write_files(*session);
    gateway::LlmGateway gw;
    gw.register_script("b", {{"env_build", "not json", {}},
                             {"env_build", "still not json", {}}});
    FileStage stage(gw, make_tool_registry(nullptr),
                    EnvBuildConfig{"b", 3, 8, 10, 12});
    CHECK_THROWS_AS(stage.verify_files(files, task, *session),
                    ProtocolViolation);
    session->close();
  }
  SUBCASE("turn budget exhaustion fails with an unattributed finding") {
    auto session = fresh_session();
    write_files(*session);
    std::string keep_going =
        json{{"analysis", "more"},
             {"status", "continue"},
             {"commands", {"true"}}}.dump();
    gateway::LlmGateway gw;
    std::vector<gateway::ScriptEntry> entries;
    for (int i = 0; i < 3; ++i) entries.push_back({"env_build", keep_going, {}});
    gw.register_script("b", entries);
    EnvBuildConfig cfg{"b", 3, 8, 10, 12};
    cfg.verify_turns = 3;
    FileStage stage(gw, make_tool_registry(nullptr), cfg);
    auto report = stage.verify_files(files, task, *session);
    CHECK_FALSE(report.pass);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].primary_owner == FindingOwner::unattributed);
    session->close();
  }
}

TEST_CASE("file stage repair routes findings to the owning generator") {
  auto task = merge_task();
  gateway::LlmGateway gw;
  gw.register_script(
      "b",
      {// initial generation of both files
       {"env_build", direct_response("/app/quiz_data.json", "bad content"), {}},
       {"env_build", direct_response("/app/gradebook.csv", "id,name\n"), {}},
       // verify #1 fails on quiz_data.json only
       {"env_build", finalize_fail_on("/app/quiz_data.json"), {}},
       // repair regenerates only that file
       {"env_build", direct_response("/app/quiz_data.json", "good content"), {}},
       // verify #2 passes
       {"env_build", finalize_pass(), {}}});
  auto session = fresh_session();
  FileStage stage(gw, make_tool_registry(nullptr),
                  EnvBuildConfig{"b", 3, 8, 10, 12});
  std::vector<FileArtifact> artifacts;
  auto outcome = stage.run(task, *session, artifacts);
  CHECK(outcome.status == GvrStatus::accepted);
  CHECK(outcome.attempts_used == 2);
  REQUIRE(artifacts.size() == 2);
  CHECK(artifacts[0].content == "good content");
  CHECK(artifacts[1].content == "id,name\n");  // untouched by repair
  CHECK(session->read_file("/app/quiz_data.json") == "good content");
  session->close();
}

TEST_CASE("setup script extraction and the pre-seeded write gate") {
  auto task = merge_task();
  std::vector<FileArtifact> preseeded = {
      {"/app/quiz_data.json", "[]", synth::GenMode::llm_direct, {}}};
  gateway::LlmGateway gw;
  EnvBuildConfig cfg{"b", 3, 8, 10, 12};

  SUBCASE("final bash fence parsed, header lines stripped") {
    gw.register_script(
        "b", {{"env_build",
               "Setup plan.\n\n```bash\n#!/usr/bin/env bash\nset -euxo "
               "pipefail\ncd /app\n\nsudo -E pip install pandas pyarrow\n```\n",
               {}}});
    SetupStage stage(gw, cfg);
    auto script = stage.build_setup_script(task, preseeded);
    REQUIRE(script.commands.size() == 2);
    CHECK(script.commands[0] == "cd /app");
    CHECK(script.commands[1] == "sudo -E pip install pandas pyarrow");
  }
  SUBCASE("no bash fence") {
    gw.register_script("b", {{"env_build", "no fence here", {}}});
    SetupStage stage(gw, cfg);
    CHECK_THROWS_AS(stage.build_setup_script(task, preseeded), NoBashBlock);
  }
  SUBCASE("redirection into a pre-seeded path") {
    gw.register_script(
        "b", {{"env_build",
               "```bash\necho x > /app/quiz_data.json\n```", {}}});
    SetupStage stage(gw, cfg);
    CHECK_THROWS_AS(stage.build_setup_script(task, preseeded),
                    PreseededOverwrite);
  }
}

TEST_CASE("find_preseeded_write covers the documented command shapes") {
  std::vector<std::string> paths = {"/app/data.csv"};
  auto hit = [&](const std::string& cmd) {
    return find_preseeded_write(cmd, paths).has_value();
  };
  CHECK(hit("echo x > /app/data.csv"));
  CHECK(hit("echo x >> /app/data.csv"));
  CHECK(hit("cp other.csv /app/data.csv"));
  CHECK(hit("mv tmp.csv /app/data.csv"));
  CHECK(hit("curl -o /app/data.csv https://x.test"));
  CHECK(hit("wget -O /app/data.csv https://x.test"));
  CHECK(hit("dd if=/dev/zero of=/app/data.csv"));
  CHECK(hit("cat src | tee /app/data.csv"));
  CHECK_FALSE(hit("cat /app/data.csv"));
  CHECK_FALSE(hit("echo x > /app/other.csv"));
  CHECK_FALSE(hit("cp /app/data.csv /tmp/copy.csv"));  // source, not target
}

TEST_CASE("split_command_entries keeps heredocs and continuations intact") {
  std::string block =
      "#!/usr/bin/env bash\n"
      "set -euxo pipefail\n"
      "# comment\n"
      "cat > /app/cfg <<EOF\nline1\nline2\nEOF\n"
      "echo a \\\n  b\n"
      "true\n";
  auto entries = split_command_entries(block);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == "cat > /app/cfg <<EOF\nline1\nline2\nEOF");
  CHECK(entries[1] == "echo a \\\n  b");
  CHECK(entries[2] == "true");
}

TEST_CASE("setup stage: execute fail-fast, probe without fail-fast, repair in a fresh sandbox") {
  auto task = merge_task();
  std::vector<FileArtifact> preseeded;

  // Attempt 1: setup ok, one probe fails. Repair regenerates the FULL list;
  // attempt 2 passes. Every verify resets to post_files first.
  gateway::LlmGateway gw;
  gw.register_script(
      "b",
      {{"env_build", "```bash\necho ready > /app/marker.txt\n```", {}},
       {"env_build",
        "```bash\ntest -f /app/marker.txt\ntest -f /app/absent.txt\n```", {}},
       {"env_build", "```bash\necho ready > /app/marker.txt\ntouch "
                     "/app/absent.txt\n```", {}},
       {"env_build",
        "```bash\ntest -f /app/marker.txt\ntest -f /app/absent.txt\n```", {}}});

  auto wrapped = std::make_unique<ResetCountingSession>(fresh_session());
  auto* counter = wrapped.get();
  wrapped->snapshot("post_files");

  EnvBuildConfig cfg{"b", 3, 8, 10, 12};
  SetupStage stage(gw, cfg);
  SetupScript script;
  auto outcome = stage.run(task, preseeded, *wrapped, script);
  CHECK(outcome.status == GvrStatus::accepted);
  CHECK(outcome.attempts_used == 2);
  CHECK(counter->resets == 2);  // one fresh sandbox per verify attempt
  REQUIRE(script.commands.size() == 2);
  CHECK(script.probe_script.size() == 2);
  CHECK(wrapped->exists("/app/absent.txt"));
  wrapped->close();
}

TEST_CASE("verifier suite generation and normalization") {
  auto task = merge_task();
  std::vector<FileArtifact> files;
  SetupScript setup;
  EnvBuildConfig cfg{"b", 3, 8, 10, 12};

  SUBCASE("well-formed JSON parses; helper paths normalize under tests/") {
    gateway::LlmGateway gw;
    gw.register_script(
        "b", {{"env_build",
               json{{"system_packages", json::array()},
                    {"python_packages", {"requests"}},
                    {"helper_files",
                     {{{"path", "foo.csv"}, {"content", "a,b"}},
                      {{"path", "tests/bar.txt"}, {"content", "x"}}}},
                    {"test_outputs_py", "def test_output_files_exist():\n    pass\n"}}
                   .dump(),
               {}}});
    VerifierStage stage(gw, cfg);
    auto suite = stage.generate_verifier_suite(task, files, setup);
    CHECK(suite.test_source.find("test_output_files_exist") !=
          std::string::npos);
    REQUIRE(suite.helper_files.size() == 2);
    CHECK(suite.helper_files[0].first == "tests/foo.csv");
    CHECK(suite.helper_files[1].first == "tests/bar.txt");
    CHECK(suite.python_packages == std::vector<std::string>{"requests"});
  }
  SUBCASE("missing test_outputs_py: MalformedSuiteJSON after one re-ask") {
    gateway::LlmGateway gw;
    std::string bad = json{{"system_packages", json::array()},
                           {"python_packages", json::array()},
                           {"helper_files", json::array()}}
                          .dump();
    gw.register_script("b", {{"env_build", bad, {}}, {"env_build", bad, {}}});
    VerifierStage stage(gw, cfg);
    CHECK_THROWS_AS(stage.generate_verifier_suite(task, files, setup),
                    MalformedSuiteJSON);
    CHECK(gw.script_positions().at("b/env_build") == 2);
  }
}

TEST_CASE("verifier gate: executability and the must-fail-initially rule") {
  auto session = fresh_session();
  session->write_file("/app/seed.txt", "seed");
  session->snapshot("post_setup");
  gateway::LlmGateway gw;
  VerifierStage stage(gw, EnvBuildConfig{"b", 3, 8, 10, 12});

  SUBCASE("suite probing agent outputs fails everywhere: gate passes") {
    VerifierSuite suite;
    suite.test_source =
        "import os\n"
        "def test_made_output():\n    assert os.path.exists('/app/out.txt')\n";
    auto gate = stage.gate_verifier_suite(suite, *session);
    CHECK(gate.executable);
    CHECK(gate.all_fail_initially);
    CHECK(gate.pass());
    CHECK(gate.collected == 1);
  }
  SUBCASE("vacuous pass on a pre-seeded file is rejected") {
    VerifierSuite suite;
    suite.test_source =
        "import os\n"
        "def test_seed():\n    assert os.path.exists('/app/seed.txt')\n"
        "def test_out():\n    assert os.path.exists('/app/out.txt')\n";
    auto gate = stage.gate_verifier_suite(suite, *session);
    CHECK(gate.executable);
    CHECK_FALSE(gate.all_fail_initially);
    REQUIRE(gate.findings.size() == 1);
    CHECK(gate.findings[0].reason.find("vacuous pass") != std::string::npos);
    CHECK(gate.findings[0].reason.find("test_seed") != std::string::npos);
  }
  SUBCASE("import error fails executability") {
    VerifierSuite suite;
    suite.test_source = "import not_a_real_module_xyz\n"
                        "def test_x():\n    assert False\n";
    auto gate = stage.gate_verifier_suite(suite, *session);
    CHECK_FALSE(gate.executable);
    CHECK_FALSE(gate.pass());
  }
  session->close();
}
