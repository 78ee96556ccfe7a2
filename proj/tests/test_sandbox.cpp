#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "skillforge/sandbox/keystrokes.hpp"
#include "skillforge/sandbox/pytest.hpp"
#include "skillforge/sandbox/session.hpp"

using namespace skillforge;
using namespace skillforge::sandbox;

namespace {

SandboxProfile local_profile(double command_timeout = 60.0) {
  SandboxProfile profile;
  profile.driver = DriverKind::local_process;
  profile.limits.command_timeout_s = command_timeout;
  return profile;
}

// The driver contract suite. Runs unchanged against any driver.
void run_contract_suite(const SandboxProfile& profile) {
  {  // create with initial files + snapshot
    auto session = create_session(
        profile, {{"/app/data.txt", "alpha\n"}, {"/tests/fixture.txt", "beta"}});
    CHECK(session->read_file("/app/data.txt") == "alpha\n");
    CHECK(session->read_file("/tests/fixture.txt") == "beta");
    CHECK(session->has_snapshot("initial"));
    CHECK(session->state() == SessionState::fresh);

    // write, reset, hash equality with the creation-time tree
    std::string initial_hash = session->tree_hash();
    session->write_file("/app/extra.txt", "x");
    CHECK(session->tree_hash() != initial_hash);
    session->reset("initial");
    CHECK_FALSE(session->exists("/app/extra.txt"));
    CHECK(session->tree_hash() == initial_hash);
    session->reset("initial");  // idempotent
    CHECK(session->tree_hash() == initial_hash);
    CHECK_THROWS_AS(session->reset("nope"), UnknownSnapshot);
    session->close();
    CHECK_THROWS_AS(session->read_file("/app/data.txt"), SessionClosed);
  }

  {  // fail_fast vs run_all
    auto session = create_session(profile, {});
    auto ff = session->run_script({"true", "false", "echo x"},
                                  ScriptPolicy::fail_fast);
    CHECK(ff.exit_code == 1);
    CHECK(ff.per_line_codes == std::vector<int>{0, 1});
    CHECK(ff.output.find("x\n") == std::string::npos);

    auto ra = session->run_script({"true", "false", "echo x"},
                                  ScriptPolicy::run_all);
    CHECK(ra.per_line_codes == std::vector<int>{0, 1, 0});
    CHECK(ra.exit_code == 1);
    CHECK(ra.output.find("x") != std::string::npos);
    session->close();
  }

  {  // poll idiom and keystrokes
    auto session = create_session(profile, {{"/app/hello.txt", "hi"}});
    std::string idle = session->send_keys("", 0.6);  // no input sent
    std::string screen = session->send_keys("ls -la /app\n", 1.0);
    CHECK(screen.find("hello.txt") != std::string::npos);
    session->close();
  }
}

}  // namespace

TEST_CASE("keystroke decode table is exact") {
  CHECK(decode_keystrokes("C-c") == std::string("\x03"));
  CHECK(decode_keystrokes("C-d") == std::string("\x04"));
  CHECK(decode_keystrokes("ls -la\n") == "ls -la\n");
  CHECK(decode_keystrokes("C-c\n") == std::string("\x03\n"));
  CHECK(decode_keystrokes("echo C--c\n") == "echo C-c\n");  // escaped literal
}

TEST_CASE("decode(encode(x)) == x over random byte strings") {
  std::mt19937_64 rng(5);
  const char alphabet[] = {'a', 'C', '-', 'c', 'd', '\n', '\x03', '\x04', ' '};
  for (int iter = 0; iter < 2000; ++iter) {
    std::string bytes;
    size_t n = rng() % 24;
    for (size_t i = 0; i < n; ++i)
      bytes += alphabet[rng() % sizeof(alphabet)];
    CHECK(decode_keystrokes(encode_keystrokes(bytes)) == bytes);
  }
}

TEST_CASE("local driver satisfies the session contract") {
  run_contract_suite(local_profile());
}

TEST_CASE("container driver satisfies the same contract when available") {
  if (!container_driver_available()) {
    MESSAGE("docker unavailable; container contract suite skipped");
    return;
  }
  SandboxProfile profile;
  profile.driver = DriverKind::container;
  run_contract_suite(profile);
}

TEST_CASE("confinement: paths outside the standard dirs are rejected") {
  auto session = create_session(local_profile(), {});
  CHECK_THROWS_AS(session->write_file("/etc/passwd", "x"), ConfinementViolation);
  CHECK_THROWS_AS(session->write_file("relative.txt", "x"),
                  ConfinementViolation);
  CHECK_THROWS_AS(session->write_file("/app/../escape", "x"),
                  ConfinementViolation);
  CHECK_THROWS_AS(session->write_file("/application/x", "x"),
                  ConfinementViolation);
  // Initial files are confined to /app and /tests.
  CHECK_THROWS_AS(create_session(local_profile(), {{"/output/x", "y"}}),
                  ConfinementViolation);
  CHECK(session->exists("/app"));
  CHECK(session->exists("/output"));
  session->close();
}

TEST_CASE("Ctrl+C interrupts the foreground process") {
  auto session = create_session(local_profile(), {});
  session->send_keys("sleep 30\n", 0.4);
  session->drain_exit_statuses();
  session->send_keys("C-c", 0.5);
  std::string screen = session->send_keys("echo rc=$?\n", 0.6);
  CHECK(screen.find("rc=130") != std::string::npos);  // SIGINT observed
  session->close();
}

TEST_CASE("exit status sentinels are harvested and stripped from screens") {
  auto session = create_session(local_profile(), {});
  session->send_keys("true\n", 0.4);
  session->send_keys("false\n", 0.4);
  auto statuses = session->drain_exit_statuses();
  REQUIRE(statuses.size() >= 2);
  CHECK(statuses[statuses.size() - 2] == 0);
  CHECK(statuses.back() == 1);
  CHECK(session->screen().find('\x1d') == std::string::npos);
  session->close();
}

TEST_CASE("per-command timeout raises SandboxTimeout") {
  auto session = create_session(local_profile(0.5), {});
  CHECK_THROWS_AS(session->run_script({"sleep 10"}, ScriptPolicy::fail_fast),
                  SandboxTimeout);
  session->close();
}

TEST_CASE("reset restores randomized workspaces bit-exact") {
  std::mt19937_64 rng(17);
  auto session = create_session(local_profile(), {});
  for (int i = 0; i < 50; ++i) {
    std::string content;
    for (int b = 0; b < 64; ++b)
      content += static_cast<char>('a' + rng() % 26);
    session->write_file("/app/f" + std::to_string(i) + ".txt", content);
  }
  session->snapshot("seeded");
  std::string seeded_hash = session->tree_hash();

  session->run_script({"rm /app/f0.txt", "echo mutate > /app/f1.txt",
                       "mkdir -p /app/new && echo x > /app/new/y"},
                      ScriptPolicy::run_all);
  CHECK(session->tree_hash() != seeded_hash);
  session->reset("seeded");
  CHECK(session->tree_hash() == seeded_hash);
  session->close();
}

TEST_CASE("scripts keep shell state across lines (cd, variables)") {
  auto session = create_session(local_profile(), {});
  auto result = session->run_script(
      {"mkdir -p /app/sub", "cd /app/sub", "export MARKER=42",
       "echo \"at $(pwd) marker $MARKER\" > /app/state.txt"},
      ScriptPolicy::fail_fast);
  CHECK(result.exit_code == 0);
  std::string state = session->read_file("/app/state.txt");
  CHECK(state.find("/app/sub") != std::string::npos);
  CHECK(state.find("marker 42") != std::string::npos);
  session->close();
}

TEST_CASE("run_pytest: outcome parsing, collection errors, vacuous suites") {
  auto session = create_session(local_profile(), {{"/app/seed.txt", "seed"}});

  SUBCASE("mixed outcomes parse exactly") {
    VerifierSuite suite;
    suite.test_source =
        "import os\n"
        "def test_pass():\n    assert os.path.exists('/app/seed.txt')\n"
        "def test_fail():\n    assert os.path.exists('/app/missing.txt')\n";
    auto report = run_pytest(*session, suite);
    CHECK(report.passed == 1);
    CHECK(report.failed == 1);
    CHECK(report.errored == 0);
    CHECK(report.outcomes.at("test_pass") == TestOutcome::passed);
    CHECK(report.outcomes.at("test_fail") == TestOutcome::failed);
  }
  SUBCASE("syntax error is a CollectionError, not a failure") {
    VerifierSuite suite;
    suite.test_source = "def broken(:\n";
    CHECK_THROWS_AS(run_pytest(*session, suite), CollectionError);
  }
  SUBCASE("missing declared package") {
    VerifierSuite suite;
    suite.test_source = "def test_x():\n    assert True\n";
    suite.python_packages = {"definitely-not-a-package-xyz"};
    CHECK_THROWS_AS(run_pytest(*session, suite), MissingPackages);
  }
  SUBCASE("helper files are staged under /tests") {
    VerifierSuite suite;
    suite.helper_files = {{"tests/expected.txt", "42"}};
    suite.test_source =
        "def test_helper():\n"
        "    assert open('/tests/expected.txt').read() == '42'\n";
    auto report = run_pytest(*session, suite);
    CHECK(report.passed == 1);
  }
  SUBCASE("collect_pytest counts tests") {
    VerifierSuite suite;
    suite.test_source =
        "def test_a():\n    pass\n\ndef test_b():\n    pass\n";
    CHECK(collect_pytest(*session, suite) == 2);
  }
  session->close();
}

TEST_CASE("run_all executes exactly len(lines) commands despite failures") {
  auto session = create_session(local_profile(), {});
  auto result = session->run_script({"false", "false", "false", "echo done"},
                                    ScriptPolicy::run_all);
  CHECK(result.per_line_codes.size() == 4);
  CHECK(result.exit_code == 1);
  session->close();
}
