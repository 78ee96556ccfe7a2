#include <fmt/format.h>

#include "skillforge/envb/stages.hpp"
#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/json_extract.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::envb {

using nlohmann::json;

namespace {

bool looks_textual(const std::string& content) {
  size_t check = std::min<size_t>(content.size(), 2048);
  for (size_t i = 0; i < check; ++i) {
    unsigned char c = content[i];
    if (c == 0) return false;
    if (c < 0x09 && c != 0) return false;
  }
  return true;
}

std::string normalize_helper_path(const std::string& raw) {
  std::string path = raw;
  if (!path.empty() && path[0] == '/') path = path.substr(1);
  if (path.rfind("tests/", 0) == 0) return path;
  size_t slash = path.find_last_of('/');
  return "tests/" + (slash == std::string::npos ? path : path.substr(slash + 1));
}

}  // namespace

VerifierStage::VerifierStage(gateway::LlmGateway& gateway, EnvBuildConfig config)
    : gateway_(gateway), config_(std::move(config)) {}

VerifierSuite VerifierStage::generate_verifier_suite(
    const synth::TaskSpec& task, const std::vector<FileArtifact>& files,
    const SetupScript& setup, const std::string& repair_notes) {
  std::string criteria;
  for (const auto& c : task.eval_criteria) criteria += "- " + c + "\n";
  if (!repair_notes.empty())
    criteria +=
        "\nFindings from the previous verifier attempt (fix them):\n" +
        repair_notes;

  std::string text_files, asset_files, validated;
  for (const auto& f : files) {
    validated += "- " + f.path + "\n";
    if (f.provenance == synth::GenMode::llm_direct && looks_textual(f.content)) {
      std::string content = f.content.size() > 4000
                                ? f.content.substr(0, 4000) + "\n... (truncated)"
                                : f.content;
      text_files += "## " + f.path + "\n```\n" + content + "\n```\n";
    } else {
      asset_files += fmt::format("- {} ({} bytes, mode {})\n", f.path,
                                 f.content.size(), to_string(f.provenance));
    }
  }
  if (text_files.empty()) text_files = "(none)";
  if (asset_files.empty()) asset_files = "(none)";
  if (validated.empty()) validated = "(none)";

  std::string prompt = prompts::render(
      "pytest_gen",
      {{"instruction", task.instruction},
       {"evaluation_criteria", criteria},
       {"target_output_file", "(infer from the evaluation criteria)"},
       {"initial_text_files", text_files},
       {"initial_asset_files", asset_files},
       {"validated_filepaths", validated}});
  (void)setup;

  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::user, prompt}};

  for (int ask = 0; ask < 2; ++ask) {
    auto response = gateway_.complete(request);
    auto j = util::extract_last_json_object(response.text);
    if (!j) continue;
    if (!j->contains("system_packages") || !j->contains("python_packages") ||
        !j->contains("helper_files") || !j->contains("test_outputs_py"))
      continue;
    if (!(*j)["test_outputs_py"].is_string() ||
        (*j)["test_outputs_py"].get<std::string>().empty())
      continue;

    VerifierSuite suite;
    for (const auto& p : (*j)["system_packages"])
      if (p.is_string()) suite.system_packages.push_back(p.get<std::string>());
    for (const auto& p : (*j)["python_packages"])
      if (p.is_string()) suite.python_packages.push_back(p.get<std::string>());
    for (const auto& h : (*j)["helper_files"]) {
      if (!h.contains("path") || !h.contains("content")) continue;
      suite.helper_files.emplace_back(
          normalize_helper_path(h["path"].get<std::string>()),
          h["content"].get<std::string>());
    }
    suite.test_source = (*j)["test_outputs_py"].get<std::string>();
    return suite;
  }
  throw MalformedSuiteJSON("verifier suite JSON unparseable for " + task.id);
}

GateResult VerifierStage::gate_verifier_suite(const VerifierSuite& suite,
                                              sandbox::Session& session) {
  if (session.state() == sandbox::SessionState::closed)
    throw SandboxUnavailable("session closed before the verifier gate");

  GateResult gate;
  try {
    session.reset("post_setup");
  } catch (const sandbox::SandboxError& e) {
    throw SandboxUnavailable(e.what());
  }

  sandbox::PytestReport report;
  try {
    report = sandbox::run_pytest(session, suite);
  } catch (const sandbox::CollectionError& e) {
    VerifyFinding finding;
    finding.reason = "verifier is not executable (collection failed)";
    finding.repair_instructions =
        std::string("Fix syntax/import errors. Pytest said:\n") + e.what();
    gate.findings.push_back(std::move(finding));
    return gate;
  } catch (const sandbox::MissingPackages& e) {
    VerifyFinding finding;
    finding.reason = "verifier needs packages absent from the environment";
    finding.repair_instructions =
        std::string("Declare only available packages or avoid them. ") +
        e.what();
    gate.findings.push_back(std::move(finding));
    return gate;
  }

  gate.collected = report.collected();
  if (gate.collected == 0) {
    VerifyFinding finding;
    finding.reason = "verifier collects zero tests";
    finding.repair_instructions =
        "Emit at least one pytest test function named test_*.";
    gate.findings.push_back(std::move(finding));
    return gate;
  }
  gate.executable = true;

  bool clean = true;
  for (const auto& [name, outcome] : report.outcomes) {
    if (outcome == sandbox::TestOutcome::passed) {
      clean = false;
      VerifyFinding finding;
      finding.reason = fmt::format("vacuous pass: {} passes on the initial state",
                                   name);
      finding.repair_instructions =
          "Rewrite this test so it only passes after the agent completes the "
          "task; it must fail on the pre-execution state.";
      gate.findings.push_back(std::move(finding));
    } else if (outcome == sandbox::TestOutcome::errored) {
      clean = false;
      VerifyFinding finding;
      finding.reason = fmt::format("{} errors on the initial state", name);
      finding.repair_instructions =
          "Tests must fail cleanly (assertion), not error, before the agent "
          "runs.";
      gate.findings.push_back(std::move(finding));
    }
  }
  gate.all_fail_initially = clean;
  return gate;
}

GvrOutcome VerifierStage::run(const synth::TaskSpec& task,
                              const std::vector<FileArtifact>& files,
                              const SetupScript& setup,
                              sandbox::Session& session, VerifierSuite& out,
                              int& collected_tests) {
  // A suite that fails to parse twice becomes an empty artifact with a
  // pending finding, so the GVR loop can still route it into repair.
  std::vector<VerifyFinding> pending;

  auto generate_with_notes = [&](const std::string& notes) {
    pending.clear();
    try {
      return generate_verifier_suite(task, files, setup, notes);
    } catch (const MalformedSuiteJSON& e) {
      VerifyFinding finding;
      finding.reason = "verifier generation returned unusable JSON";
      finding.repair_instructions =
          std::string("Output the exact four-key JSON schema. ") + e.what();
      pending.push_back(std::move(finding));
      return VerifierSuite{};
    }
  };

  auto generate = [&]() { return generate_with_notes(""); };

  auto verify = [&](VerifierSuite& suite) {
    if (suite.test_source.empty()) return VerifyReport{false, pending};
    GateResult gate = gate_verifier_suite(suite, session);
    if (gate.pass()) collected_tests = gate.collected;
    for (const auto& f : gate.findings)
      log::info("verifier gate [{}]: {}", task.id, f.reason);
    return VerifyReport{gate.pass(), gate.findings};
  };

  auto repair = [&](VerifierSuite, const std::vector<VerifyFinding>& findings) {
    std::string notes;
    for (const auto& f : findings)
      notes += "- " + f.reason + ": " + f.repair_instructions + "\n";
    return generate_with_notes(notes);
  };

  return gvr_run<VerifierSuite>(ArtifactKind::verifier, config_.gvr_budget,
                                generate, verify, repair, out);
}

}  // namespace skillforge::envb
