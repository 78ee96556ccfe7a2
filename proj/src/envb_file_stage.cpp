#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "skillforge/envb/stages.hpp"
#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/json_extract.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::envb {

using nlohmann::json;

// ---- tool registry ----

void ToolRegistry::add(const std::string& tool_name,
                       std::shared_ptr<ToolExecutor> exec) {
  executors_[tool_name] = std::move(exec);
}

ToolExecutor& ToolRegistry::get(const std::string& tool_name) const {
  auto it = executors_.find(tool_name);
  if (it == executors_.end())
    throw EnvBuildError("no executor for tool: " + tool_name);
  return *it->second;
}

bool ToolRegistry::has(const std::string& tool_name) const {
  return executors_.count(tool_name) > 0;
}

std::string PythonToolExecutor::execute(const gateway::ToolCall& call,
                                        sandbox::Session& session) {
  std::string code = call.arguments.value("code", "");
  std::string target = call.arguments.value("target_filepath", "");
  session.write_file("/logs/.skf_generate.py", code);
  auto result = session.run_script({"python3 /logs/.skf_generate.py"},
                                   sandbox::ScriptPolicy::run_all);
  std::string tail = result.output.size() > 2000
                         ? result.output.substr(result.output.size() - 2000)
                         : result.output;
  std::string status;
  if (!target.empty()) {
    if (session.exists(target))
      status = fmt::format("target {} exists ({} bytes)", target,
                           session.read_file(target).size());
    else
      status = fmt::format("target {} is missing", target);
  }
  return fmt::format("exit {}\n{}\n{}", result.exit_code, tail, status);
}

void FixtureFetchExecutor::add_page(const std::string& url,
                                    std::string content) {
  pages_[url] = std::move(content);
}

void FixtureFetchExecutor::add_search_result(const std::string& fragment,
                                             std::string url) {
  results_[fragment] = std::move(url);
}

std::string FixtureFetchExecutor::execute(const gateway::ToolCall& call,
                                          sandbox::Session& session) {
  if (call.tool_name == "web_search") {
    std::string query = call.arguments.value("query", "");
    std::string hits;
    for (const auto& [fragment, url] : results_)
      if (util::icontains(query, fragment)) hits += "- " + url + "\n";
    return hits.empty() ? "no results" : "results:\n" + hits;
  }
  if (call.tool_name == "fetch_page") {
    std::string url = call.arguments.value("url", "");
    auto it = pages_.find(url);
    if (it == pages_.end()) return "HTTP 404: " + url;
    std::string body = it->second.substr(0, 2000);
    return "HTTP 200:\n" + body;
  }
  if (call.tool_name == "download_file") {
    std::string url = call.arguments.value("url", "");
    std::string save_as = call.arguments.value("save_as", "");
    auto it = pages_.find(url);
    if (it == pages_.end()) throw FetchFailed("no fixture content for " + url);
    session.write_file(save_as, it->second);
    return fmt::format("downloaded {} bytes to {}", it->second.size(), save_as);
  }
  throw EnvBuildError("fetch executor cannot handle tool: " + call.tool_name);
}

ToolRegistry make_tool_registry(std::shared_ptr<ToolExecutor> fetch) {
  ToolRegistry registry;
  registry.add("python", std::make_shared<PythonToolExecutor>());
  if (fetch) {
    registry.add("web_search", fetch);
    registry.add("fetch_page", fetch);
    registry.add("download_file", fetch);
  }
  return registry;
}

// ---- prompt plumbing ----

namespace {

// Splits a "[System] ... [User] ..." asset into the two message bodies.
std::pair<std::string, std::string> split_system_user(std::string_view text) {
  size_t user = text.find("\n[User]\n");
  std::string system(text.substr(0, user));
  std::string rest(user == std::string_view::npos
                       ? ""
                       : text.substr(user + strlen("\n[User]\n")));
  if (system.rfind("[System]\n", 0) == 0)
    system = system.substr(strlen("[System]\n"));
  return {util::trim(system), util::trim(rest)};
}

std::string truncate(const std::string& s, size_t n) {
  if (s.size() <= n) return s;
  return s.substr(0, n) + "\n... (truncated)";
}

std::string render_target_file(const synth::FileSpec& spec,
                               const std::string& repair_notes) {
  std::string out = fmt::format("filepath: {}\ngeneration_mode: {}\ndescription: {}",
                                spec.path, to_string(spec.mode),
                                spec.description);
  if (!repair_notes.empty())
    out += "\n\nRepair instructions from the previous verification:\n" +
           repair_notes;
  return out;
}

std::string render_previous_files(const std::vector<FileArtifact>& prior) {
  if (prior.empty()) return "(none)";
  std::string out;
  for (const auto& f : prior) {
    out += "## " + f.path + "\n```\n" + truncate(f.content, 4000) + "\n```\n";
  }
  return out;
}

std::string blueprint_json(const synth::TaskSpec& task) {
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : task.blueprint.files)
    files.push_back({{"filepath", f.path},
                     {"generation_mode", to_string(f.mode)},
                     {"description", f.description}});
  nlohmann::ordered_json j = {{"initial_files", files},
                              {"setup_steps", task.blueprint.setup_steps}};
  return j.dump(2);
}

gateway::ToolDecl python_tool_decl() {
  return {"python",
          "Run Python code inside /app to create or repair the target artifact.",
          json{{"type", "object"},
               {"properties",
                {{"target_filepath", {{"type", "string"}}},
                 {"code", {{"type", "string"}}},
                 {"timeout_sec", {{"type", "integer"}}}}},
               {"required", {"target_filepath", "code"}}}};
}

std::vector<gateway::ToolDecl> fetch_tool_decls() {
  return {
      {"web_search",
       "Search the web for candidate pages or download locations.",
       json{{"type", "object"},
            {"properties",
             {{"query", {{"type", "string"}}},
              {"top_k", {{"type", "integer"}}},
              {"domain_hint", {{"type", "string"}}}}},
            {"required", {"query"}}}},
      {"fetch_page", "Fetch and inspect a page to discover useful links.",
       json{{"type", "object"},
            {"properties",
             {{"url", {{"type", "string"}}},
              {"mode", {{"type", "string"}}},
              {"timeout_ms", {{"type", "integer"}}}}},
            {"required", {"url", "mode"}}}},
      {"download_file", "Download the target artifact to the sandbox path.",
       json{{"type", "object"},
            {"properties",
             {{"url", {{"type", "string"}}},
              {"save_as", {{"type", "string"}}},
              {"timeout_ms", {{"type", "integer"}}}}},
            {"required", {"url", "save_as"}}}}};
}

std::string tool_call_text(const gateway::ToolCall& call) {
  return json{{"tool", call.tool_name}, {"arguments", call.arguments}}.dump();
}

}  // namespace

// ---- FileStage ----

FileStage::FileStage(gateway::LlmGateway& gateway, ToolRegistry tools,
                     EnvBuildConfig config)
    : gateway_(gateway),
      tools_(std::move(tools)),
      config_(std::move(config)) {}

FileArtifact FileStage::generate_file(const synth::FileSpec& spec,
                                      const synth::TaskSpec& task,
                                      const std::vector<FileArtifact>& prior,
                                      sandbox::Session& session,
                                      const std::string& repair_notes) {
  if (spec.mode == synth::GenMode::llm_direct)
    return generate_llm_direct(spec, task, prior, session, repair_notes);
  return generate_with_tools(spec, task, session, repair_notes);
}

FileArtifact FileStage::generate_llm_direct(
    const synth::FileSpec& spec, const synth::TaskSpec& task,
    const std::vector<FileArtifact>& prior, sandbox::Session& session,
    const std::string& repair_notes) {
  std::string prompt = prompts::render(
      "file_llm_direct",
      {{"instruction", task.instruction},
       {"blueprint", blueprint_json(task)},
       {"target_file", render_target_file(spec, repair_notes)},
       {"previous_files", render_previous_files(prior)}});

  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::user, prompt}};

  // The response must end with a ```json fence; one re-ask on a bad reply.
  for (int ask = 0; ask < 2; ++ask) {
    auto response = gateway_.complete(request);
    auto fence = util::last_fenced_block(response.text, "json");
    if (!fence) continue;
    json j = json::parse(*fence, nullptr, false);
    if (j.is_discarded() || !j.contains("filepath") || !j.contains("content") ||
        !j["filepath"].is_string() || !j["content"].is_string())
      continue;
    std::string filepath = j["filepath"].get<std::string>();
    if (filepath != spec.path)
      throw PathMismatch(fmt::format("generator returned {} for target {}",
                                     filepath, spec.path));
    FileArtifact artifact;
    artifact.path = spec.path;
    artifact.content = j["content"].get<std::string>();
    artifact.provenance = synth::GenMode::llm_direct;
    session.write_file(artifact.path, artifact.content);
    return artifact;
  }
  throw MalformedFileJSON("no valid json block for " + spec.path);
}

FileArtifact FileStage::generate_with_tools(const synth::FileSpec& spec,
                                            const synth::TaskSpec& task,
                                            sandbox::Session& session,
                                            const std::string& repair_notes) {
  bool local = spec.mode == synth::GenMode::local_tool;
  std::string asset = local ? "file_local_tool" : "file_remote_fetch";
  int turns = local ? config_.local_tool_turns : config_.remote_fetch_turns;

  std::string description = spec.description;
  if (!repair_notes.empty())
    description += "\n\nRepair instructions from the previous verification:\n" +
                   repair_notes;
  auto [system_text, user_text] = split_system_user(prompts::asset(asset));
  user_text = util::render_template(
      user_text, {{"target_filepath", spec.path},
                  {"file_description", description},
                  {"instruction_summary", truncate(task.instruction, 1200)}});

  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::system, system_text},
                      {gateway::Role::user, user_text}};
  request.tool_schemas =
      local ? std::vector<gateway::ToolDecl>{python_tool_decl()}
            : fetch_tool_decls();

  FileArtifact artifact;
  artifact.path = spec.path;
  artifact.provenance = spec.mode;

  for (int turn = 0; turn < turns; ++turn) {
    auto response = gateway_.complete(request);
    if (response.tool_calls.empty()) {
      if (session.exists(spec.path) && !session.read_file(spec.path).empty())
        break;
      request.messages.push_back(
          {gateway::Role::user,
           "Respond with exactly one required function call."});
      continue;
    }
    for (const auto& call : response.tool_calls) {
      if (local && call.tool_name == "python") {
        std::string target = call.arguments.value("target_filepath", "");
        if (target != spec.path)
          throw PathMismatch(fmt::format("python call targets {} but {} was requested",
                                         target, spec.path));
      }
      if (!local && call.tool_name == "download_file") {
        std::string save_as = call.arguments.value("save_as", "");
        if (save_as != spec.path)
          throw PathMismatch(fmt::format("download saves to {} but {} was requested",
                                         save_as, spec.path));
      }
      if (!tools_.has(call.tool_name)) {
        request.messages.push_back(
            {gateway::Role::tool, "unknown tool: " + call.tool_name});
        artifact.generator_log.push_back(
            {call.tool_name, call.arguments, "unknown tool"});
        continue;
      }
      std::string observation = tools_.get(call.tool_name).execute(call, session);
      artifact.generator_log.push_back(
          {call.tool_name, call.arguments, observation});
      request.messages.push_back(
          {gateway::Role::assistant, tool_call_text(call)});
      request.messages.push_back({gateway::Role::tool, observation});
    }
    if (session.exists(spec.path) && !session.read_file(spec.path).empty())
      break;
    if (turn + 1 == turns)
      throw TurnBudgetExceeded(
          fmt::format("{} generation for {} exceeded {} turns",
                      to_string(spec.mode), spec.path, turns));
  }

  if (!session.exists(spec.path))
    throw TurnBudgetExceeded("generator never produced " + spec.path);
  artifact.content = session.read_file(spec.path);
  return artifact;
}

// ---- verification protocol ----

namespace {

std::optional<FindingOwner> owner_from_string(const std::string& s) {
  if (s == "llm_direct") return FindingOwner::llm_direct;
  if (s == "specialized") return FindingOwner::specialized;
  if (s == "unattributed") return FindingOwner::unattributed;
  return std::nullopt;
}

// Validates a finalize result; returns an error string or fills the report.
std::string parse_finalize(const json& result, VerifyReport& report) {
  std::string verdict = result.value("overall_verdict", "");
  if (verdict != "pass" && verdict != "fail")
    return "overall_verdict must be exactly \"pass\" or \"fail\"";
  if (!result.contains("file_findings") || !result["file_findings"].is_array() ||
      !result.contains("global_findings") ||
      !result["global_findings"].is_array())
    return "finalize result needs file_findings and global_findings arrays";

  std::vector<VerifyFinding> findings;
  for (const auto& f : result["file_findings"]) {
    VerifyFinding finding;
    if (!f.contains("filepath") || !f["filepath"].is_string())
      return "file finding without filepath";
    finding.filepath = f["filepath"].get<std::string>();
    finding.reason = f.value("reason", "");
    finding.repair_instructions = f.value("repair_instructions", "");
    if (finding.repair_instructions.empty())
      return "finding without repair_instructions";
    findings.push_back(std::move(finding));
  }
  for (const auto& f : result["global_findings"]) {
    VerifyFinding finding;
    finding.reason = f.value("reason", "");
    finding.repair_instructions = f.value("repair_instructions", "");
    auto owner = owner_from_string(f.value("primary_owner", ""));
    if (!owner) return "global finding with bad primary_owner";
    finding.primary_owner = *owner;
    if (finding.repair_instructions.empty())
      return "finding without repair_instructions";
    findings.push_back(std::move(finding));
  }

  bool pass = verdict == "pass";
  if (pass && !findings.empty())
    return "pass verdict requires both findings arrays empty";
  if (!pass && findings.empty())
    return "fail verdict requires at least one finding";
  report.pass = pass;
  report.findings = std::move(findings);
  return "";
}

}  // namespace

VerifyReport FileStage::verify_files(const std::vector<FileArtifact>& files,
                                     const synth::TaskSpec& task,
                                     sandbox::Session& session) {
  std::map<std::string, std::string> descriptions;
  for (const auto& spec : task.blueprint.files)
    descriptions[spec.path] = spec.description;

  std::string file_lines;
  for (const auto& f : files)
    file_lines += fmt::format("- {} ({}) -- {}\n", f.path,
                              to_string(f.provenance), descriptions[f.path]);

  auto tree = session.run_script({"find /app /tests -type f | sort"},
                                 sandbox::ScriptPolicy::run_all);
  std::string workspace_tree;
  for (const auto& line : util::split_lines(tree.output))
    if (!line.empty() && line[0] == '/') workspace_tree += line + "\n";

  auto [system_text, user_text] = split_system_user(prompts::asset("file_verify"));
  user_text = util::render_template(user_text,
                                    {{"instruction", task.instruction},
                                     {"file_lines", file_lines},
                                     {"workspace_tree", workspace_tree}});

  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::system, system_text},
                      {gateway::Role::user, user_text}};

  // Inspection commands must not leak mutations into the build state.
  session.snapshot("pre_verify");
  int violations = 0;
  std::optional<VerifyReport> final_report;

  for (int turn = 0; turn < config_.verify_turns && !final_report; ++turn) {
    auto response = gateway_.complete(request);
    request.messages.push_back({gateway::Role::assistant, response.text});

    auto j = util::extract_last_json_object(response.text);
    std::string error;
    if (!j) {
      error = "reply is not a JSON object";
    } else {
      std::string status = j->value("status", "");
      if (status == "continue") {
        std::vector<std::string> commands;
        for (const auto& c : j->value("commands", json::array()))
          if (c.is_string()) commands.push_back(c.get<std::string>());
        auto result =
            session.run_script(commands, sandbox::ScriptPolicy::run_all);
        request.messages.push_back(
            {gateway::Role::user,
             "Command output:\n" + truncate(result.output, 6000)});
        continue;
      } else if (status == "finalize") {
        VerifyReport report;
        error = parse_finalize(j->value("result", json::object()), report);
        if (error.empty()) final_report = std::move(report);
      } else {
        error = "status must be continue or finalize";
      }
    }

    if (!final_report && !error.empty()) {
      if (++violations >= 2)
        throw ProtocolViolation("file verification: " + error);
      request.messages.push_back(
          {gateway::Role::user, "Protocol violation (" + error +
                                    "); reply again following the rules."});
    }
  }

  session.reset("pre_verify");
  if (final_report) return *final_report;

  log::warn("file verification hit the {}-turn budget; treating as fail",
            config_.verify_turns);
  VerifyFinding finding;
  finding.reason = "verification exceeded the turn budget";
  finding.repair_instructions =
      "Regenerate the llm_direct files; the verifier could not finish.";
  finding.primary_owner = FindingOwner::unattributed;
  return {false, {finding}};
}

GvrOutcome FileStage::run(const synth::TaskSpec& task,
                          sandbox::Session& session,
                          std::vector<FileArtifact>& out) {
  auto generate = [&]() {
    std::vector<FileArtifact> artifacts;
    for (const auto& spec : task.blueprint.files)
      artifacts.push_back(generate_file(spec, task, artifacts, session));
    return artifacts;
  };

  auto verify = [&](std::vector<FileArtifact>& artifacts) {
    if (artifacts.empty()) return VerifyReport{true, {}};  // nothing to check
    return verify_files(artifacts, task, session);
  };

  // Each file finding routes to the generator owning its path; global
  // findings regenerate all llm_direct files (specialized ones regenerate
  // the tool-backed files instead).
  auto repair = [&](std::vector<FileArtifact> artifacts,
                    const std::vector<VerifyFinding>& findings) {
    std::set<std::string> paths;
    bool regen_llm = false, regen_specialized = false;
    for (const auto& f : findings) {
      if (f.filepath && !f.filepath->empty()) {
        paths.insert(*f.filepath);
      } else if (f.primary_owner == FindingOwner::specialized) {
        regen_specialized = true;
      } else {
        regen_llm = true;
      }
    }
    for (size_t i = 0; i < task.blueprint.files.size(); ++i) {
      const auto& spec = task.blueprint.files[i];
      bool direct = spec.mode == synth::GenMode::llm_direct;
      bool hit = paths.count(spec.path) || (regen_llm && direct) ||
                 (regen_specialized && !direct);
      if (!hit) continue;
      std::string notes;
      for (const auto& f : findings)
        if (!f.filepath || *f.filepath == spec.path)
          notes += "- " + f.reason + ": " + f.repair_instructions + "\n";
      std::vector<FileArtifact> prior;
      for (size_t k = 0; k < artifacts.size(); ++k)
        if (k != i) prior.push_back(artifacts[k]);
      artifacts[i] = generate_file(spec, task, prior, session, notes);
    }
    return artifacts;
  };

  return gvr_run<std::vector<FileArtifact>>(ArtifactKind::files,
                                            config_.gvr_budget, generate,
                                            verify, repair, out);
}

}  // namespace skillforge::envb
