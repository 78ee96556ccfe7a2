#include <regex>

#include <fmt/format.h>

#include "skillforge/envb/stages.hpp"
#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::envb {

namespace {

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

std::string preseeded_lines(const std::vector<FileArtifact>& preseeded) {
  if (preseeded.empty()) return "(none)";
  std::string out;
  for (const auto& f : preseeded)
    out += fmt::format("- {} ({} bytes)\n", f.path, f.content.size());
  return out;
}

std::string tail_of(const std::string& s, size_t n) {
  return s.size() <= n ? s : "..." + s.substr(s.size() - n);
}

bool is_wordish(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != ';' && c != '|' &&
         c != '&' && c != '<' && c != '>' && c != '(' && c != ')';
}

// Rough shell tokenization: whitespace-separated words with quotes stripped;
// redirection operators become their own tokens.
std::vector<std::string> lex_tokens(const std::string& command) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < command.size()) {
    char c = command[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '>' || c == '<') {
      size_t j = i;
      while (j < command.size() && (command[j] == '>' || command[j] == '<')) ++j;
      tokens.emplace_back(command.substr(i, j - i));
      i = j;
    } else if (c == ';' || c == '|' || c == '&' || c == '(' || c == ')') {
      tokens.emplace_back(1, c);
      ++i;
    } else if (c == '\'' || c == '"') {
      size_t close = command.find(c, i + 1);
      if (close == std::string::npos) close = command.size();
      tokens.push_back(command.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      size_t j = i;
      while (j < command.size() && is_wordish(command[j])) ++j;
      tokens.push_back(command.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

}  // namespace

std::optional<std::string> find_preseeded_write(
    const std::string& command, const std::vector<std::string>& preseeded) {
  auto is_preseeded = [&](const std::string& token) {
    for (const auto& p : preseeded)
      if (token == p) return true;
    return false;
  };

  auto tokens = lex_tokens(command);
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    // Redirections: "> path" and ">> path".
    if ((tok == ">" || tok == ">>") && i + 1 < tokens.size() &&
        is_preseeded(tokens[i + 1]))
      return tokens[i + 1];
    // dd of=path.
    if (tok.rfind("of=", 0) == 0 && is_preseeded(tok.substr(3)))
      return tok.substr(3);
    // curl -o / --output and wget -O.
    if ((tok == "-o" || tok == "--output" || tok == "-O") &&
        i + 1 < tokens.size() && is_preseeded(tokens[i + 1]))
      return tokens[i + 1];
    // cp/mv: any later argument hitting a pre-seeded path counts (dest or
    // clobbered sibling), tee: every file argument is a write target.
    if (tok == "cp" || tok == "mv" || tok == "tee") {
      for (size_t j = i + 1; j < tokens.size(); ++j) {
        if (tokens[j] == ";" || tokens[j] == "|" || tokens[j] == "&") break;
        if ((tok == "tee" || j + 1 == tokens.size() ||
             tokens[j + 1] == ";" || tokens[j + 1] == "|" ||
             tokens[j + 1] == "&") &&
            is_preseeded(tokens[j]))
          return tokens[j];
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_command_entries(const std::string& block) {
  std::vector<std::string> entries;
  auto lines = util::split_lines(block);
  static const std::regex heredoc_re(R"(<<-?\s*['"]?(\w+)['"]?)");

  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    std::string trimmed = util::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (trimmed.rfind("#!", 0) == 0) continue;
    static const std::regex set_re(R"(^set\s+-[A-Za-z]+.*$)");
    if (std::regex_match(trimmed, set_re)) continue;

    std::string entry = line;
    // Backslash continuations join onto one entry.
    while (!entry.empty() && entry.back() == '\\' && i + 1 < lines.size())
      entry += "\n" + lines[++i];
    // Heredocs run through their terminator as one entry.
    std::smatch m;
    if (std::regex_search(entry, m, heredoc_re)) {
      std::string terminator = m[1].str();
      while (i + 1 < lines.size()) {
        entry += "\n" + lines[++i];
        if (util::trim(lines[i]) == terminator) break;
      }
    }
    entries.push_back(entry);
  }
  return entries;
}

SetupStage::SetupStage(gateway::LlmGateway& gateway, EnvBuildConfig config)
    : gateway_(gateway), config_(std::move(config)) {}

SetupScript SetupStage::parse_setup_response(
    const std::string& text, const std::vector<FileArtifact>& preseeded) {
  auto fence = util::last_fenced_block(text, "bash");
  if (!fence) throw NoBashBlock("setup response carries no ```bash block");
  SetupScript script;
  script.commands = split_command_entries(*fence);
  if (script.commands.empty())
    throw NoBashBlock("setup response's bash block is empty");

  std::vector<std::string> paths;
  for (const auto& f : preseeded) paths.push_back(f.path);
  for (const auto& command : script.commands)
    if (auto hit = find_preseeded_write(command, paths))
      throw PreseededOverwrite(
          fmt::format("setup command writes pre-seeded path {}: {}", *hit,
                      command));
  return script;
}

SetupScript SetupStage::build_setup_script(
    const synth::TaskSpec& task, const std::vector<FileArtifact>& preseeded) {
  std::string prompt = prompts::render(
      "env_build", {{"instruction", task.instruction},
                    {"blueprint", blueprint_json(task)},
                    {"pre_seeded_files", preseeded_lines(preseeded)}});
  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::user, prompt}};
  return parse_setup_response(gateway_.complete(request).text, preseeded);
}

VerifyReport SetupStage::probe_setup(SetupScript& script,
                                     const synth::TaskSpec& task,
                                     const std::vector<FileArtifact>& preseeded,
                                     sandbox::Session& session) {
  std::string prompt = prompts::render(
      "env_verify",
      {{"instruction", task.instruction},
       {"blueprint", blueprint_json(task)},
       {"pre_seeded_files", preseeded_lines(preseeded)},
       {"setup_script", util::join(script.commands, "\n")}});
  gateway::ChatRequest request;
  request.backend_id = config_.backend_id;
  request.stage_tag = gateway::StageTag::env_build;
  request.messages = {{gateway::Role::user, prompt}};

  auto fence = util::last_fenced_block(gateway_.complete(request).text, "bash");
  if (!fence) throw NoBashBlock("probe response carries no ```bash block");
  script.probe_script = split_command_entries(*fence);

  // Probes run without fail-fast: every line executes, any nonzero fails.
  auto result =
      session.run_script(script.probe_script, sandbox::ScriptPolicy::run_all);
  VerifyReport report;
  report.pass = true;
  for (size_t i = 0; i < result.per_line_codes.size(); ++i) {
    if (result.per_line_codes[i] == 0) continue;
    report.pass = false;
    VerifyFinding finding;
    finding.reason = fmt::format("probe `{}` exited {}",
                                 script.probe_script[i],
                                 result.per_line_codes[i]);
    finding.repair_instructions =
        "Fix the environment so this probe passes. Probe output:\n" +
        tail_of(result.output, 1500);
    finding.primary_owner = FindingOwner::unattributed;
    report.findings.push_back(std::move(finding));
  }
  return report;
}

GvrOutcome SetupStage::run(const synth::TaskSpec& task,
                           const std::vector<FileArtifact>& preseeded,
                           sandbox::Session& session, SetupScript& out) {
  auto generate = [&]() { return build_setup_script(task, preseeded); };

  auto verify = [&](SetupScript& script) {
    // Every attempt executes the full script in a fresh sandbox.
    session.reset("post_files");
    auto exec =
        session.run_script(script.commands, sandbox::ScriptPolicy::fail_fast);
    if (exec.exit_code != 0) {
      VerifyFinding finding;
      finding.reason = fmt::format("setup exited {}", exec.exit_code);
      finding.repair_instructions =
          "Setup execution failed. Output:\n" + tail_of(exec.output, 1500);
      finding.primary_owner = FindingOwner::unattributed;
      return VerifyReport{false, {finding}};
    }
    return probe_setup(script, task, preseeded, session);
  };

  auto repair = [&](SetupScript script,
                    const std::vector<VerifyFinding>& findings) {
    std::string errors;
    for (const auto& f : findings)
      errors += "- " + f.reason + "\n  " + f.repair_instructions + "\n";
    std::string prompt = prompts::render(
        "env_repair", {{"instruction", task.instruction},
                       {"blueprint", blueprint_json(task)},
                       {"pre_seeded_files", preseeded_lines(preseeded)},
                       {"commands", util::join(script.commands, "\n")},
                       {"errors", errors}});
    gateway::ChatRequest request;
    request.backend_id = config_.backend_id;
    request.stage_tag = gateway::StageTag::env_build;
    request.messages = {{gateway::Role::user, prompt}};
    // Full regenerated command list, not a patch; the next verify attempt
    // re-runs it from the post_files snapshot.
    return parse_setup_response(gateway_.complete(request).text, preseeded);
  };

  return gvr_run<SetupScript>(ArtifactKind::setup, config_.gvr_budget,
                              generate, verify, repair, out);
}

}  // namespace skillforge::envb
