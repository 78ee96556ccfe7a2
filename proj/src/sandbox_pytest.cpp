#include "skillforge/sandbox/pytest.hpp"

#include <regex>

#include <fmt/format.h>

#include "skillforge/util/text.hpp"

namespace skillforge::sandbox {

namespace {

std::string import_name(const std::string& package) {
  std::string out;
  for (char c : package) out += (c == '-') ? '_' : c;
  return out;
}

void stage_suite(Session& session, const VerifierSuite& suite) {
  for (const auto& [path, content] : suite.helper_files) {
    std::string logical = path;
    if (logical.rfind("tests/", 0) == 0) logical = "/" + logical;
    if (logical.rfind("/tests/", 0) != 0)
      logical = "/tests/" + logical.substr(logical.find_last_of('/') + 1);
    session.write_file(logical, content);
  }
  session.write_file("/tests/test_outputs.py", suite.test_source);
}

void probe_packages(Session& session, const VerifierSuite& suite) {
  auto probe = session.run_script({"python3 -c 'import pytest'"},
                                  ScriptPolicy::fail_fast);
  if (probe.exit_code != 0) throw MissingPackages("pytest is not installed");

  std::vector<std::string> missing;
  for (const auto& pkg : suite.python_packages) {
    auto r = session.run_script(
        {fmt::format("python3 -c 'import {}'", import_name(pkg))},
        ScriptPolicy::fail_fast);
    if (r.exit_code != 0) missing.push_back(pkg);
  }
  if (!missing.empty())
    throw MissingPackages("missing python packages: " +
                          util::join(missing, ", "));
}

}  // namespace

PytestReport run_pytest(Session& session, const VerifierSuite& suite) {
  stage_suite(session, suite);
  probe_packages(session, suite);

  auto run = session.run_script(
      {"python3 -m pytest -v --tb=no -p no:cacheprovider "
       "/tests/test_outputs.py"},
      ScriptPolicy::run_all);
  PytestReport report;
  report.raw_output = run.output;

  // pytest exit 2 = interrupted (collection failed), 3 = internal, 4 = usage.
  if (run.exit_code == 2 || run.exit_code == 3 || run.exit_code == 4)
    throw CollectionError("pytest collection failed:\n" + run.output);

  static const std::regex line_re(
      R"(::(\w+(?:\[[^\]]*\])?)\s+(PASSED|FAILED|ERROR))");
  auto begin = std::sregex_iterator(run.output.begin(), run.output.end(), line_re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    std::string verdict = (*it)[2].str();
    if (verdict == "PASSED") {
      report.outcomes[name] = TestOutcome::passed;
      ++report.passed;
    } else if (verdict == "FAILED") {
      report.outcomes[name] = TestOutcome::failed;
      ++report.failed;
    } else {
      report.outcomes[name] = TestOutcome::errored;
      ++report.errored;
    }
  }
  return report;
}

int collect_pytest(Session& session, const VerifierSuite& suite) {
  stage_suite(session, suite);
  probe_packages(session, suite);
  auto run = session.run_script(
      {"python3 -m pytest --collect-only -q -p no:cacheprovider "
       "/tests/test_outputs.py"},
      ScriptPolicy::run_all);
  if (run.exit_code == 2 || run.exit_code == 3 || run.exit_code == 4)
    throw CollectionError("pytest collection failed:\n" + run.output);
  static const std::regex count_re(R"((\d+) tests? collected)");
  std::smatch m;
  if (std::regex_search(run.output, m, count_re)) return std::stoi(m[1].str());
  if (run.output.find("no tests ran") != std::string::npos ||
      run.exit_code == 5)
    return 0;
  // Fall back to counting collector lines ("file::test").
  int count = 0;
  for (const auto& line : util::split_lines(run.output))
    if (line.find("::") != std::string::npos) ++count;
  return count;
}

}  // namespace skillforge::sandbox
