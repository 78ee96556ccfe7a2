#pragma once

#include <map>
#include <memory>
#include <string>

#include "skillforge/envb/artifacts.hpp"
#include "skillforge/gateway/types.hpp"
#include "skillforge/sandbox/session.hpp"

namespace skillforge::envb {

// Executes one generation-agent tool call inside a session and returns the
// observation text fed back to the model.
class ToolExecutor {
 public:
  virtual ~ToolExecutor() = default;
  virtual std::string execute(const gateway::ToolCall& call,
                              sandbox::Session& session) = 0;
};

class ToolRegistry {
 public:
  void add(const std::string& tool_name, std::shared_ptr<ToolExecutor> exec);
  ToolExecutor& get(const std::string& tool_name) const;
  bool has(const std::string& tool_name) const;

 private:
  std::map<std::string, std::shared_ptr<ToolExecutor>> executors_;
};

// `python` tool: runs the given code inside the sandbox (cwd /app) and
// reports exit status plus whether the target artifact now exists.
class PythonToolExecutor : public ToolExecutor {
 public:
  std::string execute(const gateway::ToolCall& call,
                      sandbox::Session& session) override;
};

// Offline fetch stub backed by fixture tables; serves web_search,
// fetch_page and download_file deterministically with no network.
class FixtureFetchExecutor : public ToolExecutor {
 public:
  void add_page(const std::string& url, std::string content);
  void add_search_result(const std::string& query_substring, std::string url);

  std::string execute(const gateway::ToolCall& call,
                      sandbox::Session& session) override;

 private:
  std::map<std::string, std::string> pages_;    // url -> content
  std::map<std::string, std::string> results_;  // query fragment -> url
};

// Standard registry: python + the given fetch executor bound to all three
// fetch tools.
ToolRegistry make_tool_registry(std::shared_ptr<ToolExecutor> fetch);

}  // namespace skillforge::envb
