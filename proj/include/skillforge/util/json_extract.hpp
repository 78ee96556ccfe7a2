#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace skillforge::util {

// Strict-JSON extraction used for every LLM reply the pipeline parses:
// fenced code blocks are unwrapped first, then the LAST balanced top-level
// JSON object wins. Returns nullopt when no parseable object exists.
std::optional<nlohmann::json> extract_last_json_object(std::string_view text);

// Same extraction, but also reports whether non-whitespace text exists
// outside the chosen object (tolerated, surfaced as a warning).
struct JsonExtraction {
  nlohmann::json value;
  bool extra_text = false;
};
std::optional<JsonExtraction> extract_last_json_object_verbose(
    std::string_view text);

}  // namespace skillforge::util
