#include "skillforge/util/json_extract.hpp"

#include <vector>

#include "skillforge/util/text.hpp"

namespace skillforge::util {

namespace {

// Replaces ``` fences with their inner content so an object wrapped in a
// fence still scans as top-level.
std::string unwrap_fences(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("```", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    size_t hdr_end = text.find('\n', open);
    if (hdr_end == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    size_t close = text.find("```", hdr_end + 1);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    out.append(text.substr(hdr_end + 1, close - hdr_end - 1));
    pos = close + 3;
  }
  return out;
}

struct Span {
  size_t begin;
  size_t end;  // one past the closing brace
};

// Scans for balanced top-level {...} spans, honoring string literals and
// escapes so braces inside strings do not count.
std::vector<Span> top_level_object_spans(std::string_view s) {
  std::vector<Span> spans;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}') {
      if (depth > 0 && --depth == 0) spans.push_back({start, i + 1});
    }
  }
  return spans;
}

}  // namespace

std::optional<JsonExtraction> extract_last_json_object_verbose(
    std::string_view text) {
  std::string unwrapped = unwrap_fences(text);
  auto spans = top_level_object_spans(unwrapped);
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    std::string_view candidate =
        std::string_view(unwrapped).substr(it->begin, it->end - it->begin);
    nlohmann::json parsed =
        nlohmann::json::parse(candidate, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) continue;
    std::string before = trim(std::string_view(unwrapped).substr(0, it->begin));
    std::string after = trim(std::string_view(unwrapped).substr(it->end));
    return JsonExtraction{std::move(parsed), !before.empty() || !after.empty()};
  }
  return std::nullopt;
}

std::optional<nlohmann::json> extract_last_json_object(std::string_view text) {
  auto r = extract_last_json_object_verbose(text);
  if (!r) return std::nullopt;
  return std::move(r->value);
}

}  // namespace skillforge::util
