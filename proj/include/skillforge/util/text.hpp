#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skillforge::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool icontains(std::string_view haystack, std::string_view needle);

// fnmatch-style matching with `*` and `?`, case-insensitive. A pattern with
// no wildcard degrades to a substring test.
bool pattern_match(std::string_view pattern, std::string_view text);

// Replaces every `{key}` occurrence with its value. Unknown placeholders are
// left untouched so templates can carry literal braces (e.g. JSON examples).
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values);

// Content of the last ```lang fenced block, or nullopt. With an empty lang
// any fence qualifies.
std::optional<std::string> last_fenced_block(std::string_view text,
                                             std::string_view lang);

// Rough token count used for context budgeting (chars / 4, at least 1 for
// non-empty text). Not a tokenizer; callers treat it as a safety margin.
long long approx_tokens(std::string_view text);

}  // namespace skillforge::util
