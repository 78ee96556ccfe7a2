#include "skillforge/util/text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace skillforge::util {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  std::string h = to_lower(haystack), n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

namespace {

bool glob_match(std::string_view pat, std::string_view text) {
  // Iterative fnmatch with backtracking for '*'.
  size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

}  // namespace

bool pattern_match(std::string_view pattern, std::string_view text) {
  std::string p = to_lower(pattern), t = to_lower(text);
  if (p.find('*') == std::string::npos && p.find('?') == std::string::npos)
    return t.find(p) != std::string::npos;
  return glob_match(p, t);
}

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  size_t pos = 0;
  while (pos < tpl.size()) {
    size_t open = tpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    size_t close = tpl.find('}', open + 1);
    if (close == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    std::string key(tpl.substr(open + 1, close - open - 1));
    auto it = values.find(key);
    if (it != values.end()) {
      out.append(tpl.substr(pos, open - pos));
      out.append(it->second);
      pos = close + 1;
    } else {
      out.append(tpl.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  return out;
}

std::optional<std::string> last_fenced_block(std::string_view text,
                                             std::string_view lang) {
  std::optional<std::string> found;
  size_t pos = 0;
  while (true) {
    size_t open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    size_t hdr_end = text.find('\n', open);
    if (hdr_end == std::string_view::npos) break;
    std::string header = trim(text.substr(open + 3, hdr_end - open - 3));
    size_t close = text.find("```", hdr_end + 1);
    if (close == std::string_view::npos) break;
    if (lang.empty() || to_lower(header) == to_lower(lang)) {
      std::string_view body = text.substr(hdr_end + 1, close - hdr_end - 1);
      found = std::string(body);
    }
    pos = close + 3;
  }
  return found;
}

long long approx_tokens(std::string_view text) {
  if (text.empty()) return 0;
  return std::max<long long>(1, static_cast<long long>(text.size()) / 4);
}

}  // namespace skillforge::util
