#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace skillforge::corpus {

enum class SkillKind { single, team, graph };

std::string to_string(SkillKind kind);
SkillKind skill_kind_from_string(const std::string& name);

// One parsed skill.md unit. Composites (teams, graphs) are flattened back
// into this same shape so downstream stages need not care.
struct Skill {
  std::string id;  // stable within a corpus; derived from the relative path
  std::string name;
  std::string description;
  std::vector<std::string> tags;
  std::string body;
  std::string category;
  std::string subcategory;
  long long downloads = 0;
  std::string source;
  SkillKind kind = SkillKind::single;

  bool operator==(const Skill&) const = default;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoFrontmatter : ParseError {
  using ParseError::ParseError;
};
struct MalformedFrontmatter : ParseError {
  using ParseError::ParseError;
};

// Frontmatter keys name/description/tags/source (plus kind, category,
// subcategory, downloads when present) map onto fields; unknown keys are
// tolerated and dropped; everything after the closing --- is the body.
Skill parse_skill_md(const std::string& text, const std::string& id = "");

// Inverse of parse_skill_md up to field equality.
std::string emit_skill_md(const Skill& skill);

// Loads every *.md under `dir` (id = relative path minus extension). A
// sidecar metadata.json at the root may map id -> {category, subcategory,
// downloads}. Result sorted by id.
std::vector<Skill> load_corpus(const std::filesystem::path& dir);

nlohmann::ordered_json skill_to_json(const Skill& skill);
Skill skill_from_json(const nlohmann::json& j);

}  // namespace skillforge::corpus
