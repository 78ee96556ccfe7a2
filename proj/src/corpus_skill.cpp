#include "skillforge/corpus/skill.hpp"

#include <algorithm>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "skillforge/util/fs.hpp"
#include "skillforge/util/text.hpp"

namespace fs = std::filesystem;

namespace skillforge::corpus {

std::string to_string(SkillKind kind) {
  switch (kind) {
    case SkillKind::single: return "single";
    case SkillKind::team: return "team";
    case SkillKind::graph: return "graph";
  }
  return "single";
}

SkillKind skill_kind_from_string(const std::string& name) {
  if (name == "single") return SkillKind::single;
  if (name == "team") return SkillKind::team;
  if (name == "graph") return SkillKind::graph;
  throw MalformedFrontmatter("unknown skill kind: " + name);
}

namespace {

bool is_delimiter(const std::string& line) {
  return util::trim(line) == "---";
}

}  // namespace

Skill parse_skill_md(const std::string& text, const std::string& id) {
  auto lines = util::split_lines(text);
  if (lines.empty() || !is_delimiter(lines[0]))
    throw NoFrontmatter("skill.md must begin with a '---' frontmatter block");

  size_t close = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (is_delimiter(lines[i])) {
      close = i;
      break;
    }
  }
  if (close == 0)
    throw MalformedFrontmatter("frontmatter block is never closed");

  std::string yaml_text =
      util::join({lines.begin() + 1, lines.begin() + close}, "\n");
  YAML::Node node;
  try {
    node = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw MalformedFrontmatter(std::string("unparseable frontmatter: ") +
                               e.what());
  }
  if (!node.IsMap())
    throw MalformedFrontmatter("frontmatter is not a key-value block");

  Skill skill;
  skill.id = id;
  try {
    if (node["name"]) skill.name = node["name"].as<std::string>();
    if (node["description"])
      skill.description = util::trim(node["description"].as<std::string>());
    if (node["source"]) skill.source = node["source"].as<std::string>();
    if (node["tags"]) {
      for (const auto& t : node["tags"])
        skill.tags.push_back(t.as<std::string>());
    }
    if (node["kind"])
      skill.kind = skill_kind_from_string(node["kind"].as<std::string>());
    if (node["category"]) skill.category = node["category"].as<std::string>();
    if (node["subcategory"])
      skill.subcategory = node["subcategory"].as<std::string>();
    if (node["downloads"]) skill.downloads = node["downloads"].as<long long>();
  } catch (const YAML::Exception& e) {
    throw MalformedFrontmatter(std::string("bad frontmatter value: ") +
                               e.what());
  }

  if (close + 1 < lines.size())
    skill.body =
        util::join({lines.begin() + close + 1, lines.end()}, "\n");
  return skill;
}

std::string emit_skill_md(const Skill& skill) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << skill.name;
  out << YAML::Key << "description" << YAML::Value << skill.description;
  out << YAML::Key << "tags" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& t : skill.tags) out << t;
  out << YAML::EndSeq;
  out << YAML::Key << "source" << YAML::Value << skill.source;
  out << YAML::Key << "kind" << YAML::Value << to_string(skill.kind);
  if (!skill.category.empty())
    out << YAML::Key << "category" << YAML::Value << skill.category;
  if (!skill.subcategory.empty())
    out << YAML::Key << "subcategory" << YAML::Value << skill.subcategory;
  if (skill.downloads != 0)
    out << YAML::Key << "downloads" << YAML::Value << skill.downloads;
  out << YAML::EndMap;
  return std::string("---\n") + out.c_str() + "\n---\n" + skill.body;
}

std::vector<Skill> load_corpus(const fs::path& dir) {
  std::vector<Skill> skills;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".md") continue;
    fs::path rel = fs::relative(entry.path(), dir);
    std::string id = rel.generic_string();
    id = id.substr(0, id.size() - 3);  // strip ".md"
    skills.push_back(parse_skill_md(util::read_file(entry.path()), id));
  }
  std::sort(skills.begin(), skills.end(),
            [](const Skill& a, const Skill& b) { return a.id < b.id; });

  fs::path sidecar = dir / "metadata.json";
  if (fs::exists(sidecar)) {
    nlohmann::json meta = nlohmann::json::parse(util::read_file(sidecar));
    for (auto& skill : skills) {
      if (!meta.contains(skill.id)) continue;
      const auto& m = meta[skill.id];
      skill.category = m.value("category", skill.category);
      skill.subcategory = m.value("subcategory", skill.subcategory);
      skill.downloads = m.value("downloads", skill.downloads);
    }
  }
  return skills;
}

nlohmann::ordered_json skill_to_json(const Skill& skill) {
  return {{"id", skill.id},
          {"name", skill.name},
          {"description", skill.description},
          {"tags", skill.tags},
          {"body", skill.body},
          {"category", skill.category},
          {"subcategory", skill.subcategory},
          {"downloads", skill.downloads},
          {"source", skill.source},
          {"kind", to_string(skill.kind)}};
}

Skill skill_from_json(const nlohmann::json& j) {
  Skill skill;
  skill.id = j.at("id").get<std::string>();
  skill.name = j.value("name", "");
  skill.description = j.value("description", "");
  skill.tags = j.value("tags", std::vector<std::string>{});
  skill.body = j.value("body", "");
  skill.category = j.value("category", "");
  skill.subcategory = j.value("subcategory", "");
  skill.downloads = j.value("downloads", 0LL);
  skill.source = j.value("source", "");
  skill.kind = skill_kind_from_string(j.value("kind", "single"));
  return skill;
}

}  // namespace skillforge::corpus
