#include "skillforge/compose/relations.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "skillforge/synth/prompt_assets.hpp"
#include "skillforge/util/json_extract.hpp"
#include "skillforge/util/log.hpp"
#include "skillforge/util/text.hpp"

namespace skillforge::compose {

std::string to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::compose_with: return "compose_with";
    case RelationKind::depends_on: return "depends_on";
    case RelationKind::similar_to: return "similar_to";
    case RelationKind::belong_to: return "belong_to";
  }
  return "compose_with";
}

std::optional<RelationKind> relation_kind_from_string(const std::string& raw) {
  // Accepts "DependsOn", "depends_on", "Depends on", ... by folding to
  // lowercase letters only.
  std::string folded;
  for (char c : util::to_lower(raw))
    if (c >= 'a' && c <= 'z') folded += c;
  if (folded == "composewith" || folded == "compose")
    return RelationKind::compose_with;
  if (folded == "dependson" || folded == "dependon")
    return RelationKind::depends_on;
  if (folded == "similarto" || folded == "similar")
    return RelationKind::similar_to;
  if (folded == "belongto" || folded == "belongsto")
    return RelationKind::belong_to;
  return std::nullopt;
}

namespace {

size_t tag_overlap(const corpus::Skill& a, const corpus::Skill& b) {
  std::set<std::string> tags(a.tags.begin(), a.tags.end());
  size_t n = 0;
  for (const auto& t : b.tags) n += tags.count(t);
  return n;
}

// Tiny union-find over skill ids.
class UnionFind {
 public:
  void add(const std::string& id) { parent_.emplace(id, id); }
  std::string find(const std::string& id) {
    std::string root = id;
    while (parent_.at(root) != root) root = parent_.at(root);
    std::string cur = id;
    while (parent_.at(cur) != root) {
      std::string next = parent_.at(cur);
      parent_[cur] = root;
      cur = next;
    }
    return root;
  }
  void merge(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
  }
  bool contains(const std::string& id) const { return parent_.count(id) > 0; }

 private:
  std::map<std::string, std::string> parent_;
};

}  // namespace

std::vector<std::pair<std::string, std::string>> candidate_pairs(
    const std::vector<corpus::Skill>& skills, size_t cross_budget) {
  std::vector<std::pair<std::string, std::string>> out;
  // Intra-subcategory: all pairs, ordered by id.
  for (size_t i = 0; i < skills.size(); ++i)
    for (size_t j = i + 1; j < skills.size(); ++j)
      if (!skills[i].subcategory.empty() &&
          skills[i].subcategory == skills[j].subcategory)
        out.emplace_back(std::min(skills[i].id, skills[j].id),
                         std::max(skills[i].id, skills[j].id));

  // Cross-subcategory: top-N by tag overlap, ties by id pair.
  struct Cross {
    size_t overlap;
    std::pair<std::string, std::string> pair;
  };
  std::vector<Cross> cross;
  for (size_t i = 0; i < skills.size(); ++i)
    for (size_t j = i + 1; j < skills.size(); ++j) {
      if (skills[i].subcategory == skills[j].subcategory) continue;
      size_t overlap = tag_overlap(skills[i], skills[j]);
      if (overlap == 0) continue;
      cross.push_back({overlap,
                       {std::min(skills[i].id, skills[j].id),
                        std::max(skills[i].id, skills[j].id)}});
    }
  std::sort(cross.begin(), cross.end(), [](const Cross& a, const Cross& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.pair < b.pair;
  });
  for (size_t i = 0; i < cross.size() && i < cross_budget; ++i)
    out.push_back(cross[i].pair);
  return out;
}

ClassifyOutcome classify_relations(
    const std::vector<corpus::Skill>& skills,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    gateway::LlmGateway& gateway, const std::string& backend_id) {
  std::map<std::string, const corpus::Skill*> by_id;
  for (const auto& s : skills) by_id[s.id] = &s;

  ClassifyOutcome out;
  for (const auto& [src, dst] : pairs) {
    const auto* a = by_id.count(src) ? by_id.at(src) : nullptr;
    const auto* b = by_id.count(dst) ? by_id.at(dst) : nullptr;
    if (!a || !b || src == dst) {
      out.skipped.emplace_back(src, dst);
      continue;
    }
    gateway::ChatRequest request;
    request.backend_id = backend_id;
    request.stage_tag = gateway::StageTag::other;
    request.messages = {
        {gateway::Role::user,
         prompts::render("relation_classify",
                         {{"skill_a", emit_skill_md(*a)},
                          {"skill_b", emit_skill_md(*b)}})}};
    auto response = gateway.complete(request);
    auto j = util::extract_last_json_object(response.text);
    std::optional<RelationKind> kind;
    if (j && j->contains("relation") && (*j)["relation"].is_string())
      kind = relation_kind_from_string((*j)["relation"].get<std::string>());
    if (!kind) {
      log::warn("unparseable relation verdict for ({}, {}); pair skipped", src,
                dst);
      out.skipped.emplace_back(src, dst);
      continue;
    }
    out.relations.push_back({src, dst, *kind});
  }
  return out;
}

DedupResult dedup_similar(const std::vector<corpus::Skill>& skills,
                          const std::vector<Relation>& relations) {
  UnionFind uf;
  for (const auto& s : skills) uf.add(s.id);
  for (const auto& r : relations)
    if (r.kind == RelationKind::similar_to && uf.contains(r.src) &&
        uf.contains(r.dst))
      uf.merge(r.src, r.dst);

  // Representative per component: highest downloads, ties by lowest id.
  std::map<std::string, const corpus::Skill*> best;
  for (const auto& s : skills) {
    std::string root = uf.find(s.id);
    auto it = best.find(root);
    if (it == best.end() || s.downloads > it->second->downloads ||
        (s.downloads == it->second->downloads && s.id < it->second->id))
      best[root] = &s;
  }
  std::set<std::string> kept;
  for (const auto& [_, s] : best) kept.insert(s->id);

  DedupResult out;
  for (const auto& s : skills)
    if (kept.count(s.id)) out.skills.push_back(s);
  for (const auto& r : relations)
    if (kept.count(r.src) && kept.count(r.dst)) out.relations.push_back(r);
  return out;
}

std::vector<SkillTeam> build_teams(const std::vector<corpus::Skill>& skills,
                                   const std::vector<Relation>& relations) {
  std::map<std::string, std::string> subcat;
  for (const auto& s : skills) subcat[s.id] = s.subcategory;

  UnionFind uf;
  for (const auto& s : skills) uf.add(s.id);
  for (const auto& r : relations) {
    if (r.kind != RelationKind::compose_with) continue;
    auto a = subcat.find(r.src), b = subcat.find(r.dst);
    if (a == subcat.end() || b == subcat.end()) continue;
    if (a->second.empty() || a->second != b->second) continue;
    uf.merge(r.src, r.dst);
  }

  std::map<std::string, std::vector<std::string>> components;
  for (const auto& s : skills) components[uf.find(s.id)].push_back(s.id);

  std::vector<SkillTeam> teams;
  for (auto& [_, members] : components) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    teams.push_back({std::move(members)});
  }
  std::sort(teams.begin(), teams.end(),
            [](const SkillTeam& a, const SkillTeam& b) {
              return a.member_ids < b.member_ids;
            });
  return teams;
}

std::string relations_to_jsonl(const std::vector<Relation>& relations) {
  std::string out;
  for (const auto& r : relations) {
    nlohmann::json j = {
        {"src", r.src}, {"dst", r.dst}, {"kind", to_string(r.kind)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Relation> relations_from_jsonl(const std::string& text) {
  std::vector<Relation> out;
  for (const auto& line : util::split_lines(text)) {
    if (util::trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    auto kind = relation_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) continue;
    out.push_back({j.at("src").get<std::string>(),
                   j.at("dst").get<std::string>(), *kind});
  }
  return out;
}

}  // namespace skillforge::compose
