#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skillforge/corpus/skill.hpp"
#include "skillforge/gateway/gateway.hpp"

namespace skillforge::compose {

enum class RelationKind { compose_with, depends_on, similar_to, belong_to };

std::string to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(const std::string& raw);

struct Relation {
  std::string src;
  std::string dst;
  RelationKind kind = RelationKind::compose_with;

  bool operator==(const Relation&) const = default;
};

struct SkillTeam {
  std::vector<std::string> member_ids;  // same subcategory, sorted, >= 2
};

// Candidate pairs for relation judging: every intra-subcategory pair plus
// the top `cross_budget` cross-subcategory pairs by tag overlap.
std::vector<std::pair<std::string, std::string>> candidate_pairs(
    const std::vector<corpus::Skill>& skills, size_t cross_budget);

struct ClassifyOutcome {
  std::vector<Relation> relations;
  std::vector<std::pair<std::string, std::string>> skipped;  // unparseable
};

// One judged relation per candidate pair; verdicts that do not parse are
// skipped with a warning rather than failing the stage.
ClassifyOutcome classify_relations(
    const std::vector<corpus::Skill>& skills,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    gateway::LlmGateway& gateway, const std::string& backend_id);

struct DedupResult {
  std::vector<corpus::Skill> skills;
  std::vector<Relation> relations;  // relations incident to removed skills dropped
};

// Within each connected component of the undirected similar-to graph, keeps
// the member with the highest downloads (ties: lowest id).
DedupResult dedup_similar(const std::vector<corpus::Skill>& skills,
                          const std::vector<Relation>& relations);

// Teams are connected components (size >= 2) of the undirected graph whose
// edges are compose-with pairs sharing a subcategory.
std::vector<SkillTeam> build_teams(const std::vector<corpus::Skill>& skills,
                                   const std::vector<Relation>& relations);

// Relations persist as JSON lines of {src, dst, kind}.
std::string relations_to_jsonl(const std::vector<Relation>& relations);
std::vector<Relation> relations_from_jsonl(const std::string& text);

}  // namespace skillforge::compose
