#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "skillforge/compose/flatten.hpp"
#include "skillforge/compose/graph.hpp"
#include "skillforge/compose/relations.hpp"

using namespace skillforge;
using namespace skillforge::compose;

namespace {

corpus::Skill make_skill(const std::string& id, long long downloads = 0,
                         const std::string& subcategory = "sub") {
  corpus::Skill s;
  s.id = id;
  s.name = "name-" + id;
  s.description = "about " + id;
  s.tags = {"t-" + id};
  s.body = "body of " + id;
  s.subcategory = subcategory;
  s.downloads = downloads;
  return s;
}

// ---- independent reference implementation (enumeration-based) ----

using Adjacency = std::map<std::string, std::set<std::string>>;

void enumerate_paths(const Adjacency& adj, std::vector<std::string>& path,
                     std::set<std::string>& used,
                     std::vector<std::vector<std::string>>& all) {
  all.push_back(path);
  auto it = adj.find(path.back());
  if (it == adj.end()) return;
  for (const auto& next : it->second) {
    if (used.count(next)) continue;
    used.insert(next);
    path.push_back(next);
    enumerate_paths(adj, path, used, all);
    path.pop_back();
    used.erase(next);
  }
}

// Longest simple path from v: max length, then lexicographically smallest
// node sequence (the first one a depth-first search completes).
std::vector<std::string> reference_lsp(const Adjacency& adj,
                                       const std::string& v) {
  std::vector<std::vector<std::string>> all;
  std::vector<std::string> path = {v};
  std::set<std::string> used = {v};
  enumerate_paths(adj, path, used, all);
  std::vector<std::string> best = {v};
  for (const auto& candidate : all) {
    if (candidate.size() > best.size() ||
        (candidate.size() == best.size() && candidate < best))
      best = candidate;
  }
  return best;
}

std::vector<std::vector<std::string>> reference_cover(Adjacency adj,
                                                      std::set<std::string> nodes) {
  std::vector<std::vector<std::string>> cover;
  while (!nodes.empty()) {
    std::vector<std::string> best;
    for (const auto& v : nodes) {  // ascending ids; strict > keeps lowest
      Adjacency live;
      for (const auto& [src, dsts] : adj) {
        if (!nodes.count(src)) continue;
        for (const auto& dst : dsts)
          if (nodes.count(dst)) live[src].insert(dst);
      }
      auto path = reference_lsp(live, v);
      if (path.size() > best.size()) best = path;
    }
    if (best.size() < 2) break;
    for (const auto& n : best) nodes.erase(n);
    cover.push_back(best);
  }
  return cover;
}

struct RandomGraph {
  CompositionGraph graph;
  Adjacency adj;
  std::set<std::string> nodes;
};

RandomGraph random_digraph(std::mt19937_64& rng, bool dag) {
  RandomGraph out;
  int n = 2 + static_cast<int>(rng() % 8);  // 2..9 nodes
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  double density = 0.1 + 0.4 * (static_cast<double>(rng() % 1000) / 1000.0);
  for (int i = 0; i < n; ++i) {
    out.graph.add_node(ids[i]);
    out.nodes.insert(ids[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dag && j < i) continue;  // forward edges only
      if (static_cast<double>(rng() % 1000) / 1000.0 < density) {
        out.graph.add_edge(ids[i], ids[j]);
        out.adj[ids[i]].insert(ids[j]);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("relation verdict parsing accepts naming variants") {
  CHECK(*relation_kind_from_string("DependsOn") == RelationKind::depends_on);
  CHECK(*relation_kind_from_string("Depends on") == RelationKind::depends_on);
  CHECK(*relation_kind_from_string("compose_with") == RelationKind::compose_with);
  CHECK(*relation_kind_from_string("Similar to") == RelationKind::similar_to);
  CHECK(*relation_kind_from_string("BelongTo") == RelationKind::belong_to);
  CHECK_FALSE(relation_kind_from_string("garbage").has_value());
}

TEST_CASE("classify_relations: verdicts recorded, garbage skipped") {
  std::vector<corpus::Skill> skills = {make_skill("a"), make_skill("b"),
                                       make_skill("c")};
  gateway::LlmGateway gw;
  gw.register_script("o", {{"other", "{\"relation\": \"DependsOn\"}", {}},
                           {"other", "{\"relation\": \"BelongTo\"}", {}},
                           {"other", "no verdict here", {}}});
  auto outcome = classify_relations(
      skills, {{"a", "b"}, {"a", "c"}, {"b", "c"}}, gw, "o");
  REQUIRE(outcome.relations.size() == 2);
  CHECK(outcome.relations[0] == Relation{"a", "b", RelationKind::depends_on});
  CHECK(outcome.relations[1].kind == RelationKind::belong_to);
  REQUIRE(outcome.skipped.size() == 1);
  CHECK(outcome.skipped[0] == std::make_pair(std::string("b"), std::string("c")));
}

TEST_CASE("dedup_similar keeps one skill per component") {
  SUBCASE("pair keeps higher downloads") {
    std::vector<corpus::Skill> skills = {make_skill("a", 10), make_skill("b", 5)};
    auto result = dedup_similar(skills, {{"a", "b", RelationKind::similar_to}});
    REQUIRE(result.skills.size() == 1);
    CHECK(result.skills[0].id == "a");
  }
  SUBCASE("no similar edges: identity") {
    std::vector<corpus::Skill> skills = {make_skill("a", 1), make_skill("b", 2)};
    auto result = dedup_similar(skills, {{"a", "b", RelationKind::depends_on}});
    CHECK(result.skills.size() == 2);
    CHECK(result.relations.size() == 1);
  }
  SUBCASE("triangle keeps the max-download member") {
    std::vector<corpus::Skill> skills = {make_skill("a", 4), make_skill("b", 4),
                                         make_skill("c", 9)};
    auto result = dedup_similar(skills,
                                {{"a", "b", RelationKind::similar_to},
                                 {"b", "c", RelationKind::similar_to}});
    REQUIRE(result.skills.size() == 1);
    CHECK(result.skills[0].id == "c");
  }
  SUBCASE("ties break to the lowest id") {
    std::vector<corpus::Skill> skills = {make_skill("b", 4), make_skill("a", 4)};
    auto result = dedup_similar(skills, {{"a", "b", RelationKind::similar_to}});
    REQUIRE(result.skills.size() == 1);
    CHECK(result.skills[0].id == "a");
  }
  SUBCASE("relations incident to removed skills are dropped") {
    std::vector<corpus::Skill> skills = {make_skill("a", 10), make_skill("b", 5),
                                         make_skill("c", 1)};
    auto result = dedup_similar(
        skills, {{"a", "b", RelationKind::similar_to},
                 {"b", "c", RelationKind::compose_with}});
    CHECK(result.relations.empty());  // b was removed
  }
}

TEST_CASE("build_teams: connected components of same-subcategory compose edges") {
  SUBCASE("chain forms one team") {
    std::vector<corpus::Skill> skills = {make_skill("a"), make_skill("b"),
                                         make_skill("c")};
    auto teams = build_teams(skills, {{"a", "b", RelationKind::compose_with},
                                      {"b", "c", RelationKind::compose_with}});
    REQUIRE(teams.size() == 1);
    CHECK(teams[0].member_ids == std::vector<std::string>{"a", "b", "c"});
  }
  SUBCASE("cross-subcategory compose edges never form teams") {
    std::vector<corpus::Skill> skills = {make_skill("a", 0, "x"),
                                         make_skill("b", 0, "y")};
    CHECK(build_teams(skills, {{"a", "b", RelationKind::compose_with}}).empty());
  }
  SUBCASE("no edges, no teams") {
    std::vector<corpus::Skill> skills = {make_skill("a"), make_skill("b")};
    CHECK(build_teams(skills, {}).empty());
  }
}

TEST_CASE("longest_simple_path basics") {
  CompositionGraph g;
  SUBCASE("unique chain") {
    g.add_edge("a", "b");
    g.add_edge("b", "c");
    CHECK(longest_simple_path(g, "a").path ==
          std::vector<std::string>{"a", "b", "c"});
  }
  SUBCASE("diamond: first completed in adjacency order wins") {
    g.add_edge("a", "b");
    g.add_edge("a", "c");
    g.add_edge("b", "d");
    g.add_edge("c", "d");
    auto result = longest_simple_path(g, "a");
    CHECK(result.path == std::vector<std::string>{"a", "b", "d"});
    CHECK(result.path == reference_lsp({{"a", {"b", "c"}}, {"b", {"d"}},
                                        {"c", {"d"}}}, "a"));
  }
  SUBCASE("isolated node yields itself") {
    g.add_node("v");
    CHECK(longest_simple_path(g, "v").path == std::vector<std::string>{"v"});
  }
  SUBCASE("unknown start rejected") {
    g.add_node("v");
    CHECK_THROWS_AS(longest_simple_path(g, "zz"), std::invalid_argument);
  }
}

TEST_CASE("greedy_path_cover basics") {
  SUBCASE("chain plus isolated node") {
    CompositionGraph g;
    g.add_edge("a", "b");
    g.add_edge("b", "c");
    g.add_node("d");
    auto cover = greedy_path_cover(g);
    REQUIRE(cover.size() == 1);
    CHECK(cover[0] == std::vector<std::string>{"a", "b", "c"});  // d unconsumed
  }
  SUBCASE("empty graph") {
    CHECK(greedy_path_cover(CompositionGraph{}).empty());
  }
  SUBCASE("two disjoint chains: longer first") {
    CompositionGraph g;
    g.add_edge("p", "q");
    g.add_edge("q", "r");
    g.add_edge("x", "y");
    auto cover = greedy_path_cover(g);
    REQUIRE(cover.size() == 2);
    CHECK(cover[0] == std::vector<std::string>{"p", "q", "r"});
    CHECK(cover[1] == std::vector<std::string>{"x", "y"});
  }
}

TEST_CASE("cover matches the enumeration reference on random graphs") {
  std::mt19937_64 rng(1234);
  for (int iter = 0; iter < 120; ++iter) {
    bool dag = iter % 2 == 0;
    auto rg = random_digraph(rng, dag);
    auto got = greedy_path_cover(rg.graph);
    auto expected = reference_cover(rg.adj, rg.nodes);
    CHECK(got == expected);

    // Structural invariants: node-disjoint, direction-respecting, length >= 2.
    std::set<std::string> seen;
    for (const auto& path : got) {
      CHECK(path.size() >= 2);
      for (const auto& n : path) CHECK(seen.insert(n).second);
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        auto succ = rg.adj[path[i]];
        CHECK(succ.count(path[i + 1]) == 1);
      }
    }
  }
}

TEST_CASE("longest_simple_path starts at v with length >= 1 (random graphs)") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    auto rg = random_digraph(rng, false);
    for (const auto& v : rg.nodes) {
      auto result = longest_simple_path(rg.graph, v);
      CHECK(result.path.size() >= 1);
      CHECK(result.path.front() == v);
      CHECK(result.path == reference_lsp(rg.adj, v));
    }
  }
}

TEST_CASE("search budget flags truncation instead of hanging") {
  CompositionGraph g;  // complete digraph on 8 nodes
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back("n" + std::to_string(i));
  for (const auto& a : ids)
    for (const auto& b : ids)
      if (a != b) g.add_edge(a, b);
  auto result = longest_simple_path(g, "n0", /*budget=*/50);
  CHECK(result.budget_exceeded);
}

TEST_CASE("composition graph construction filters by kind and subcategory") {
  std::vector<corpus::Skill> skills = {make_skill("a", 0, "x"),
                                       make_skill("b", 0, "y"),
                                       make_skill("c", 0, "x")};
  auto g = CompositionGraph::from_relations(
      skills, {{"a", "b", RelationKind::depends_on},
               {"a", "c", RelationKind::depends_on},   // same subcategory
               {"b", "c", RelationKind::compose_with}});  // wrong kind
  CHECK(g.edges() == std::vector<std::pair<std::string, std::string>>{
                         {"a", "b"}});
  CHECK_THROWS_AS(g.add_edge("a", "a"), std::invalid_argument);
}

TEST_CASE("flatten_composite") {
  auto m1 = make_skill("alpha");
  auto m2 = make_skill("beta");

  SUBCASE("graph flatten: deterministic concatenation in order") {
    auto flat = flatten_composite({m1, m2}, corpus::SkillKind::graph);
    CHECK(flat.kind == corpus::SkillKind::graph);
    CHECK(flat.name == "name-alpha + name-beta");
    size_t first = flat.body.find("## name-alpha");
    size_t second = flat.body.find("## name-beta");
    CHECK(first != std::string::npos);
    CHECK(second != std::string::npos);
    CHECK(first < second);
    CHECK(flat.tags == std::vector<std::string>{"t-alpha", "t-beta"});
  }
  SUBCASE("team flatten uses the scripted workflow text") {
    gateway::LlmGateway gw;
    gw.register_script("o", {{"other", "## Roles\nworkflow body", {}}});
    auto flat = flatten_composite({m1, m2}, corpus::SkillKind::team, &gw, "o");
    CHECK(flat.body == "## Roles\nworkflow body");
    CHECK(flat.kind == corpus::SkillKind::team);
  }
  SUBCASE("re-parsing a flattened composite preserves kind") {
    auto flat = flatten_composite({m1, m2}, corpus::SkillKind::graph);
    auto reparsed = corpus::parse_skill_md(corpus::emit_skill_md(flat), flat.id);
    CHECK(reparsed.kind == corpus::SkillKind::graph);
    CHECK(reparsed.name == flat.name);
  }
  SUBCASE("fewer than two members rejected") {
    CHECK_THROWS_AS(flatten_composite({m1}, corpus::SkillKind::team),
                    std::invalid_argument);
  }
}

TEST_CASE("relations persist as JSON lines") {
  std::vector<Relation> relations = {{"a", "b", RelationKind::depends_on},
                                     {"b", "c", RelationKind::similar_to}};
  CHECK(relations_from_jsonl(relations_to_jsonl(relations)) == relations);
}
