#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "skillforge/compose/relations.hpp"
#include "skillforge/corpus/skill.hpp"

namespace skillforge::compose {

// Cross-subcategory composition graph. Directed edges come from depends-on
// relations whose endpoints live in different subcategories; adjacency lists
// stay sorted by destination id so traversal order is deterministic.
class CompositionGraph {
 public:
  static CompositionGraph from_relations(
      const std::vector<corpus::Skill>& skills,
      const std::vector<Relation>& relations);

  void add_node(const std::string& id);
  // Rejects self-loops; inserts endpoints as nodes.
  void add_edge(const std::string& src, const std::string& dst);
  void erase_nodes(const std::vector<std::string>& ids);

  const std::set<std::string>& nodes() const { return nodes_; }
  // Sorted, filtered to live nodes.
  std::vector<std::string> successors(const std::string& id) const;
  bool empty() const { return nodes_.empty(); }
  std::vector<std::pair<std::string, std::string>> edges() const;

 private:
  std::set<std::string> nodes_;
  std::map<std::string, std::vector<std::string>> adj_;
};

struct PathSearchResult {
  std::vector<std::string> path;   // first element is the start node
  bool budget_exceeded = false;    // search was truncated by the cap
};

inline constexpr long long kDefaultPathBudget = 1'000'000;

// Longest simple directed path starting at `v`, by exhaustive DFS in
// adjacency order; among equal lengths the first path completed wins. The
// budget caps DFS node expansions on pathological graphs (a warning is
// logged and the flag set; results remain exact when the cap is not hit).
PathSearchResult longest_simple_path(const CompositionGraph& graph,
                                     const std::string& v,
                                     long long budget = kDefaultPathBudget);

// Greedy maximal-path cover: repeatedly extract the longest simple path over
// remaining nodes (argmax ties: lowest start id), stopping when only
// isolated nodes remain. Returned paths are node-disjoint with length >= 2.
std::vector<std::vector<std::string>> greedy_path_cover(
    CompositionGraph graph, long long budget = kDefaultPathBudget);

}  // namespace skillforge::compose
