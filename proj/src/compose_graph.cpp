#include "skillforge/compose/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "skillforge/util/log.hpp"

namespace skillforge::compose {

CompositionGraph CompositionGraph::from_relations(
    const std::vector<corpus::Skill>& skills,
    const std::vector<Relation>& relations) {
  std::map<std::string, std::string> subcat;
  for (const auto& s : skills) subcat[s.id] = s.subcategory;

  CompositionGraph g;
  for (const auto& r : relations) {
    if (r.kind != RelationKind::depends_on) continue;
    auto a = subcat.find(r.src), b = subcat.find(r.dst);
    if (a == subcat.end() || b == subcat.end()) continue;
    if (a->second == b->second) continue;  // every edge crosses subcategories
    if (r.src == r.dst) continue;
    g.add_edge(r.src, r.dst);
  }
  return g;
}

void CompositionGraph::add_node(const std::string& id) { nodes_.insert(id); }

void CompositionGraph::add_edge(const std::string& src, const std::string& dst) {
  if (src == dst) throw std::invalid_argument("self-loop edge: " + src);
  nodes_.insert(src);
  nodes_.insert(dst);
  auto& out = adj_[src];
  if (std::find(out.begin(), out.end(), dst) == out.end()) {
    out.push_back(dst);
    std::sort(out.begin(), out.end());
  }
}

void CompositionGraph::erase_nodes(const std::vector<std::string>& ids) {
  for (const auto& id : ids) {
    nodes_.erase(id);
    adj_.erase(id);
  }
}

std::vector<std::string> CompositionGraph::successors(
    const std::string& id) const {
  std::vector<std::string> out;
  auto it = adj_.find(id);
  if (it == adj_.end()) return out;
  for (const auto& dst : it->second)
    if (nodes_.count(dst)) out.push_back(dst);
  return out;
}

std::vector<std::pair<std::string, std::string>> CompositionGraph::edges()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [src, dsts] : adj_)
    if (nodes_.count(src))
      for (const auto& dst : dsts)
        if (nodes_.count(dst)) out.emplace_back(src, dst);
  return out;
}

namespace {

struct DfsState {
  const CompositionGraph& graph;
  std::vector<std::string> best;
  std::set<std::string> visited;
  std::vector<std::string> path;
  long long budget;
  bool exceeded = false;

  void dfs(const std::string& u) {
    if (--budget < 0) {
      exceeded = true;
      return;
    }
    bool extended = false;
    for (const auto& w : graph.successors(u)) {
      if (visited.count(w)) continue;
      visited.insert(w);
      path.push_back(w);
      dfs(w);
      path.pop_back();
      visited.erase(w);
      extended = true;
      if (exceeded) return;
    }
    // Only maximal paths compete; strict > keeps the first one completed.
    if (!extended && path.size() > best.size()) best = path;
  }
};

}  // namespace

PathSearchResult longest_simple_path(const CompositionGraph& graph,
                                     const std::string& v, long long budget) {
  if (!graph.nodes().count(v))
    throw std::invalid_argument("start node not in graph: " + v);
  DfsState state{graph, {v}, {v}, {v}, budget};
  state.dfs(v);
  if (state.exceeded)
    log::warn("longest_simple_path: search budget exceeded at node {}", v);
  return {state.best, state.exceeded};
}

std::vector<std::vector<std::string>> greedy_path_cover(CompositionGraph graph,
                                                        long long budget) {
  std::vector<std::vector<std::string>> cover;
  while (!graph.empty()) {
    std::vector<std::string> best;
    // Nodes scan in ascending id order, and only a strictly longer path
    // replaces the incumbent, so argmax ties resolve to the lowest id.
    for (const auto& v : graph.nodes()) {
      auto result = longest_simple_path(graph, v, budget);
      if (result.path.size() > best.size()) best = result.path;
    }
    if (best.size() < 2) break;  // only isolated nodes left
    graph.erase_nodes(best);
    cover.push_back(std::move(best));
  }
  return cover;
}

}  // namespace skillforge::compose
