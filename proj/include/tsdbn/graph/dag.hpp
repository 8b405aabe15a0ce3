#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "../error.hpp"

namespace tsdbn {

using Edge = std::pair<std::size_t, std::size_t>;

// Directed acyclic graph over named nodes. Every mutation keeps the graph
// acyclic: additions and reversals that would close a cycle are refused.
class Dag {
 public:
  Dag() = default;

  explicit Dag(std::vector<std::string> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size() * nodes_.size(), 0) {
    parents_.resize(nodes_.size());
    children_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (std::size_t j = i + 1; j < nodes_.size(); ++j)
        if (nodes_[i] == nodes_[j]) throw ValidationError("duplicate node name '" + nodes_[i] + "'");
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& name(std::size_t i) const { return nodes_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i] == name) return i;
    return std::nullopt;
  }

  std::size_t index(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ValidationError("unknown node '" + std::string(name) + "'");
  }

  bool has_edge(std::size_t from, std::size_t to) const { return adj_[from * size() + to] != 0; }
  bool adjacent(std::size_t a, std::size_t b) const { return has_edge(a, b) || has_edge(b, a); }

  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_.at(node); }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }

  std::size_t edge_count() const { return edge_count_; }

  // Edges in (from, to) index order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
  }

  // True when a directed path from -> ... -> to exists (a node reaches itself).
  bool reaches(std::size_t from, std::size_t to) const {
    if (from == to) return true;
    std::vector<char> seen(size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto c : children_[u]) {
        if (c == to) return true;
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
      }
    }
    return false;
  }

  // Adds from -> to unless it would close a cycle. Adding an existing edge is
  // accepted without change.
  bool try_add(std::size_t from, std::size_t to) {
    check(from);
    check(to);
    if (from == to) throw ValidationError("self-loop on '" + nodes_[from] + "'");
    if (has_edge(from, to)) return true;
    if (reaches(to, from)) return false;
    insert(from, to);
    return true;
  }

  void remove_edge(std::size_t from, std::size_t to) {
    if (!has_edge(from, to)) return;
    adj_[from * size() + to] = 0;
    std::erase(parents_[to], from);
    std::erase(children_[from], to);
    --edge_count_;
  }

  // Replaces from -> to by to -> from unless that closes a cycle.
  bool try_reverse(std::size_t from, std::size_t to) {
    if (!has_edge(from, to)) return false;
    remove_edge(from, to);
    if (reaches(from, to)) {
      insert(from, to);
      return false;
    }
    insert(to, from);
    return true;
  }

  std::vector<std::size_t> topological_order() const {
    std::vector<std::size_t> indeg(size()), order;
    for (std::size_t i = 0; i < size(); ++i) indeg[i] = parents_[i].size();
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < size(); ++i)
      if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
      const auto u = ready.front();
      ready.pop_front();
      order.push_back(u);
      auto kids = children_[u];
      std::sort(kids.begin(), kids.end());
      for (auto c : kids)
        if (--indeg[c] == 0) ready.push_back(c);
    }
    if (order.size() != size()) throw NumericError("graph contains a cycle");
    return order;
  }

  // Nodes with a directed path into `node`, excluding itself.
  std::vector<std::size_t> ancestors(std::size_t node) const {
    std::vector<char> seen(size(), 0);
    std::vector<std::size_t> stack{node}, out;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto p : parents_[u])
        if (!seen[p]) {
          seen[p] = 1;
          out.push_back(p);
          stack.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Dag& a, const Dag& b) { return a.nodes_ == b.nodes_ && a.adj_ == b.adj_; }

 private:
  void check(std::size_t i) const {
    if (i >= size()) throw ValidationError("node index " + std::to_string(i) + " out of range");
  }

  void insert(std::size_t from, std::size_t to) {
    adj_[from * size() + to] = 1;
    parents_[to].push_back(from);
    children_[from].push_back(to);
    std::sort(parents_[to].begin(), parents_[to].end());
    std::sort(children_[from].begin(), children_[from].end());
    ++edge_count_;
  }

  std::vector<std::string> nodes_;
  std::vector<char> adj_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t edge_count_ = 0;
};

// Value-returning form of Dag::try_add: the extended graph, or nullopt when
// the edge would close a cycle.
inline std::optional<Dag> try_add_edge(const Dag& g, std::string_view from, std::string_view to) {
  Dag out = g;
  if (!out.try_add(g.index(from), g.index(to))) return std::nullopt;
  return out;
}

// Partially directed graph; directed and undirected edge sets are disjoint.
class Cpdag {
 public:
  Cpdag() = default;
  explicit Cpdag(std::vector<std::string> nodes)
      : nodes_(std::move(nodes)), dir_(nodes_.size() * nodes_.size(), 0), und_(nodes_.size() * nodes_.size(), 0) {}

  explicit Cpdag(const Dag& g) : Cpdag(g.nodes()) {
    for (auto [a, b] : g.edges()) set_directed(a, b);
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& name(std::size_t i) const { return nodes_.at(i); }

  std::size_t index(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i] == name) return i;
    throw ValidationError("unknown node '" + std::string(name) + "'");
  }

  bool has_directed(std::size_t a, std::size_t b) const { return dir_[a * size() + b] != 0; }
  bool has_undirected(std::size_t a, std::size_t b) const { return und_[a * size() + b] != 0; }
  bool adjacent(std::size_t a, std::size_t b) const {
    return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
  }

  void set_directed(std::size_t a, std::size_t b) {
    if (a == b) throw ValidationError("self-loop on '" + nodes_[a] + "'");
    clear(a, b);
    dir_[a * size() + b] = 1;
  }

  void set_undirected(std::size_t a, std::size_t b) {
    if (a == b) throw ValidationError("self-loop on '" + nodes_[a] + "'");
    clear(a, b);
    und_[a * size() + b] = und_[b * size() + a] = 1;
  }

  void clear(std::size_t a, std::size_t b) {
    dir_[a * size() + b] = dir_[b * size() + a] = 0;
    und_[a * size() + b] = und_[b * size() + a] = 0;
  }

  std::vector<Edge> directed_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (has_directed(i, j)) out.emplace_back(i, j);
    return out;
  }

  // Each undirected edge once, as (lower index, higher index).
  std::vector<Edge> undirected_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (has_undirected(i, j)) out.emplace_back(i, j);
    return out;
  }

  std::size_t edge_count() const { return directed_edges().size() + undirected_edges().size(); }

  std::vector<std::size_t> adjacent_nodes(std::size_t a) const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < size(); ++b)
      if (b != a && adjacent(a, b)) out.push_back(b);
    return out;
  }

  friend bool operator==(const Cpdag& a, const Cpdag& b) {
    return a.nodes_ == b.nodes_ && a.dir_ == b.dir_ && a.und_ == b.und_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<char> dir_;
  std::vector<char> und_;
};

}  // namespace tsdbn
