#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "dag.hpp"

namespace tsdbn {

namespace detail {

// Pair state: 0 none, 1 a->b, 2 b->a, 3 undirected (a < b by index in `g`).
inline int pair_state(const Cpdag& g, std::size_t a, std::size_t b) {
  if (g.has_undirected(a, b)) return 3;
  if (g.has_directed(a, b)) return 1;
  if (g.has_directed(b, a)) return 2;
  return 0;
}

inline std::vector<std::size_t> node_mapping(const std::vector<std::string>& from,
                                             const std::vector<std::string>& to) {
  if (from.size() != to.size()) throw ValidationError("graphs have different node sets");
  std::vector<std::size_t> map(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto it = std::find(to.begin(), to.end(), from[i]);
    if (it == to.end()) throw ValidationError("graphs have different node sets ('" + from[i] + "' missing)");
    map[i] = static_cast<std::size_t>(it - to.begin());
  }
  return map;
}

}  // namespace detail

// Structural Hamming distance: number of node pairs whose edge state differs
// (missing, extra, reversed, or directed vs undirected each cost 1).
inline std::size_t shd(const Cpdag& g1, const Cpdag& g2) {
  const auto map = detail::node_mapping(g1.nodes(), g2.nodes());
  std::size_t d = 0;
  for (std::size_t a = 0; a < g1.size(); ++a) {
    for (std::size_t b = a + 1; b < g1.size(); ++b) {
      const int s1 = detail::pair_state(g1, a, b);
      int s2 = 0;
      const auto a2 = map[a], b2 = map[b];
      if (g2.has_undirected(a2, b2))
        s2 = 3;
      else if (g2.has_directed(a2, b2))
        s2 = 1;
      else if (g2.has_directed(b2, a2))
        s2 = 2;
      d += s1 != s2;
    }
  }
  return d;
}

inline std::size_t shd(const Dag& g1, const Dag& g2) { return shd(Cpdag(g1), Cpdag(g2)); }

// Consistent extension (Dor & Tarsi): repeatedly pick a node that is a sink
// among the remaining nodes and whose undirected neighbours are adjacent to
// all of its other neighbours, orient its undirected edges into it, and
// remove it. Candidates are scanned from the highest index down, so free
// choices follow node order (a -- b becomes a -> b). Fails when no candidate
// exists.
inline Dag extend_cpdag(const Cpdag& c) {
  const std::size_t n = c.size();
  Dag out(c.nodes());
  for (auto [a, b] : c.directed_edges())
    if (!out.try_add(a, b)) throw DataError("inextensible: directed part of the CPDAG is cyclic");
  std::vector<char> alive(n, 1);
  std::size_t remaining = n;
  while (remaining > 0) {
    std::optional<std::size_t> pick;
    for (std::size_t x = n; x-- > 0 && !pick;) {
      if (!alive[x]) continue;
      bool sink = true;
      for (std::size_t y = 0; y < n && sink; ++y)
        if (alive[y] && c.has_directed(x, y)) sink = false;
      if (!sink) continue;
      std::vector<std::size_t> adj;
      for (std::size_t y = 0; y < n; ++y)
        if (y != x && alive[y] && c.adjacent(x, y)) adj.push_back(y);
      bool ok = true;
      for (auto y : adj) {
        if (!c.has_undirected(x, y)) continue;
        for (auto z : adj)
          if (z != y && !c.adjacent(y, z)) ok = false;
      }
      if (ok) pick = x;
    }
    if (!pick) throw DataError("inextensible: no consistent extension of the CPDAG exists");
    const auto x = *pick;
    for (std::size_t y = 0; y < n; ++y) {
      if (alive[y] && c.has_undirected(x, y) && !out.try_add(y, x))
        throw DataError("inextensible: orientation would create a cycle");
    }
    alive[x] = 0;
    --remaining;
  }
  return out;
}

struct DagExtension {
  Dag graph;
  bool consistent = true;  // false when the fallback orientation was used
  std::size_t dropped = 0;
};

// Consistent extension when one exists. Otherwise directed edges are kept in
// index order through the cycle guard and each undirected a -- b (a < b) is
// tried as a -> b, then b -> a.
inline DagExtension extend_or_orient(const Cpdag& c) {
  try {
    return {extend_cpdag(c), true, 0};
  } catch (const DataError&) {
  }
  DagExtension out{Dag(c.nodes()), false, 0};
  for (auto [a, b] : c.directed_edges())
    if (!out.graph.try_add(a, b)) ++out.dropped;
  for (auto [a, b] : c.undirected_edges())
    if (!out.graph.try_add(a, b) && !out.graph.try_add(b, a)) ++out.dropped;
  return out;
}

// v-structures a -> c <- b with a, b non-adjacent, as (a, c, b) with a < b.
inline std::vector<std::array<std::size_t, 3>> v_structures(const Cpdag& g) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t c = 0; c < g.size(); ++c)
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b)
        if (g.has_directed(a, c) && g.has_directed(b, c) && !g.adjacent(a, b)) out.push_back({a, c, b});
  return out;
}

}  // namespace tsdbn
