#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "../graph/dag.hpp"
#include "ci_test.hpp"

namespace tsdbn {

namespace detail {

// Calls f on every size-k subset of `items` in lexicographic position order;
// stops early when f returns true. Returns whether it stopped early.
inline bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k,
                            const std::function<bool(const std::vector<std::size_t>&)>& f) {
  if (k > items.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::size_t> s(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) s[i] = items[idx[i]];
    if (f(s)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

// Turns an undirected skeleton into a CPDAG. Tier constraints orient
// cross-tier edges forward first. Every unshielded triple x - z - y that
// `collider` accepts proposes x -> z <- y; an edge proposed in both
// directions (or against a tier) stays as it was. Meek rules R1-R3 then run
// in synchronous rounds, skipping edges implied both ways, so the result does
// not depend on node order.
inline void orient_skeleton(Cpdag& g, const std::function<bool(std::size_t, std::size_t, std::size_t)>& collider,
                            const std::vector<int>& tiers) {
  const std::size_t m = g.size();
  if (!tiers.empty()) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (g.has_undirected(a, b) && tiers[a] < tiers[b]) g.set_directed(a, b);
  }
  std::set<std::pair<std::size_t, std::size_t>> arrows;
  for (std::size_t z = 0; z < m; ++z) {
    const auto adj = g.adjacent_nodes(z);
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        const auto x = adj[i], y = adj[j];
        if (g.adjacent(x, y) || !collider(x, z, y)) continue;
        arrows.emplace(x, z);
        arrows.emplace(y, z);
      }
  }
  for (auto [a, b] : arrows) {
    if (arrows.count({b, a})) continue;
    if (g.has_undirected(a, b)) g.set_directed(a, b);
  }

  while (true) {
    std::set<std::pair<std::size_t, std::size_t>> implied;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v) {
        if (!g.has_undirected(u, v)) continue;
        bool hit = false;
        for (std::size_t a = 0; a < m && !hit; ++a) {
          if (a == u || a == v) continue;
          if (g.has_directed(a, u) && !g.adjacent(a, v)) hit = true;          // R1
          if (g.has_directed(u, a) && g.has_directed(a, v)) hit = true;       // R2
        }
        for (std::size_t c = 0; c < m && !hit; ++c) {                          // R3
          if (c == u || c == v || !g.has_undirected(u, c) || !g.has_directed(c, v)) continue;
          for (std::size_t d = c + 1; d < m && !hit; ++d)
            if (d != u && d != v && g.has_undirected(u, d) && g.has_directed(d, v) && !g.adjacent(c, d)) hit = true;
        }
        if (hit) implied.emplace(u, v);
      }
    bool changed = false;
    for (auto [u, v] : implied) {
      if (implied.count({v, u})) continue;
      g.set_directed(u, v);
      changed = true;
    }
    if (!changed) break;
  }
}

inline Cpdag complete_undirected(const std::vector<std::string>& names) {
  Cpdag g(names);
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) g.set_undirected(a, b);
  return g;
}

}  // namespace detail

struct ConstraintOptions {
  std::vector<int> tiers;  // optional temporal tiers (see SearchOptions)
  std::optional<std::size_t> max_condition_size;
};

struct PcResult {
  Cpdag graph;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> sepsets;
  std::size_t max_level = 0;
  std::size_t tests = 0;
};

// PC-Stable. Adjacency sets are frozen at the start of each level so the
// skeleton does not depend on variable order. Unshielded triples are oriented
// conservatively: every subset of adj(x) and adj(y) up to the deepest level
// reached is re-tested, and x -> z <- y is used only when z lies in none of
// the separating sets found.
inline PcResult pc_stable(const NumericData& data, const CiTest& test, const ConstraintOptions& opt = {}) {
  const std::size_t m = data.m();
  if (!opt.tiers.empty() && opt.tiers.size() != m) throw ValidationError("tier vector size differs from node count");
  const std::size_t calls0 = test.calls();
  PcResult res;
  res.graph = detail::complete_undirected(data.names);
  auto& g = res.graph;
  for (std::size_t level = 0;; ++level) {
    if (opt.max_condition_size && level > *opt.max_condition_size) break;
    std::vector<std::vector<std::size_t>> frozen(m);
    for (std::size_t x = 0; x < m; ++x) frozen[x] = g.adjacent_nodes(x);
    bool any = false;
    for (std::size_t x = 0; x < m; ++x)
      for (auto y : frozen[x]) {
        if (!g.adjacent(x, y)) continue;
        std::vector<std::size_t> cand;
        for (auto v : frozen[x])
          if (v != y) cand.push_back(v);
        if (cand.size() < level || level + 4 > test.rows()) continue;
        any = true;
        detail::for_each_subset(cand, level, [&](const std::vector<std::size_t>& s) {
          if (!test(x, y, s).independent) return false;
          g.clear(x, y);
          res.sepsets[detail::ordered(x, y)] = s;
          return true;
        });
      }
    if (!any) break;
    res.max_level = level;
  }

  // Separating sets for every non-adjacent pair that closes an unshielded
  // triple, from the final adjacency sets.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<std::size_t>>> found;
  auto separators = [&](std::size_t x, std::size_t y) -> const std::vector<std::vector<std::size_t>>& {
    const auto key = detail::ordered(x, y);
    if (auto it = found.find(key); it != found.end()) return it->second;
    std::set<std::vector<std::size_t>> sets;
    for (auto [a, b] : {std::pair{x, y}, std::pair{y, x}}) {
      std::vector<std::size_t> cand;
      for (auto v : g.adjacent_nodes(a))
        if (v != b) cand.push_back(v);
      for (std::size_t l = 0; l <= std::min(res.max_level, cand.size()); ++l)
        detail::for_each_subset(cand, l, [&](const std::vector<std::size_t>& s) {
          if (s.size() + 4 <= test.rows() && test(key.first, key.second, s).independent) sets.insert(s);
          return false;
        });
    }
    return found.emplace(key, std::vector<std::vector<std::size_t>>(sets.begin(), sets.end())).first->second;
  };
  detail::orient_skeleton(
      g,
      [&](std::size_t x, std::size_t z, std::size_t y) {
        const auto& sets = separators(x, y);
        if (sets.empty()) return false;
        return std::none_of(sets.begin(), sets.end(),
                            [&](const auto& s) { return std::find(s.begin(), s.end(), z) != s.end(); });
      },
      opt.tiers);
  res.tests = test.calls() - calls0;
  return res;
}

struct IambResult {
  Cpdag graph;
  std::vector<std::vector<std::size_t>> blankets;  // after AND symmetrization, sorted
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> sepsets;
  std::size_t tests = 0;
};

// Markov blanket of `target` by incremental association: grow by the most
// associated candidate while it is dependent given the blanket, then drop
// members independent of the target given the rest.
inline std::vector<std::size_t> iamb_blanket(std::size_t target, std::size_t m, const CiTest& test) {
  std::vector<std::size_t> mb;
  while (mb.size() + 5 <= test.rows()) {
    std::optional<std::size_t> best;
    CiResult best_r;
    for (std::size_t x = 0; x < m; ++x) {
      if (x == target || std::find(mb.begin(), mb.end(), x) != mb.end()) continue;
      const auto r = test(target, x, mb);
      if (!best || r.statistic > best_r.statistic) {
        best = x;
        best_r = r;
      }
    }
    if (!best || best_r.independent) break;
    mb.push_back(*best);
  }
  for (std::size_t i = 0; i < mb.size();) {
    std::vector<std::size_t> rest = mb;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    if (test(target, mb[i], rest).independent)
      mb.erase(mb.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  std::sort(mb.begin(), mb.end());
  return mb;
}

// IAMB: blankets per node, AND-symmetrized; x and y in each other's blanket
// are neighbours unless some subset of the smaller blanket (all subsets up to
// 10 members, otherwise subsets of size <= 3) separates them. v-structures
// come from those separating sets.
inline IambResult iamb(const NumericData& data, const CiTest& test, const ConstraintOptions& opt = {}) {
  const std::size_t m = data.m();
  if (!opt.tiers.empty() && opt.tiers.size() != m) throw ValidationError("tier vector size differs from node count");
  const std::size_t calls0 = test.calls();
  IambResult res;
  std::vector<std::vector<std::size_t>> raw(m);
  for (std::size_t t = 0; t < m; ++t) raw[t] = iamb_blanket(t, m, test);
  auto contains = [](const std::vector<std::size_t>& v, std::size_t x) { return std::binary_search(v.begin(), v.end(), x); };
  res.blankets.assign(m, {});
  for (std::size_t x = 0; x < m; ++x)
    for (auto y : raw[x])
      if (contains(raw[y], x)) res.blankets[x].push_back(y);

  res.graph = Cpdag(data.names);
  for (std::size_t x = 0; x < m; ++x)
    for (auto y : res.blankets[x]) {
      if (y <= x) continue;
      std::vector<std::size_t> bx, by;
      for (auto v : res.blankets[x])
        if (v != y) bx.push_back(v);
      for (auto v : res.blankets[y])
        if (v != x) by.push_back(v);
      const auto& b = by.size() < bx.size() ? by : bx;
      const std::size_t max_size = b.size() <= 10 ? b.size() : 3;
      bool separated = false;
      for (std::size_t l = 0; l <= max_size && !separated; ++l) {
        if (l + 4 > test.rows()) break;
        separated = detail::for_each_subset(b, l, [&](const std::vector<std::size_t>& s) {
          if (!test(x, y, s).independent) return false;
          res.sepsets[{x, y}] = s;
          return true;
        });
      }
      if (!separated) res.graph.set_undirected(x, y);
    }
  detail::orient_skeleton(
      res.graph,
      [&](std::size_t x, std::size_t z, std::size_t y) {
        const auto it = res.sepsets.find(detail::ordered(x, y));
        return it != res.sepsets.end() && std::find(it->second.begin(), it->second.end(), z) == it->second.end();
      },
      opt.tiers);
  res.tests = test.calls() - calls0;
  return res;
}

}  // namespace tsdbn
