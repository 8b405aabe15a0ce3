#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "../dbn/dbn.hpp"
#include "../dbn/discrete.hpp"
#include "../error.hpp"
#include "../graph/dag.hpp"

namespace tsdbn {

struct EdgeFrequency {
  std::string from;
  std::string to;
  std::size_t count = 0;
  std::size_t rank = 0;  // 1-based
};

struct EdgeFrequencyTable {
  std::vector<std::string> nodes;
  std::size_t graphs = 0;
  std::vector<EdgeFrequency> edges;  // in rank order
};

// Counts how many input graphs contain each directed edge. Ranked by count
// (descending), then by (from, to) name.
inline EdgeFrequencyTable edge_frequencies(const std::vector<Dag>& graphs) {
  if (graphs.size() < 2) throw ValidationError("averaging needs at least two graphs");
  EdgeFrequencyTable t;
  t.nodes = graphs.front().nodes();
  t.graphs = graphs.size();
  const std::set<std::string> ref(t.nodes.begin(), t.nodes.end());
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    if (std::set<std::string>(g.nodes().begin(), g.nodes().end()) != ref || g.size() != t.nodes.size())
      throw ValidationError("averaging: graph " + std::to_string(i + 1) + " has a different node set");
    for (auto [a, b] : g.edges()) ++counts[{g.name(a), g.name(b)}];
  }
  for (const auto& [e, c] : counts) t.edges.push_back({e.first, e.second, c, 0});
  std::stable_sort(t.edges.begin(), t.edges.end(), [](const EdgeFrequency& a, const EdgeFrequency& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t i = 0; i < t.edges.size(); ++i) t.edges[i].rank = i + 1;
  return t;
}

// Edges with count >= cutoff added in rank order through the cycle guard.
inline Dag average_structure(const EdgeFrequencyTable& t, std::size_t cutoff) {
  if (cutoff < 1 || cutoff > t.graphs)
    throw ValidationError("averaging cutoff must lie in [1, " + std::to_string(t.graphs) + "]");
  Dag g(t.nodes);
  for (const auto& e : t.edges)
    if (e.count >= cutoff) g.try_add(g.index(e.from), g.index(e.to));
  return g;
}

struct CutoffScore {
  std::size_t cutoff = 0;
  std::size_t edges = 0;
  double bic = -std::numeric_limits<double>::infinity();
  double loglik = -std::numeric_limits<double>::infinity();
  std::string error;  // parameterization failure, empty on success
};

struct CutoffSelection {
  std::size_t cutoff = 0;
  Dag graph;
  std::vector<CutoffScore> candidates;
};

// Scores each candidate cutoff by the BIC of the averaged graph fitted as a
// discrete two-slice network on `data` (variable-level columns) and keeps the
// best; ties go to the larger cutoff.
inline CutoffSelection select_cutoff(const std::vector<Dag>& graphs, const DiscreteData& data,
                                     std::vector<std::size_t> candidates, double kappa = 0.0,
                                     double cell_budget = kDefaultCellBudget) {
  const auto table = edge_frequencies(graphs);
  if (candidates.empty())
    for (std::size_t c = 1; c <= table.graphs; ++c) candidates.push_back(c);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const auto lagged = two_slice_discrete(data);
  CutoffSelection sel;
  std::optional<std::size_t> best;
  for (auto c : candidates) {
    CutoffScore s;
    s.cutoff = c;
    try {
      const Dag g = average_structure(table, c);
      s.edges = g.edge_count();
      const auto dbn = fit_cpts(as_two_slice(g, data.names), lagged, kappa, cell_budget);
      s.loglik = loglik(dbn, lagged);
      s.bic = bic_discrete(dbn, lagged);
      if (!best || s.bic >= sel.candidates[*best].bic) {
        best = sel.candidates.size();
        sel.graph = g;
        sel.cutoff = c;
      }
    } catch (const Error& e) {
      s.error = e.what();
    }
    sel.candidates.push_back(s);
  }
  if (!best) throw DataError("averaging: every candidate cutoff failed to parameterize");
  return sel;
}

}  // namespace tsdbn
