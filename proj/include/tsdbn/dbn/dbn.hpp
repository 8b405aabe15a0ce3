#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../graph/dag.hpp"
#include "discrete.hpp"

namespace tsdbn {

// Conditional probability table. Parent configurations are mixed-radix
// indices over `parents` (first parent varies slowest); table[cfg * r + s].
struct Cpt {
  std::vector<std::size_t> parents;
  std::vector<std::size_t> parent_states;
  std::size_t states = 0;
  std::vector<double> table;

  std::size_t configurations() const {
    std::size_t q = 1;
    for (auto r : parent_states) q *= r;
    return q;
  }

  std::size_t config(const std::vector<int>& assignment) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < parents.size(); ++i)
      c = c * parent_states[i] + static_cast<std::size_t>(assignment[parents[i]]);
    return c;
  }

  double prob(std::size_t cfg, int state) const { return table[cfg * states + static_cast<std::size_t>(state)]; }
};

struct Dbn {
  Dag graph;
  std::vector<std::vector<std::string>> levels;  // per graph node
  std::vector<Cpt> cpts;
  std::vector<std::optional<int>> clamped;  // set by interventions

  std::size_t size() const { return graph.size(); }
  std::size_t states(std::size_t v) const { return levels.at(v).size(); }
  const std::vector<std::string>& nodes() const { return graph.nodes(); }
};

inline constexpr double kDefaultCellBudget = 1e6;

namespace detail {

inline std::vector<std::size_t> column_map(const Dag& g, const DiscreteData& d) {
  std::vector<std::size_t> map(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) map[v] = d.index(g.name(v));
  return map;
}

}  // namespace detail

// CPT entries (count + kappa) / (row total + kappa r). At kappa = 0 a parent
// configuration never seen in the data gets a uniform row.
inline Dbn fit_cpts(const Dag& g, const DiscreteData& data, double kappa = 0.0,
                    double cell_budget = kDefaultCellBudget) {
  if (!(kappa >= 0.0)) throw ValidationError("smoothing kappa must be >= 0");
  data.validate();
  const auto map = detail::column_map(g, data);
  Dbn dbn;
  dbn.graph = g;
  dbn.clamped.assign(g.size(), std::nullopt);
  for (std::size_t v = 0; v < g.size(); ++v) dbn.levels.push_back(data.levels[map[v]]);
  const std::size_t n = data.rows();
  for (std::size_t v = 0; v < g.size(); ++v) {
    Cpt cpt;
    cpt.parents = g.parents(v);
    cpt.states = dbn.states(v);
    double cells = static_cast<double>(cpt.states);
    for (auto p : cpt.parents) {
      cpt.parent_states.push_back(dbn.states(p));
      cells *= static_cast<double>(dbn.states(p));
    }
    if (cells > cell_budget) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "' needs %.0f cells, above the budget of %.0f", cells, cell_budget);
      throw DataError("CPT for node '" + g.name(v) + msg);
    }
    const std::size_t q = cpt.configurations();
    std::vector<double> counts(q * cpt.states, 0.0);
    const auto& own = data.values[map[v]];
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t c = 0;
      for (std::size_t i = 0; i < cpt.parents.size(); ++i)
        c = c * cpt.parent_states[i] + static_cast<std::size_t>(data.values[map[cpt.parents[i]]][r]);
      counts[c * cpt.states + static_cast<std::size_t>(own[r])] += 1.0;
    }
    cpt.table.resize(counts.size());
    for (std::size_t c = 0; c < q; ++c) {
      double total = 0.0;
      for (std::size_t s = 0; s < cpt.states; ++s) total += counts[c * cpt.states + s];
      const double den = total + kappa * static_cast<double>(cpt.states);
      for (std::size_t s = 0; s < cpt.states; ++s)
        cpt.table[c * cpt.states + s] =
            den > 0.0 ? (counts[c * cpt.states + s] + kappa) / den : 1.0 / static_cast<double>(cpt.states);
    }
    dbn.cpts.push_back(std::move(cpt));
  }
  return dbn;
}

// sum_i (r_i - 1) q_i
inline std::size_t free_parameters(const Dbn& dbn) {
  std::size_t total = 0;
  for (const auto& c : dbn.cpts) total += (c.states - 1) * c.configurations();
  return total;
}

// Sum over rows and nodes of log CPT[state | parent states]; -inf when an
// observed cell has probability zero.
inline double loglik(const Dbn& dbn, const DiscreteData& data) {
  data.validate();
  const auto map = detail::column_map(dbn.graph, data);
  for (std::size_t v = 0; v < dbn.size(); ++v)
    if (data.states(map[v]) != dbn.states(v))
      throw DataError("column '" + dbn.graph.name(v) + "' has a different state count than the network");
  double ll = 0.0;
  std::vector<int> row(dbn.size());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t v = 0; v < dbn.size(); ++v) row[v] = data.values[map[v]][r];
    for (std::size_t v = 0; v < dbn.size(); ++v) {
      const double p = dbn.cpts[v].prob(dbn.cpts[v].config(row), row[v]);
      if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
      ll += std::log(p);
    }
  }
  return ll;
}

// LL - sum_i (|Theta_i| / 2) log n
inline double bic_discrete(const Dbn& dbn, const DiscreteData& data) {
  const double ll = loglik(dbn, data);
  return ll - 0.5 * static_cast<double>(free_parameters(dbn)) * std::log(static_cast<double>(data.rows()));
}

// Truncated factorization on any node: incoming edges removed and the node
// clamped to `state`.
inline Dbn intervene(const Dbn& dbn, std::size_t node, int state) {
  if (node >= dbn.size()) throw ValidationError("intervention node out of range");
  if (state < 0 || static_cast<std::size_t>(state) >= dbn.states(node))
    throw ValidationError("state " + std::to_string(state) + " is not valid for node '" + dbn.graph.name(node) + "'");
  Dbn out = dbn;
  for (auto p : dbn.graph.parents(node)) out.graph.remove_edge(p, node);
  auto& cpt = out.cpts[node];
  cpt.parents.clear();
  cpt.parent_states.clear();
  cpt.table.assign(cpt.states, 0.0);
  cpt.table[static_cast<std::size_t>(state)] = 1.0;
  out.clamped[node] = state;
  return out;
}

// do(X = x) on the past slice; clamping a current-slice node is refused.
inline Dbn do_intervention(const Dbn& dbn, const std::string& node, int state) {
  if (!is_lagged_name(node))
    throw ValidationError("interventions act on the past slice; '" + node + "' is not a lagged node");
  return intervene(dbn, dbn.graph.index(node), state);
}

}  // namespace tsdbn
