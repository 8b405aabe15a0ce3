#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "../rng.hpp"
#include "dbn.hpp"

namespace tsdbn {

// Conjunction of node = state conditions.
using Event = std::vector<std::pair<std::size_t, int>>;

struct QueryResult {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Per-sample event indicators from forward sampling in topological order.
// Only the event nodes and their ancestors are sampled; every sampled node
// draws one uniform, clamped or not, so runs that differ only in the clamped
// state consume the stream identically.
inline std::vector<char> sample_event(const Dbn& dbn, const Event& event, const Event& interventions,
                                      std::size_t n_samples, std::uint64_t seed, std::uint64_t stream) {
  if (n_samples < 1) throw ValidationError("query needs at least one sample");
  Dbn net = dbn;
  for (auto [node, state] : interventions) net = intervene(net, node, state);
  std::vector<char> needed(net.size(), 0);
  for (auto [node, state] : event) {
    if (node >= net.size()) throw ValidationError("event node out of range");
    if (state < 0 || static_cast<std::size_t>(state) >= net.states(node))
      throw ValidationError("event state is not valid for node '" + net.graph.name(node) + "'");
    needed[node] = 1;
    for (auto a : net.graph.ancestors(node)) needed[a] = 1;
  }
  std::vector<std::size_t> order;
  for (auto v : net.graph.topological_order())
    if (needed[v]) order.push_back(v);

  Rng rng(seed, stream);
  std::vector<int> x(net.size(), 0);
  std::vector<char> hits(n_samples, 0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (auto v : order) {
      const auto& cpt = net.cpts[v];
      const std::size_t base = cpt.config(x) * cpt.states;
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = static_cast<int>(cpt.states) - 1;
      for (std::size_t k = 0; k < cpt.states; ++k) {
        acc += cpt.table[base + k];
        if (u < acc) {
          pick = static_cast<int>(k);
          break;
        }
      }
      // Rounding can leave u above the cumulative sum; never land on a
      // zero-probability state.
      while (pick > 0 && cpt.table[base + static_cast<std::size_t>(pick)] == 0.0) --pick;
      x[v] = pick;
    }
    bool ok = true;
    for (auto [node, state] : event) ok = ok && x[node] == state;
    hits[s] = ok;
  }
  return hits;
}

}  // namespace detail

inline QueryResult query_prob(const Dbn& dbn, const Event& event, const Event& interventions, std::size_t n_samples,
                              std::uint64_t seed, std::uint64_t stream = 0) {
  const auto hits = detail::sample_event(dbn, event, interventions, n_samples, seed, stream);
  QueryResult r;
  r.samples = n_samples;
  r.probability = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(n_samples);
  r.standard_error = std::sqrt(r.probability * (1.0 - r.probability) / static_cast<double>(n_samples));
  return r;
}

struct AceResult {
  std::string intervention;  // variable name; the lagged node is intervened on
  std::string outcome;
  std::vector<double> probabilities;  // P(Y = top | do(X = s)) per state s
  std::vector<double> standard_errors;
  double ace = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// ACE = mean over s < top of P(Y = top | do(X = s)) - P(Y = top | do(X = top)),
// which for three states is 1/2 [(p2 - p3) + (p1 - p3)]. All states share the
// stream derived from (seed, query index) (common random numbers), and the
// standard error is that of the per-sample paired differences.
inline AceResult ace(const Dbn& dbn, std::size_t x_node, std::size_t y_node, std::size_t n_samples,
                     std::uint64_t seed, std::uint64_t query_index = 0) {
  if (x_node >= dbn.size() || y_node >= dbn.size()) throw ValidationError("ace: node out of range");
  const std::size_t rx = dbn.states(x_node);
  if (rx < 2) throw DataError("ace: intervention node '" + dbn.graph.name(x_node) + "' has fewer than 2 states");
  const int top_y = static_cast<int>(dbn.states(y_node)) - 1;
  AceResult out;
  out.intervention = base_name(dbn.graph.name(x_node));
  out.outcome = dbn.graph.name(y_node);
  out.samples = n_samples;
  out.seed = seed;
  std::vector<std::vector<char>> hits;
  const double dn = static_cast<double>(n_samples);
  for (std::size_t s = 0; s < rx; ++s) {
    hits.push_back(detail::sample_event(dbn, {{y_node, top_y}}, {{x_node, static_cast<int>(s)}}, n_samples, seed,
                                        query_index));
    const double p = static_cast<double>(std::count(hits.back().begin(), hits.back().end(), 1)) / dn;
    out.probabilities.push_back(p);
    out.standard_errors.push_back(std::sqrt(p * (1.0 - p) / dn));
  }
  const double w = 1.0 / static_cast<double>(rx - 1);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double d = -static_cast<double>(hits.back()[i]);
    for (std::size_t s = 0; s + 1 < rx; ++s) d += w * static_cast<double>(hits[s][i]);
    sum += d;
    sum_sq += d * d;
  }
  out.ace = sum / dn;
  const double var = n_samples > 1 ? std::max(0.0, (sum_sq - dn * out.ace * out.ace) / (dn - 1.0)) : 0.0;
  out.standard_error = std::sqrt(var / dn);
  return out;
}

// By variable name on a two-slice network: X's lagged node, Y's current node.
inline AceResult ace(const Dbn& dbn, const std::string& x_var, const std::string& y_var, std::size_t n_samples,
                     std::uint64_t seed, std::uint64_t query_index = 0) {
  const auto x = dbn.graph.find(lagged_name(x_var));
  const auto y = dbn.graph.find(y_var);
  if (!x) throw DataError("variable '" + x_var + "' has no lagged node in the network");
  if (!y) throw DataError("variable '" + y_var + "' is not in the network");
  return ace(dbn, *x, *y, n_samples, seed, query_index);
}

}  // namespace tsdbn
