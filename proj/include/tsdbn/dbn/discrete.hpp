#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "../data/dataset.hpp"
#include "../error.hpp"
#include "../graph/dag.hpp"
#include "../search/two_slice.hpp"

namespace tsdbn {

// Fully observed categorical data; values[c][r] is the state index of column
// c at row r.
struct DiscreteData {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> levels;
  std::vector<std::vector<int>> values;

  std::size_t columns() const { return names.size(); }
  std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
  std::size_t states(std::size_t c) const { return levels.at(c).size(); }

  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw DataError("no data column named '" + name + "'");
  }

  void validate() const {
    if (levels.size() != names.size() || values.size() != names.size())
      throw ValidationError("discrete data: inconsistent column counts");
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (levels[c].empty()) throw DataError("discrete column '" + names[c] + "' has no states");
      if (values[c].size() != rows()) throw ValidationError("discrete data: ragged columns");
      for (int v : values[c])
        if (v < 0 || static_cast<std::size_t>(v) >= levels[c].size())
          throw DataError("discrete column '" + names[c] + "': state outside declared levels");
    }
  }
};

// Every column must be categorical and fully observed.
inline DiscreteData discrete_from_dataset(const Dataset& d) {
  DiscreteData out;
  for (const auto& s : d.columns) {
    if (!s.is_categorical()) throw DataError("column '" + s.name + "' is not categorical; discretize first");
    if (s.missing_count() > 0) throw DataError("column '" + s.name + "' has missing values");
    out.names.push_back(s.name);
    out.levels.push_back(s.levels);
    std::vector<int> v;
    v.reserve(s.size());
    for (const auto& x : s.values) v.push_back(static_cast<int>(*x));
    out.values.push_back(std::move(v));
  }
  out.validate();
  return out;
}

// Columns [v@t-1 ..., v ...] over rows 1..n-1.
inline DiscreteData two_slice_discrete(const DiscreteData& d) {
  if (d.rows() < 2) throw DataError("two-slice data needs at least 2 rows");
  DiscreteData out;
  for (std::size_t c = 0; c < d.columns(); ++c) {
    out.names.push_back(lagged_name(d.names[c]));
    out.levels.push_back(d.levels[c]);
    out.values.emplace_back(d.values[c].begin(), d.values[c].end() - 1);
  }
  for (std::size_t c = 0; c < d.columns(); ++c) {
    out.names.push_back(d.names[c]);
    out.levels.push_back(d.levels[c]);
    out.values.emplace_back(d.values[c].begin() + 1, d.values[c].end());
  }
  return out;
}

inline bool is_two_slice_graph(const Dag& g) {
  for (const auto& n : g.nodes())
    if (is_lagged_name(n)) return true;
  return false;
}

// Two-slice graph over [v@t-1 ..., v ...]. A variable-level edge i -> j
// becomes i@t-1 -> j; a graph whose node names already carry "@t-1" is
// copied onto the full node list. Unknown node names are an error.
inline Dag as_two_slice(const Dag& g, const std::vector<std::string>& variables) {
  std::vector<std::string> names;
  for (const auto& v : variables) names.push_back(lagged_name(v));
  for (const auto& v : variables) names.push_back(v);
  Dag out(names);
  const bool two_slice = is_two_slice_graph(g);
  for (const auto& n : g.nodes()) {
    const bool known = two_slice ? out.find(n).has_value()
                                 : std::find(variables.begin(), variables.end(), n) != variables.end();
    if (!known) throw DataError("graph node '" + n + "' has no data column");
  }
  for (auto [a, b] : g.edges()) {
    const auto from = two_slice ? out.index(g.name(a)) : out.index(lagged_name(g.name(a)));
    const auto to = out.index(g.name(b));
    if (!out.try_add(from, to)) throw DataError("two-slice graph contains a cycle");
  }
  return out;
}

// The same graph over `names` (a superset of its nodes), adding isolated
// nodes as needed.
inline Dag align_nodes(const Dag& g, const std::vector<std::string>& names) {
  Dag out(names);
  for (const auto& n : g.nodes())
    if (!out.find(n)) throw DataError("graph node '" + n + "' is not a known variable");
  for (auto [a, b] : g.edges()) out.try_add(out.index(g.name(a)), out.index(g.name(b)));
  return out;
}

}  // namespace tsdbn
