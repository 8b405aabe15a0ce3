#pragma once

#include <string>
#include <vector>

#include "../data/dataset.hpp"
#include "../data/transform.hpp"
#include "../error.hpp"
#include "../linalg.hpp"

namespace tsdbn {

inline std::string lagged_name(const std::string& var) { return var + "@t-1"; }

inline bool is_lagged_name(const std::string& node) {
  return node.size() > 4 && node.compare(node.size() - 4, 4, "@t-1") == 0;
}

inline std::string base_name(const std::string& node) {
  return is_lagged_name(node) ? node.substr(0, node.size() - 4) : node;
}

// Numeric columns for the causal-ML learners. `tiers` orders columns in
// time (0 = t-1, 1 = t); an empty vector means no temporal information.
struct NumericData {
  std::vector<std::string> names;
  Matrix values;
  std::vector<int> tiers;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t m() const { return names.size(); }
};

// [X(t-1), X(t)] with columns named "v@t-1" and "v"; n-1 rows.
inline NumericData two_slice_numeric(const LaggedDesign& d) {
  if (d.order != 1) throw ValidationError("two-slice data needs a lag-1 design");
  const auto k = static_cast<Eigen::Index>(d.k());
  NumericData out;
  out.values.resize(d.targets.rows(), 2 * k);
  out.values.leftCols(k) = d.predictors;
  out.values.rightCols(k) = d.targets;
  for (const auto& v : d.variables) out.names.push_back(lagged_name(v));
  for (const auto& v : d.variables) out.names.push_back(v);
  out.tiers.assign(d.k(), 0);
  out.tiers.resize(2 * d.k(), 1);
  return out;
}

inline NumericData two_slice_numeric(const Dataset& d) { return two_slice_numeric(build_lagged(d, 1)); }

inline NumericData plain_numeric(const Matrix& values, std::vector<std::string> names) {
  if (static_cast<std::size_t>(values.cols()) != names.size())
    throw ValidationError("column name count does not match the data");
  if (!values.allFinite()) throw DataError("data contains missing or non-finite values");
  return {std::move(names), values, {}};
}

}  // namespace tsdbn
