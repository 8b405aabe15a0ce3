#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../linalg.hpp"
#include "dataset.hpp"

namespace tsdbn {

inline Series minmax_scale(const Series& s) {
  const auto vals = s.present();
  if (vals.empty()) throw DataError("column '" + s.name + "': zero range (no observed values)");
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw DataError("column '" + s.name + "': zero range");
  Series out = s;
  out.kind = SeriesKind::continuous;
  out.levels.clear();
  for (auto& v : out.values)
    if (v) *v = std::clamp((*v - *lo) / range, 0.0, 1.0);
  return out;
}

// Dense numeric view of a fully observed dataset; categorical columns become
// their level index.
inline Matrix numeric_matrix(const Dataset& d) {
  Matrix m(static_cast<Eigen::Index>(d.n_rows()), static_cast<Eigen::Index>(d.k_vars()));
  for (std::size_t c = 0; c < d.k_vars(); ++c) {
    const auto& col = d.columns[c];
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (!col.values[r]) throw DataError("column '" + col.name + "' has missing values; run imputation first");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *col.values[r];
    }
  }
  return m;
}

// Aligned predictor/target blocks for a VAR(p) regression. Predictor columns
// are lag-major: all variables at t-1, then all at t-2, and so on.
struct LaggedDesign {
  std::size_t order = 1;
  std::vector<std::string> variables;
  Matrix predictors;  // rows x (k * order)
  Matrix targets;     // rows x k

  std::size_t rows() const { return static_cast<std::size_t>(targets.rows()); }
  std::size_t k() const { return variables.size(); }

  std::size_t predictor_column(std::size_t var, std::size_t lag) const { return (lag - 1) * k() + var; }

  std::string predictor_name(std::size_t col) const {
    return variables[col % k()] + "@t-" + std::to_string(col / k() + 1);
  }
};

inline LaggedDesign build_lagged(const Matrix& data, const std::vector<std::string>& names, std::size_t p) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto k = static_cast<std::size_t>(data.cols());
  if (p < 1) throw ValidationError("lag order must be >= 1");
  if (n <= p) throw DataError("lag order " + std::to_string(p) + " needs more than " + std::to_string(p) + " rows");
  if (names.size() != k) throw ValidationError("variable name count does not match column count");
  if (!data.allFinite()) throw DataError("design contains missing or non-finite values; run imputation first");
  LaggedDesign d;
  d.order = p;
  d.variables = names;
  const auto rows = static_cast<Eigen::Index>(n - p);
  d.predictors.resize(rows, static_cast<Eigen::Index>(k * p));
  d.targets = data.bottomRows(rows);
  for (std::size_t lag = 1; lag <= p; ++lag)
    d.predictors.middleCols(static_cast<Eigen::Index>((lag - 1) * k), static_cast<Eigen::Index>(k)) =
        data.middleRows(static_cast<Eigen::Index>(p - lag), rows);
  return d;
}

inline LaggedDesign build_lagged(const Dataset& d, std::size_t p) {
  if (!d.fully_observed()) throw DataError("dataset has missing values; run imputation first");
  return build_lagged(numeric_matrix(d), d.names(), p);
}

// One indicator column per level, no reference level dropped. A missing
// categorical cell makes every indicator missing in that row.
inline std::vector<Series> encode_dummies(const Series& s) {
  if (!s.is_categorical() || s.levels.size() < 2)
    throw ValidationError("column '" + s.name + "': dummy encoding needs a categorical column with >= 2 levels");
  std::vector<Series> out;
  for (const auto& level : s.levels) {
    Series ind;
    ind.name = s.name + "[" + level + "]";
    out.push_back(std::move(ind));
  }
  for (const auto& v : s.values) {
    for (std::size_t l = 0; l < s.levels.size(); ++l) {
      if (v)
        out[l].values.push_back(static_cast<std::size_t>(*v) == l ? 1.0 : 0.0);
      else
        out[l].values.push_back(std::nullopt);
    }
  }
  return out;
}

// Argmax per row; ties resolve to the first level in declared order.
inline Series decode_dummies(const Matrix& indicators, const std::string& name, const std::vector<std::string>& levels) {
  if (static_cast<std::size_t>(indicators.cols()) != levels.size())
    throw ValidationError("column '" + name + "': indicator count does not match level count");
  Series out;
  out.name = name;
  out.kind = SeriesKind::categorical;
  out.levels = levels;
  for (Eigen::Index r = 0; r < indicators.rows(); ++r) {
    Eigen::Index best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < indicators.cols(); ++c) {
      const double v = indicators(r, c);
      if (std::isfinite(v) && (best < 0 || v > best_v)) {
        best = c;
        best_v = v;
      }
    }
    if (best < 0) throw DataError("column '" + name + "' row " + std::to_string(r) + ": no finite indicator to decode");
    out.values.push_back(static_cast<double>(best));
  }
  return out;
}

inline Matrix indicator_matrix(const std::vector<Series>& indicators) {
  if (indicators.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(indicators.front().size()), static_cast<Eigen::Index>(indicators.size()));
  for (std::size_t c = 0; c < indicators.size(); ++c)
    for (std::size_t r = 0; r < indicators[c].size(); ++r)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          indicators[c].values[r] ? *indicators[c].values[r] : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace tsdbn
