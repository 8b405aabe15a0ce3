#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "../data/dataset.hpp"
#include "../data/transform.hpp"
#include "kalman.hpp"

namespace tsdbn {

struct ColumnImputation {
  std::string name;
  std::size_t missing = 0;
  std::size_t imputed = 0;
  bool failed = false;
  std::string error;
};

struct ImputeReport {
  std::vector<ColumnImputation> columns;
  std::vector<std::string> dropped_rows;  // time labels
  std::size_t total_missing = 0;
  std::size_t total_imputed = 0;

  // Missing-data summary: variable, missing count, missing percentage.
  std::string to_text(std::size_t n_rows) const {
    std::string out = "Variable,Missing Count,Missing Percentage (%)\n";
    for (const auto& c : columns) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.2f", n_rows ? 100.0 * static_cast<double>(c.missing) / n_rows : 0.0);
      out += c.name + "," + std::to_string(c.missing) + "," + pct + "\n";
    }
    out += "\n# total missing: " + std::to_string(total_missing) + "\n";
    out += "# total imputed: " + std::to_string(total_imputed) + "\n";
    for (const auto& c : columns)
      if (c.failed) out += "# failed column (removed): " + c.name + ": " + c.error + "\n";
    for (const auto& r : dropped_rows) out += "# dropped row: " + r + "\n";
    return out;
  }
};

struct ImputeResult {
  Dataset data;
  ImputeReport report;
};

inline Series impute_series(const Series& s) {
  if (s.missing_count() == 0) return s;
  return kalman_impute(s, fit_state_space(s));
}

// Continuous columns are imputed directly; categorical columns through their
// indicator columns (one per level, imputed independently) and an argmax
// decode. A column that cannot be imputed is reported and removed; rows that
// still hold a missing cell afterwards are reported and dropped.
inline ImputeResult impute_dataset(const Dataset& d) {
  ImputeResult res;
  Dataset work;
  work.index_name = d.index_name;
  work.time_index = d.time_index;
  for (const auto& col : d.columns) {
    ColumnImputation info;
    info.name = col.name;
    info.missing = col.missing_count();
    res.report.total_missing += info.missing;
    try {
      Series out;
      if (!col.is_categorical()) {
        out = impute_series(col);
      } else if (info.missing == 0) {
        out = col;
      } else {
        auto indicators = encode_dummies(col);
        for (auto& ind : indicators) ind = impute_series(ind);
        out = decode_dummies(indicator_matrix(indicators), col.name, col.levels);
        for (std::size_t r = 0; r < col.size(); ++r)
          if (col.values[r]) out.values[r] = col.values[r];
      }
      info.imputed = info.missing - out.missing_count();
      res.report.total_imputed += info.imputed;
      work.columns.push_back(std::move(out));
    } catch (const Error& e) {
      info.failed = true;
      info.error = e.what();
    }
    res.report.columns.push_back(std::move(info));
  }
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < work.n_rows(); ++r) {
    bool complete = true;
    for (const auto& c : work.columns) complete = complete && c.values[r].has_value();
    if (complete)
      keep.push_back(r);
    else
      res.report.dropped_rows.push_back(work.time_index[r]);
  }
  res.data = keep.size() == work.n_rows() ? std::move(work) : work.select_rows(keep);
  return res;
}

}  // namespace tsdbn
