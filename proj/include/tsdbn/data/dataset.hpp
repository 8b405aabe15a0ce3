#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <vector>

#include "../error.hpp"

namespace tsdbn {

enum class SeriesKind { continuous, categorical };

// One column. Categorical values are stored as level indices (0-based) so both
// kinds share the same optional-valued storage; missing cells are nullopt.
struct Series {
  std::string name;
  SeriesKind kind = SeriesKind::continuous;
  std::vector<std::string> levels;  // categorical only, declared order
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  bool is_categorical() const { return kind == SeriesKind::categorical; }

  std::size_t missing_count() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::nullopt));
  }

  std::vector<double> present() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values)
      if (v) out.push_back(*v);
    return out;
  }

  void validate() const {
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (!values[r]) continue;
      const double v = *values[r];
      if (!std::isfinite(v)) throw DataError("column '" + name + "' row " + std::to_string(r) + ": non-finite value");
      if (is_categorical()) {
        if (v != std::floor(v) || v < 0 || v >= static_cast<double>(levels.size()))
          throw DataError("column '" + name + "' row " + std::to_string(r) + ": value outside declared levels");
      }
    }
  }
};

inline Series make_continuous(std::string name, std::vector<std::optional<double>> values) {
  Series s;
  s.name = std::move(name);
  s.values = std::move(values);
  return s;
}

inline Series make_categorical(std::string name, std::vector<std::string> levels,
                               std::vector<std::optional<double>> values) {
  Series s;
  s.name = std::move(name);
  s.kind = SeriesKind::categorical;
  s.levels = std::move(levels);
  s.values = std::move(values);
  return s;
}

// Ordered time labels compare numerically when every label parses as a
// number, otherwise lexicographically (ISO dates sort correctly that way).
inline bool time_index_increasing(const std::vector<std::string>& labels) {
  bool numeric = true;
  std::vector<double> nums;
  nums.reserve(labels.size());
  for (const auto& l : labels) {
    double v = 0;
    auto [p, ec] = std::from_chars(l.data(), l.data() + l.size(), v);
    if (ec != std::errc() || p != l.data() + l.size()) {
      numeric = false;
      break;
    }
    nums.push_back(v);
  }
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (numeric ? !(nums[i - 1] < nums[i]) : !(labels[i - 1] < labels[i])) return false;
  }
  return true;
}

struct Dataset {
  std::string index_name = "t";
  std::vector<std::string> time_index;
  std::vector<Series> columns;

  std::size_t n_rows() const { return time_index.size(); }
  std::size_t k_vars() const { return columns.size(); }
  bool empty() const { return time_index.empty(); }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    throw DataError("unknown column '" + std::string(name) + "'");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) out.push_back(c.name);
    return out;
  }

  std::size_t missing_count() const {
    std::size_t m = 0;
    for (const auto& c : columns) m += c.missing_count();
    return m;
  }

  bool fully_observed() const { return missing_count() == 0; }

  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& c : columns) {
      if (c.size() != n_rows())
        throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) + " rows, expected " +
                        std::to_string(n_rows()));
      if (!seen.insert(c.name).second) throw DataError("duplicate column name '" + c.name + "'");
      c.validate();
    }
    if (!time_index_increasing(time_index)) throw DataError("time index is not strictly increasing");
  }

  Dataset select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.index_name = index_name;
    for (auto r : rows) out.time_index.push_back(time_index[r]);
    for (const auto& c : columns) {
      Series s = c;
      s.values.clear();
      for (auto r : rows) s.values.push_back(c.values[r]);
      out.columns.push_back(std::move(s));
    }
    return out;
  }
};

}  // namespace tsdbn
