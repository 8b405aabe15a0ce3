#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "csv.hpp"
#include "dataset.hpp"

namespace tsdbn {

inline const std::vector<std::string>& three_level_labels() {
  static const std::vector<std::string> labels{"low", "medium", "high"};
  return labels;
}

struct Breakpoints {
  double lower = 0.0;
  double upper = 0.0;

  // Bins (-inf, lower], (lower, upper], (upper, inf).
  std::size_t bin(double v) const { return v <= lower ? 0 : (v <= upper ? 1 : 2); }
};

struct DiscretizationMap {
  std::map<std::string, Breakpoints> breakpoints;

  std::string to_text() const {
    std::string out;
    for (const auto& [name, b] : breakpoints)
      out += name + " = " + format_number(b.lower) + ", " + format_number(b.upper) + "\n";
    return out;
  }

  static DiscretizationMap parse(const std::string& text) {
    DiscretizationMap m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.rfind('=');
      const auto parts = eq == std::string::npos ? std::vector<std::string>{} : split(t.substr(eq + 1), ',');
      std::optional<double> a, b;
      if (parts.size() == 2) {
        a = parse_double(parts[0]);
        b = parse_double(parts[1]);
      }
      if (!a || !b || !(*a < *b))
        throw DataError("discretization map line " + std::to_string(lineno) + ": expected 'name = lower, upper'");
      m.breakpoints[trim(t.substr(0, eq))] = {*a, *b};
    }
    return m;
  }
};

struct TwoMeansResult {
  double low_centroid = 0.0;
  double high_centroid = 0.0;
  int iterations = 0;
};

// Lloyd iterations for k = 2 started from the sample min and max.
inline TwoMeansResult two_means(const std::vector<double>& values, double tol = 1e-9, int max_iter = 100) {
  if (values.empty()) throw DataError("2-means on empty sample");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  TwoMeansResult r{*lo, *hi, 0};
  for (int it = 0; it < max_iter; ++it) {
    double s0 = 0, s1 = 0;
    std::size_t n0 = 0, n1 = 0;
    for (double v : values) {
      if (std::fabs(v - r.low_centroid) <= std::fabs(v - r.high_centroid)) {
        s0 += v;
        ++n0;
      } else {
        s1 += v;
        ++n1;
      }
    }
    const double c0 = n0 ? s0 / static_cast<double>(n0) : r.low_centroid;
    const double c1 = n1 ? s1 / static_cast<double>(n1) : r.high_centroid;
    const double shift = std::max(std::fabs(c0 - r.low_centroid), std::fabs(c1 - r.high_centroid));
    r.low_centroid = c0;
    r.high_centroid = c1;
    r.iterations = it + 1;
    if (shift <= tol) break;
  }
  if (r.low_centroid > r.high_centroid) std::swap(r.low_centroid, r.high_centroid);
  return r;
}

// Three ordered bins low/medium/high with the two sorted 2-means centroids as
// the cut points.
inline std::pair<Series, Breakpoints> discretize_kmeans(const Series& s) {
  if (s.is_categorical()) throw ValidationError("column '" + s.name + "' is already categorical");
  const auto vals = s.present();
  const std::set<double> distinct(vals.begin(), vals.end());
  if (distinct.size() < 3)
    throw DataError("column '" + s.name + "' has " + std::to_string(distinct.size()) +
                    " distinct values; treat it as categorical instead of discretizing");
  const auto km = two_means(vals);
  const Breakpoints b{km.low_centroid, km.high_centroid};
  if (!(b.lower < b.upper)) throw NumericError("column '" + s.name + "': 2-means centroids coincide");
  Series out;
  out.name = s.name;
  out.kind = SeriesKind::categorical;
  out.levels = three_level_labels();
  for (const auto& v : s.values)
    out.values.push_back(v ? std::optional<double>(static_cast<double>(b.bin(*v))) : std::nullopt);
  return {std::move(out), b};
}

struct DiscretizedDataset {
  Dataset data;
  DiscretizationMap map;
  std::vector<std::string> direct_categorical;  // continuous columns with < 3 distinct values
};

// Continuous columns go through discretize_kmeans; columns with fewer than
// three distinct values become categorical over their sorted distinct values;
// categorical columns pass through unchanged.
inline DiscretizedDataset discretize_dataset(const Dataset& d) {
  DiscretizedDataset out;
  out.data.index_name = d.index_name;
  out.data.time_index = d.time_index;
  for (const auto& c : d.columns) {
    if (c.is_categorical()) {
      out.data.columns.push_back(c);
      continue;
    }
    const auto vals = c.present();
    const std::set<double> distinct(vals.begin(), vals.end());
    if (distinct.size() >= 3) {
      auto [series, b] = discretize_kmeans(c);
      out.map.breakpoints[c.name] = b;
      out.data.columns.push_back(std::move(series));
      continue;
    }
    Series s;
    s.name = c.name;
    s.kind = SeriesKind::categorical;
    const std::vector<double> ordered(distinct.begin(), distinct.end());
    for (double v : ordered) s.levels.push_back(format_number(v));
    if (s.levels.size() < 2) s.levels.push_back("__other__");
    for (const auto& v : c.values) {
      if (!v) {
        s.values.push_back(std::nullopt);
        continue;
      }
      const auto it = std::lower_bound(ordered.begin(), ordered.end(), *v);
      s.values.push_back(static_cast<double>(it - ordered.begin()));
    }
    out.direct_categorical.push_back(c.name);
    out.data.columns.push_back(std::move(s));
  }
  return out;
}

}  // namespace tsdbn
