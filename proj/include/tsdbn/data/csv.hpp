#pragma once

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"
#include "dataset.hpp"

namespace tsdbn {

// Shortest round-trip decimal representation.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

struct ColumnSpec {
  std::string name;
  SeriesKind kind = SeriesKind::continuous;
  std::vector<std::string> levels;
};

// Column kinds, one per line:
//   name = continuous
//   name = categorical: level1, level2, ...
//   name = index            (optional; marks the time-index column)
// Blank lines and '#' comments are ignored.
struct Schema {
  std::vector<ColumnSpec> columns;

  const ColumnSpec* find(std::string_view name) const {
    for (const auto& c : columns)
      if (c.name == name) return &c;
    return nullptr;
  }

  static Schema parse(const std::string& text) {
    Schema schema;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ValidationError("schema line " + std::to_string(lineno) + ": expected 'name = kind'");
      ColumnSpec spec;
      spec.name = trim(std::string_view(t).substr(0, eq));
      std::string kind = trim(std::string_view(t).substr(eq + 1));
      if (kind == "index") continue;
      if (kind == "continuous") {
        spec.kind = SeriesKind::continuous;
      } else if (kind.rfind("categorical", 0) == 0) {
        spec.kind = SeriesKind::categorical;
        const auto colon = kind.find(':');
        if (colon == std::string::npos)
          throw ValidationError("schema line " + std::to_string(lineno) + ": categorical column needs levels");
        spec.levels = split(std::string_view(kind).substr(colon + 1), ',');
        if (spec.levels.size() < 2)
          throw ValidationError("schema line " + std::to_string(lineno) + ": categorical column needs >= 2 levels");
      } else {
        throw ValidationError("schema line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
      }
      schema.columns.push_back(std::move(spec));
    }
    return schema;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& c : columns) {
      out += c.name + " = ";
      if (c.kind == SeriesKind::continuous) {
        out += "continuous";
      } else {
        out += "categorical: ";
        for (std::size_t i = 0; i < c.levels.size(); ++i) out += (i ? ", " : "") + c.levels[i];
      }
      out += '\n';
    }
    return out;
  }

  static Schema of(const Dataset& d) {
    Schema s;
    for (const auto& c : d.columns) s.columns.push_back({c.name, c.kind, c.levels});
    return s;
  }
};

namespace detail {

// RFC 4180 style record splitting: quoted fields may contain commas and
// doubled quotes; records are one per line.
inline std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (first) {
        if (trim(line).empty()) continue;
        t.header = detail::split_csv_record(line);
        for (auto& h : t.header) h = trim(h);
        first = false;
        continue;
      }
      if (line.empty()) continue;
      auto fields = detail::split_csv_record(line);
      if (fields.size() != t.header.size())
        throw DataError("csv row " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                        " fields, got " + std::to_string(fields.size()));
      t.rows.push_back(std::move(fields));
    }
    if (first) throw DataError("csv has no header row");
    return t;
  }
};

// Infers a schema when none is given: numeric columns are continuous; other
// columns are categorical with levels low/medium/high when the values fit that
// vocabulary, else in order of first appearance.
inline Schema infer_schema(const CsvTable& table) {
  Schema s;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    ColumnSpec spec{table.header[c], SeriesKind::continuous, {}};
    std::vector<std::string> seen;
    bool numeric = true;
    for (const auto& row : table.rows) {
      const std::string v = trim(row[c]);
      if (v.empty()) continue;
      if (!parse_double(v)) numeric = false;
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
    }
    if (!numeric) {
      spec.kind = SeriesKind::categorical;
      const std::vector<std::string> lmh{"low", "medium", "high"};
      const bool ordinal = std::all_of(seen.begin(), seen.end(), [&](const std::string& v) {
        return std::find(lmh.begin(), lmh.end(), v) != lmh.end();
      });
      spec.levels = ordinal ? lmh : seen;
      if (spec.levels.size() < 2) spec.levels.push_back("__other__");
    }
    s.columns.push_back(std::move(spec));
  }
  return s;
}

inline Dataset parse_csv(const std::string& text, const Schema& schema) {
  const CsvTable table = CsvTable::parse(text);
  if (table.header.empty()) throw DataError("csv header is empty");
  Dataset d;
  d.index_name = table.header[0];
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const ColumnSpec* spec = schema.find(table.header[c]);
    if (!spec) throw DataError("schema does not declare column '" + table.header[c] + "'");
    Series s;
    s.name = spec->name;
    s.kind = spec->kind;
    s.levels = spec->levels;
    d.columns.push_back(std::move(s));
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    d.time_index.push_back(trim(row[0]));
    for (std::size_t c = 1; c < row.size(); ++c) {
      Series& s = d.columns[c - 1];
      const std::string cell = trim(row[c]);
      if (cell.empty()) {
        s.values.push_back(std::nullopt);
      } else if (s.is_categorical()) {
        auto it = std::find(s.levels.begin(), s.levels.end(), cell);
        if (it == s.levels.end())
          throw DataError("row " + std::to_string(r + 1) + ", column '" + s.name + "': unknown level '" + cell + "'");
        s.values.push_back(static_cast<double>(it - s.levels.begin()));
      } else {
        auto v = parse_double(cell);
        if (!v)
          throw DataError("row " + std::to_string(r + 1) + ", column '" + s.name + "': unparseable number '" + cell +
                          "'");
        s.values.push_back(*v);
      }
    }
  }
  d.validate();
  return d;
}

inline Dataset load_csv(const std::string& path, const Schema& schema) { return parse_csv(read_file(path), schema); }

inline Dataset load_csv(const std::string& path) {
  const std::string text = read_file(path);
  return parse_csv(text, infer_schema(CsvTable::parse(text)));
}

inline std::string to_csv(const Dataset& d) {
  std::string out = detail::quote_csv(d.index_name);
  for (const auto& c : d.columns) out += "," + detail::quote_csv(c.name);
  out += '\n';
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    out += detail::quote_csv(d.time_index[r]);
    for (const auto& c : d.columns) {
      out += ',';
      const auto& v = c.values[r];
      if (!v) continue;
      out += c.is_categorical() ? detail::quote_csv(c.levels[static_cast<std::size_t>(*v)]) : format_number(*v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace tsdbn
