#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "../data/csv.hpp"
#include "../error.hpp"
#include "dag.hpp"

namespace tsdbn {

// Edge-list text: one `from -> to` per line (`a -- b` for an undirected CPDAG
// edge). A line holding only a name declares a node, which fixes node order
// and keeps isolated nodes. Blank lines and `#` comments are skipped.
namespace detail {

struct ParsedEdgeList {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> directed;
  std::vector<std::pair<std::string, std::string>> undirected;
  std::vector<std::size_t> directed_lines;
};

inline void declare(std::vector<std::string>& nodes, const std::string& n) {
  if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) nodes.push_back(n);
}

inline ParsedEdgeList parse_edge_list(const std::string& text, bool allow_undirected) {
  ParsedEdgeList p;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto arrow = t.find("->");
    const auto dash = t.find("--");
    if (arrow != std::string::npos || dash != std::string::npos) {
      const bool directed = arrow != std::string::npos;
      if (!directed && !allow_undirected)
        throw DataError("edge list line " + std::to_string(lineno) + ": undirected edge in a DAG file");
      const auto pos = directed ? arrow : dash;
      std::string from = trim(std::string_view(t).substr(0, pos));
      std::string to = trim(std::string_view(t).substr(pos + 2));
      if (from.empty() || to.empty())
        throw DataError("edge list line " + std::to_string(lineno) + ": missing node name");
      if (from == to) throw DataError("edge list line " + std::to_string(lineno) + ": self-loop on '" + from + "'");
      declare(p.nodes, from);
      declare(p.nodes, to);
      if (directed) {
        p.directed.emplace_back(from, to);
        p.directed_lines.push_back(lineno);
      } else {
        p.undirected.emplace_back(from, to);
      }
    } else {
      declare(p.nodes, t);
    }
  }
  return p;
}

}  // namespace detail

inline Dag from_edge_list(const std::string& text) {
  const auto p = detail::parse_edge_list(text, false);
  Dag g(p.nodes);
  for (std::size_t i = 0; i < p.directed.size(); ++i) {
    const auto& [a, b] = p.directed[i];
    if (!g.try_add(g.index(a), g.index(b)))
      throw DataError("edge list line " + std::to_string(p.directed_lines[i]) + ": edge '" + a + " -> " + b +
                      "' closes a cycle");
  }
  return g;
}

inline Cpdag cpdag_from_edge_list(const std::string& text) {
  const auto p = detail::parse_edge_list(text, true);
  Cpdag g(p.nodes);
  for (const auto& [a, b] : p.directed) g.set_directed(g.index(a), g.index(b));
  for (const auto& [a, b] : p.undirected) g.set_undirected(g.index(a), g.index(b));
  return g;
}

inline std::string to_edge_list(const Dag& g) {
  std::string out;
  for (const auto& n : g.nodes()) out += n + "\n";
  for (auto [a, b] : g.edges()) out += g.name(a) + " -> " + g.name(b) + "\n";
  return out;
}

inline std::string to_edge_list(const Cpdag& g) {
  std::string out;
  for (const auto& n : g.nodes()) out += n + "\n";
  for (auto [a, b] : g.directed_edges()) out += g.name(a) + " -> " + g.name(b) + "\n";
  for (auto [a, b] : g.undirected_edges()) out += g.name(a) + " -- " + g.name(b) + "\n";
  return out;
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\\\"") : std::string(1, c);
  return out + "\"";
}
}  // namespace detail

inline std::string to_dot(const Cpdag& g, const std::string& name = "G") {
  std::string out = "digraph " + detail::dot_quote(name) + " {\n";
  for (const auto& n : g.nodes()) out += "  " + detail::dot_quote(n) + ";\n";
  for (auto [a, b] : g.directed_edges())
    out += "  " + detail::dot_quote(g.name(a)) + " -> " + detail::dot_quote(g.name(b)) + ";\n";
  for (auto [a, b] : g.undirected_edges())
    out += "  " + detail::dot_quote(g.name(a)) + " -> " + detail::dot_quote(g.name(b)) + " [dir=none];\n";
  return out + "}\n";
}

inline std::string to_dot(const Dag& g, const std::string& name = "G") { return to_dot(Cpdag(g), name); }

// {"nodes": [...], "edges": [[from, to], ...]}
inline nlohmann::json to_json(const Dag& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes();
  j["edges"] = nlohmann::json::array();
  for (auto [a, b] : g.edges()) j["edges"].push_back({g.name(a), g.name(b)});
  return j;
}

inline Dag dag_from_json(const nlohmann::json& j) {
  if (!j.contains("nodes") || !j.contains("edges")) throw DataError("graph JSON needs 'nodes' and 'edges'");
  Dag g(j.at("nodes").get<std::vector<std::string>>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw DataError("graph JSON edge must be [from, to]");
    const auto a = e[0].get<std::string>(), b = e[1].get<std::string>();
    if (!g.try_add(g.index(a), g.index(b))) throw DataError("graph JSON edge '" + a + " -> " + b + "' closes a cycle");
  }
  return g;
}

// Reads either format, chosen by a leading '{'.
inline Dag load_graph(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return dag_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("'" + path + "': " + e.what());
    }
  }
  return from_edge_list(text);
}

}  // namespace tsdbn
