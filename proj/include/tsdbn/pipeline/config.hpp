#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../data/csv.hpp"
#include "../dbn/dbn.hpp"
#include "../dbn/policy.hpp"
#include "../error.hpp"

namespace tsdbn {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"lasso", "lar", "js", "hc", "tabu", "pc", "iamb"};
  return m;
}

// Every tunable of a pipeline run. Defaults mirror the library defaults.
struct RunConfig {
  // [input]
  std::string data;
  std::string schema;
  std::string knowledge;
  // [output]
  std::string out_dir = "run";
  // [run]
  std::uint64_t seed = 1;
  std::vector<std::string> methods = known_methods();
  bool parallel = true;
  // [diagnose]
  bool diagnose = true;
  std::size_t p_max = 17;
  std::size_t bg_lags = 1;
  std::size_t pacf_lags = 20;
  // [lars]
  std::size_t folds = 10;
  std::size_t grid_points = 101;
  double threshold = 0.0;
  double dbn_threshold = 0.4;
  // [js]
  double js_cutoff = 0.05;
  std::string js_select = "probability";
  // [search]
  double gamma = 0.5;
  double alpha = 0.05;
  std::size_t tabu_length = 10;
  std::size_t max_worsening = 10;
  bool respect_time = false;
  std::size_t max_condition_size = 0;  // 0 = unlimited
  // [average]
  bool average = true;
  std::vector<std::string> average_learners{"lasso", "lar", "js"};
  std::vector<std::size_t> cutoffs;  // empty = 1..G
  // [dbn]
  double kappa = 0.0;
  double cell_budget = kDefaultCellBudget;
  // [policy]
  bool policy = true;
  std::size_t samples = 100000;
  double policy_kappa = 1.0;
  std::vector<std::string> interventions = default_mobility_variables();
  std::vector<std::string> outcomes = default_infection_variables();
  // [external] name = edge-list path, reported alongside native learners
  std::map<std::string, std::string> external;

  std::string to_text() const;
};

namespace detail {

inline std::string join(const std::vector<std::string>& v, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

inline std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& s : split(text, ',')) {
    auto t = trim(s);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// One entry per accepted key: reads a value into the config (pushing any
// problem to the error list) and writes the current value back as text.
struct ConfigKey {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&, std::vector<std::string>&)> read;
  std::function<std::string(const RunConfig&)> write;
};

template <class T, class Check>
ConfigKey number_key(std::string section, std::string name, T RunConfig::*field, Check ok, std::string range) {
  const std::string full = section + "." + name;
  return {section, name,
          [=](RunConfig& c, const std::string& v, std::vector<std::string>& errors) {
            T x{};
            if constexpr (std::is_integral_v<T>) {
              auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
              if (ec != std::errc() || p != v.data() + v.size()) {
                errors.push_back(full + ": '" + v + "' is not a non-negative integer");
                return;
              }
            } else {
              const auto d = parse_double(v);
              if (!d) {
                errors.push_back(full + ": '" + v + "' is not a number");
                return;
              }
              x = *d;
            }
            if (!ok(static_cast<double>(x))) {
              errors.push_back(full + " = " + v + " is out of range (" + range + ")");
              return;
            }
            c.*field = x;
          },
          [=](const RunConfig& c) {
            if constexpr (std::is_integral_v<T>)
              return std::to_string(c.*field);
            else
              return format_number(c.*field);
          }};
}

inline ConfigKey string_key(std::string section, std::string name, std::string RunConfig::*field) {
  return {section, name, [=](RunConfig& c, const std::string& v, std::vector<std::string>&) { c.*field = v; },
          [=](const RunConfig& c) { return c.*field; }};
}

inline ConfigKey bool_key(std::string section, std::string name, bool RunConfig::*field) {
  const std::string full = section + "." + name;
  return {section, name,
          [=](RunConfig& c, const std::string& v, std::vector<std::string>& errors) {
            if (v == "true" || v == "yes" || v == "1")
              c.*field = true;
            else if (v == "false" || v == "no" || v == "0")
              c.*field = false;
            else
              errors.push_back(full + ": '" + v + "' is not a boolean");
          },
          [=](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

inline ConfigKey list_key(std::string section, std::string name, std::vector<std::string> RunConfig::*field,
                          std::vector<std::string> allowed = {}) {
  const std::string full = section + "." + name;
  return {section, name,
          [=](RunConfig& c, const std::string& v, std::vector<std::string>& errors) {
            auto items = parse_list(v);
            bool ok = true;
            for (const auto& it : items)
              if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), it) == allowed.end()) {
                errors.push_back(full + ": unknown method '" + it + "' (expected one of " + join(allowed) + ")");
                ok = false;
              }
            if (ok) c.*field = std::move(items);
          },
          [=](const RunConfig& c) { return join(c.*field); }};
}

inline const std::vector<ConfigKey>& config_keys() {
  auto positive = [](double v) { return v > 0; };
  auto nonneg = [](double v) { return v >= 0; };
  auto open_unit = [](double v) { return v > 0 && v < 1; };
  auto closed_unit = [](double v) { return v >= 0 && v <= 1; };
  static const std::vector<ConfigKey> keys{
      string_key("input", "data", &RunConfig::data),
      string_key("input", "schema", &RunConfig::schema),
      string_key("input", "knowledge", &RunConfig::knowledge),
      string_key("output", "dir", &RunConfig::out_dir),
      number_key("run", "seed", &RunConfig::seed, nonneg, ">= 0"),
      list_key("run", "methods", &RunConfig::methods, known_methods()),
      bool_key("run", "parallel", &RunConfig::parallel),
      bool_key("diagnose", "enabled", &RunConfig::diagnose),
      number_key("diagnose", "p_max", &RunConfig::p_max, positive, ">= 1"),
      number_key("diagnose", "bg_lags", &RunConfig::bg_lags, positive, ">= 1"),
      number_key("diagnose", "pacf_lags", &RunConfig::pacf_lags, positive, ">= 1"),
      number_key("lars", "folds", &RunConfig::folds, [](double v) { return v >= 2; }, ">= 2"),
      number_key("lars", "grid_points", &RunConfig::grid_points, positive, ">= 1"),
      number_key("lars", "threshold", &RunConfig::threshold, nonneg, ">= 0"),
      number_key("lars", "dbn_threshold", &RunConfig::dbn_threshold, nonneg, ">= 0"),
      number_key("js", "cutoff", &RunConfig::js_cutoff, closed_unit, "[0, 1]"),
      {"js", "select",
       [](RunConfig& c, const std::string& v, std::vector<std::string>& errors) {
         if (v == "probability" || v == "prob")
           c.js_select = "probability";
         else if (v == "pvalue")
           c.js_select = "pvalue";
         else
           errors.push_back("js.select: '" + v + "' is not one of probability, pvalue");
       },
       [](const RunConfig& c) { return c.js_select; }},
      number_key("search", "gamma", &RunConfig::gamma, nonneg, ">= 0"),
      number_key("search", "alpha", &RunConfig::alpha, open_unit, "(0, 1)"),
      number_key("search", "tabu_length", &RunConfig::tabu_length, positive, ">= 1"),
      number_key("search", "max_worsening", &RunConfig::max_worsening, nonneg, ">= 0"),
      bool_key("search", "respect_time", &RunConfig::respect_time),
      number_key("search", "max_condition_size", &RunConfig::max_condition_size, nonneg, ">= 0, 0 = unlimited"),
      bool_key("average", "enabled", &RunConfig::average),
      list_key("average", "learners", &RunConfig::average_learners),
      {"average", "cutoffs",
       [](RunConfig& c, const std::string& v, std::vector<std::string>& errors) {
         std::vector<std::size_t> out;
         for (const auto& s : parse_list(v)) {
           const auto d = parse_double(s);
           if (!d || *d < 1 || *d != std::floor(*d)) {
             errors.push_back("average.cutoffs: '" + s + "' is not a positive integer");
             return;
           }
           out.push_back(static_cast<std::size_t>(*d));
         }
         c.cutoffs = std::move(out);
       },
       [](const RunConfig& c) {
         std::vector<std::string> s;
         for (auto x : c.cutoffs) s.push_back(std::to_string(x));
         return join(s);
       }},
      number_key("dbn", "kappa", &RunConfig::kappa, nonneg, ">= 0"),
      number_key("dbn", "cell_budget", &RunConfig::cell_budget, positive, "> 0"),
      bool_key("policy", "enabled", &RunConfig::policy),
      number_key("policy", "samples", &RunConfig::samples, positive, ">= 1"),
      number_key("policy", "kappa", &RunConfig::policy_kappa, nonneg, ">= 0"),
      list_key("policy", "interventions", &RunConfig::interventions),
      list_key("policy", "outcomes", &RunConfig::outcomes),
  };
  return keys;
}

}  // namespace detail

// Canonical text: every key with its current value, sections in fixed order.
// Parsing the result gives back an equal config.
inline std::string RunConfig::to_text() const {
  std::string out, section;
  for (const auto& k : detail::config_keys()) {
    if (k.section != section) {
      out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.write(*this) + "\n";
  }
  if (!external.empty()) {
    out += "\n[external]\n";
    for (const auto& [name, path] : external) out += name + " = " + path + "\n";
  }
  return out;
}

// Parses `key = value` lines grouped under `[section]` headers. Keys may also
// be written as `section.key` outside any section. All problems are reported
// together in one ValidationError.
inline RunConfig validate_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const auto& keys = detail::config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') {
        errors.push_back(where + "malformed section header '" + t + "'");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    std::string sec = section;
    if (const auto dot = key.find('.'); sec.empty() && dot != std::string::npos) {
      sec = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    const std::string full = sec + "." + key;
    if (!seen.insert(full).second) {
      errors.push_back(where + "duplicate key '" + full + "'");
      continue;
    }
    if (sec == "external") {
      if (key.empty() || value.empty())
        errors.push_back(where + "external graphs need 'name = path'");
      else if (std::find(known_methods().begin(), known_methods().end(), key) != known_methods().end() ||
               key == "average")
        errors.push_back(where + "external graph name '" + key + "' clashes with a built-in learner");
      else
        cfg.external[key] = value;
      continue;
    }
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&](const detail::ConfigKey& k) { return k.section == sec && k.name == key; });
    if (it == keys.end()) {
      errors.push_back(where + "unknown key '" + (sec.empty() ? key : full) + "'");
      continue;
    }
    const auto before = errors.size();
    it->read(cfg, value, errors);
    for (auto i = before; i < errors.size(); ++i) errors[i] = where + errors[i];
  }
  if (cfg.methods.empty()) errors.push_back("run.methods: at least one method is required");
  for (const auto& m : cfg.average_learners)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end() &&
        !cfg.external.count(m))
      errors.push_back("average.learners: '" + m + "' is neither a method nor an external graph");
  if (cfg.policy && (cfg.interventions.empty() || cfg.outcomes.empty()))
    errors.push_back("policy: interventions and outcomes must be non-empty");
  if (!errors.empty()) {
    std::string msg = "invalid configuration (" + std::to_string(errors.size()) + " problem" +
                      (errors.size() > 1 ? "s" : "") + "):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

// Relative paths are taken relative to `base` (normally the config file's
// directory). Empty paths stay empty.
inline RunConfig resolve_paths(RunConfig cfg, const std::filesystem::path& base) {
  auto fix = [&](std::string& p) {
    if (p.empty()) return;
    const std::filesystem::path path(p);
    p = (path.is_absolute() ? path : base / path).lexically_normal().string();
  };
  fix(cfg.data);
  fix(cfg.schema);
  fix(cfg.knowledge);
  fix(cfg.out_dir);
  for (auto& [name, path] : cfg.external) fix(path);
  return cfg;
}

// Checks inputs and method names before any work starts.
inline void check_inputs(const RunConfig& cfg) {
  std::vector<std::string> errors;
  namespace fs = std::filesystem;
  if (cfg.data.empty())
    errors.push_back("input.data is required");
  else if (!fs::is_regular_file(cfg.data))
    errors.push_back("input.data: no such file '" + cfg.data + "'");
  if (!cfg.schema.empty() && !fs::is_regular_file(cfg.schema))
    errors.push_back("input.schema: no such file '" + cfg.schema + "'");
  if (!cfg.knowledge.empty() && !fs::is_regular_file(cfg.knowledge))
    errors.push_back("input.knowledge: no such file '" + cfg.knowledge + "'");
  for (const auto& [name, path] : cfg.external)
    if (!fs::is_regular_file(path)) errors.push_back("external." + name + ": no such file '" + path + "'");
  if (cfg.out_dir.empty()) errors.push_back("output.dir must not be empty");
  for (const auto& m : cfg.methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      errors.push_back("run.methods: unknown method '" + m + "'");
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
}

}  // namespace tsdbn
