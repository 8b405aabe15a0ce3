#pragma once

#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "../averaging/averaging.hpp"
#include "../data/csv.hpp"
#include "../data/discretize.hpp"
#include "../data/transform.hpp"
#include "../dbn/dbn.hpp"
#include "../dbn/discrete.hpp"
#include "../dbn/policy.hpp"
#include "../graph/algorithms.hpp"
#include "../graph/io.hpp"
#include "../impute/impute.hpp"
#include "../lars/learner.hpp"
#include "../search/constraint.hpp"
#include "../search/score_search.hpp"
#include "../shrink/js_learner.hpp"
#include "../var/diagnostics.hpp"
#include "../var/var.hpp"
#include "config.hpp"

namespace tsdbn {

inline Dataset load_dataset(const std::string& path, const std::string& schema_path = {}) {
  if (schema_path.empty()) return load_csv(path);
  return load_csv(path, Schema::parse(read_file(schema_path)));
}

// ---- diagnostics ---------------------------------------------------------

// Order-selection table, then per-equation Jarque-Bera and Breusch-Godfrey
// tests on the VAR(1) residuals.
inline std::string diagnostics_report(const Dataset& d, std::size_t p_max, std::size_t bg_lags) {
  const auto table = select_order(d, p_max);
  std::string out = "# VAR order selection, common sample n = " + std::to_string(table.rows.front().n) + "\n";
  out += "order,loglik,aic,sc,hq,log_fpe\n";
  for (const auto& r : table.rows)
    out += std::to_string(r.order) + "," + format_number(r.log_likelihood) + "," + format_number(r.aic) + "," +
           format_number(r.sc) + "," + format_number(r.hq) + "," + format_number(r.log_fpe) + "\n";
  out += "# optimal lags: AIC " + std::to_string(table.aic_order) + ", SC " + std::to_string(table.sc_order) +
         ", HQ " + std::to_string(table.hq_order) + ", FPE " + std::to_string(table.fpe_order) + "\n\n";

  const auto design = build_lagged(d, 1);
  const auto fit = fit_var(design);
  out += "# VAR(1) residual diagnostics\n";
  out += "variable,jb_statistic,jb_p_value,skewness,kurtosis,bg_statistic,bg_df,bg_p_value\n";
  for (std::size_t j = 0; j < design.k(); ++j) {
    const Vector res = fit.residuals.col(static_cast<Eigen::Index>(j));
    const auto jb = jarque_bera(std::span<const double>(res.data(), static_cast<std::size_t>(res.size())));
    const auto bg = breusch_godfrey(fit, design, j, bg_lags);
    out += detail::quote_csv(design.variables[j]) + "," + format_number(jb.statistic) + "," +
           format_number(jb.p_value) + "," + format_number(jb.skewness) + "," + format_number(jb.kurtosis) + "," +
           format_number(bg.statistic) + "," + format_number(bg.df) + "," + format_number(bg.p_value) + "\n";
  }
  return out;
}

inline std::string pacf_csv(const Dataset& d, std::size_t lags) {
  std::string out = "variable";
  for (std::size_t l = 1; l <= lags; ++l) out += ",lag" + std::to_string(l);
  out += "\n";
  const Matrix m = numeric_matrix(d);
  for (std::size_t c = 0; c < d.k_vars(); ++c) {
    const Vector x = m.col(static_cast<Eigen::Index>(c));
    out += detail::quote_csv(d.columns[c].name);
    try {
      for (double v : pacf(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), lags))
        out += "," + format_number(v);
    } catch (const DataError&) {
      for (std::size_t l = 0; l < lags; ++l) out += ",";  // constant series
    }
    out += "\n";
  }
  return out;
}

// ---- learners --------------------------------------------------------------

// A learned structure. `structure` is what SHD and edge counts are taken on;
// `dbn_graph` is the DAG that gets parameterized (they differ for the
// regression learners, whose DBN graph uses the stricter threshold, and for
// constraint-based learners, whose DBN graph is an extension of the CPDAG).
struct LearnedGraph {
  std::string name;
  Cpdag structure;
  Dag dbn_graph;
  std::optional<Dag> variable_graph;  // variable-level DAG, when the learner produces one
  std::vector<std::string> notes;
};

inline std::string join_notes(const std::vector<std::string>& notes) { return detail::join(notes, "; "); }

inline LearnedGraph learn_graph(const std::string& method, const Dataset& imputed, const RunConfig& cfg) {
  LearnedGraph out;
  out.name = method;
  if (method == "lasso" || method == "lar") {
    LarsConfig lc;
    lc.mode = method == "lasso" ? LarsMode::lasso : LarsMode::lar;
    lc.folds = cfg.folds;
    lc.grid_points = cfg.grid_points;
    lc.threshold = cfg.threshold;
    const auto res = learn_structure(scaled_lag1_design(imputed), lc);
    if (res.failures.size() == imputed.k_vars())
      throw NumericError(method + ": every target regression failed (first: " + res.failures.front().error + ")");
    for (const auto& f : res.failures) out.notes.push_back("target " + f.target + " failed: " + f.error);
    if (res.rejected_for_cycles) out.notes.push_back(std::to_string(res.rejected_for_cycles) + " edges rejected for cycles");
    out.variable_graph = res.graph;
    out.structure = Cpdag(res.graph);
    out.dbn_graph = coefficient_graph(res.coefficients, imputed.names(), cfg.dbn_threshold).graph;
  } else if (method == "js") {
    const auto res = js_structure(build_lagged(imputed, 1), cfg.js_cutoff,
                                  cfg.js_select == "pvalue" ? JsSelect::pvalue : JsSelect::probability);
    if (res.rejected_for_cycles) out.notes.push_back(std::to_string(res.rejected_for_cycles) + " edges rejected for cycles");
    out.variable_graph = res.graph;
    out.structure = Cpdag(res.graph);
    out.dbn_graph = res.graph;
  } else if (method == "hc" || method == "tabu" || method == "pc" || method == "iamb") {
    auto data = two_slice_numeric(build_lagged(imputed, 1));
    if (!cfg.respect_time) data.tiers.clear();
    if (method == "hc" || method == "tabu") {
      SearchOptions so;
      so.tiers = data.tiers;
      const auto res = method == "hc"
                           ? hill_climb(data, cfg.gamma, so)
                           : tabu_search(data, cfg.gamma, TabuOptions{cfg.tabu_length, cfg.max_worsening}, so);
      out.structure = Cpdag(res.graph);
      out.dbn_graph = res.graph;
    } else {
      ConstraintOptions co;
      co.tiers = data.tiers;
      if (cfg.max_condition_size > 0) co.max_condition_size = cfg.max_condition_size;
      const CiTest test(data, cfg.alpha);
      out.structure = method == "pc" ? pc_stable(data, test, co).graph : iamb(data, test, co).graph;
      const auto ext = extend_or_orient(out.structure);
      if (!ext.consistent)
        out.notes.push_back("no consistent extension; fallback orientation dropped " + std::to_string(ext.dropped) +
                            " edges");
      out.dbn_graph = ext.graph;
    }
  } else {
    throw ValidationError("unknown method '" + method + "'");
  }
  return out;
}

inline LearnedGraph external_graph(const std::string& name, const Dag& g) {
  LearnedGraph out;
  out.name = name;
  out.structure = Cpdag(g);
  out.dbn_graph = g;
  if (!is_two_slice_graph(g)) out.variable_graph = g;
  return out;
}

// Writes by extension: .dot, .json, otherwise the edge-list text.
inline std::string render_graph(const Cpdag& g, const std::string& path, const std::string& name = "G") {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".dot") return to_dot(g, name);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    if (!g.undirected_edges().empty()) throw ValidationError("JSON graph output needs a fully directed graph");
    Dag d(g.nodes());
    for (auto [a, b] : g.directed_edges()) d.try_add(a, b);
    return to_json(d).dump(2) + "\n";
  }
  return to_edge_list(g);
}

// ---- structural comparison ------------------------------------------------

// The structure over the two-slice node list [v@t-1 ..., v ...]. A
// variable-level edge i -> j becomes i@t-1 -> j (variable-level undirected
// edges have no lifted reading and are rejected).
inline Cpdag two_slice_structure(const Cpdag& g, const std::vector<std::string>& variables) {
  std::vector<std::string> names;
  for (const auto& v : variables) names.push_back(lagged_name(v));
  for (const auto& v : variables) names.push_back(v);
  Cpdag out(names);
  bool lifted = false;
  for (const auto& n : g.nodes()) lifted = lifted || is_lagged_name(n);
  auto node = [&](std::size_t i, bool source) {
    const auto& n = g.name(i);
    const std::string target = (!lifted && source) ? lagged_name(n) : n;
    if (std::find(names.begin(), names.end(), target) == names.end())
      throw DataError("graph node '" + n + "' has no data column");
    return out.index(target);
  };
  for (std::size_t i = 0; i < g.size(); ++i) node(i, false);
  for (auto [a, b] : g.directed_edges()) out.set_directed(node(a, true), node(b, false));
  for (auto [a, b] : g.undirected_edges()) {
    if (!lifted) throw DataError("variable-level graph has an undirected edge");
    out.set_undirected(node(a, false), node(b, false));
  }
  return out;
}

// ---- evaluation -------------------------------------------------------------

struct ReportRow {
  std::string learner;
  std::optional<std::size_t> edges;
  std::optional<std::size_t> shd;
  std::optional<std::size_t> free_parameters;
  std::optional<double> bic;
  std::optional<double> loglik;
  std::optional<std::size_t> identified;
  std::optional<std::size_t> matches;
  std::vector<std::string> notes;
  bool failed = false;
  bool partial = false;  // some measure could not be computed; see notes
};

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  auto opt = [](const auto& v) -> std::string {
    if (!v) return {};
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>)
      return format_number(*v);
    else
      return std::to_string(*v);
  };
  std::string out = "learner,shd,free_parameters,edges,bic,loglik,identified,matches,status,notes\n";
  for (const auto& r : rows)
    out += detail::quote_csv(r.learner) + "," + opt(r.shd) + "," + opt(r.free_parameters) + "," + opt(r.edges) + "," +
           opt(r.bic) + "," + opt(r.loglik) + "," + opt(r.identified) + "," + opt(r.matches) + "," +
           (r.failed ? "failed" : r.partial ? "partial" : "ok") + "," + detail::quote_csv(join_notes(r.notes)) +
           "\n";
  return out;
}

// Edge count, SHD against the knowledge graph (both lifted to two slices)
// and the BIC/LL of the DBN graph fitted on the two-slice discrete data.
// Failures of individual measures are noted in the row.
inline ReportRow evaluate_graph(const LearnedGraph& g, const DiscreteData& discrete, const std::optional<Dag>& knowledge,
                                double kappa, double cell_budget) {
  ReportRow row;
  row.learner = g.name;
  row.notes = g.notes;
  row.edges = g.structure.edge_count();
  if (knowledge) {
    try {
      row.shd = shd(two_slice_structure(g.structure, discrete.names),
                    two_slice_structure(Cpdag(*knowledge), discrete.names));
    } catch (const Error& e) {
      row.notes.push_back(std::string("shd: ") + e.what());
      row.partial = true;
    }
  }
  try {
    const auto lagged = two_slice_discrete(discrete);
    const auto dbn = fit_cpts(as_two_slice(g.dbn_graph, discrete.names), lagged, kappa, cell_budget);
    row.free_parameters = free_parameters(dbn);
    row.loglik = loglik(dbn, lagged);
    row.bic = bic_discrete(dbn, lagged);
  } catch (const Error& e) {
    row.notes.push_back(std::string("dbn: ") + e.what());
    row.partial = true;
  }
  return row;
}

inline PolicyReport run_policy(const Dag& dbn_graph, const DiscreteData& discrete, const RunConfig& cfg) {
  const auto lagged = two_slice_discrete(discrete);
  const auto dbn = fit_cpts(as_two_slice(dbn_graph, discrete.names), lagged, cfg.policy_kappa, cfg.cell_budget);
  return policy_eval(dbn, cfg.interventions, cfg.outcomes, cfg.samples, cfg.seed);
}

// Policy rows of several learners in one table; the first line records the
// Monte Carlo settings.
inline std::string policy_csv(const std::vector<std::pair<std::string, PolicyReport>>& reports, std::uint64_t seed,
                              std::size_t samples) {
  std::string out = "# seed = " + std::to_string(seed) + ", samples = " + std::to_string(samples) + "\n";
  bool header = true;
  for (const auto& [name, rep] : reports) {
    const auto body = rep.to_csv();
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    if (header) out += "learner," + line + "\n";
    header = false;
    while (std::getline(in, line)) out += detail::quote_csv(name) + "," + line + "\n";
  }
  if (header) out += "learner,intervention,outcome,identified,ace,standard_error,p_state1,p_state2,p_state3,matches\n";
  return out;
}

// ---- averaging --------------------------------------------------------------

inline std::string frequency_csv(const EdgeFrequencyTable& t) {
  std::string out = "rank,from,to,count\n";
  for (const auto& e : t.edges)
    out += std::to_string(e.rank) + "," + detail::quote_csv(e.from) + "," + detail::quote_csv(e.to) + "," +
           std::to_string(e.count) + "\n";
  return out;
}

inline std::string cutoff_csv(const CutoffSelection& sel) {
  std::string out = "cutoff,edges,bic,loglik,selected,error\n";
  for (const auto& c : sel.candidates) {
    const bool ok = c.error.empty();
    out += std::to_string(c.cutoff) + "," + (ok ? std::to_string(c.edges) : "") + "," +
           (ok ? format_number(c.bic) : "") + "," + (ok ? format_number(c.loglik) : "") + "," +
           (c.cutoff == sel.cutoff ? "1" : "0") + "," + detail::quote_csv(c.error) + "\n";
  }
  return out;
}

}  // namespace tsdbn
