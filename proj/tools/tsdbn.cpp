// tsdbn command-line tool. Exit codes: 0 success, 1 invalid input or
// configuration, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tsdbn/pipeline/pipeline.hpp"
#include "tsdbn/sim/synthetic.hpp"

namespace fs = std::filesystem;
using namespace tsdbn;

namespace {

// Categorical columns pass through; continuous ones are discretized as in the
// pipeline, so an already discretized CSV loads unchanged.
DiscreteData load_discrete(const std::string& path, const std::string& schema) {
  const auto d = load_dataset(path, schema);
  return discrete_from_dataset(discretize_dataset(d).data);
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_out(const std::string& path, const std::string& text) {
  ensure_parent(path);
  write_file(path, text);
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : detail::parse_list(text)) {
    const auto d = parse_double(s);
    if (!d || *d < 1 || *d != std::floor(*d)) throw ValidationError("cutoffs: '" + s + "' is not a positive integer");
    out.push_back(static_cast<std::size_t>(*d));
  }
  return out;
}

void print_stages(const RunManifest& m) {
  for (const auto& s : m.stages)
    if (s.status != "ok")
      std::cerr << s.name << ": " << s.status << (s.error.empty() ? "" : ": " + s.error) << "\n";
}

// Interior cells go missing at random; the first and last rows stay complete
// so every series has observed endpoints.
void punch_missing(Dataset& d, double fraction, Rng& rng) {
  for (auto& c : d.columns)
    for (std::size_t r = 1; r + 1 < c.values.size(); ++r)
      if (rng.uniform() < fraction) c.values[r].reset();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal structure learning for multivariate time series with discrete dynamic Bayesian networks"};
  app.set_version_flag("--version", std::string(TSDBN_VERSION));
  app.require_subcommand(1);

  // impute
  std::string in, schema, out, report;
  auto* impute = app.add_subcommand("impute", "Kalman-smoother imputation of missing values");
  impute->add_option("--in", in, "Raw CSV")->required();
  impute->add_option("--schema", schema, "Column schema file");
  impute->add_option("--out", out, "Imputed CSV")->required();
  impute->add_option("--report", report, "Missing-data report");

  // discretize
  std::string map_out;
  auto* discretize = app.add_subcommand("discretize", "Three-level discretization by 2-means");
  discretize->add_option("--in", in, "Imputed CSV")->required();
  discretize->add_option("--schema", schema, "Column schema file");
  discretize->add_option("--out", out, "Discretized CSV")->required();
  discretize->add_option("--map", map_out, "Breakpoint map output");

  // diagnose
  std::size_t p_max = 17, bg_lags = 1, pacf_lags = 20;
  std::string pacf_out;
  auto* diagnose = app.add_subcommand("diagnose", "VAR order selection and residual diagnostics");
  diagnose->add_option("--in", in, "Imputed CSV")->required();
  diagnose->add_option("--schema", schema, "Column schema file");
  diagnose->add_option("--pmax", p_max, "Largest lag order")->capture_default_str();
  diagnose->add_option("--bg-lags", bg_lags, "Breusch-Godfrey lags")->capture_default_str();
  diagnose->add_option("--pacf-lags", pacf_lags, "PACF lags")->capture_default_str();
  diagnose->add_option("--out", out, "Diagnostics report")->required();
  diagnose->add_option("--pacf", pacf_out, "PACF values as CSV");

  // learn
  RunConfig lcfg;
  std::string method, dbn_out;
  std::uint64_t seed = 1;
  auto* learn = app.add_subcommand("learn", "Learn a causal structure");
  learn->add_option("--method", method, "lasso, lar, js, hc, tabu, pc or iamb")
      ->required()
      ->check(CLI::IsMember(known_methods()));
  learn->add_option("--in", in, "Imputed CSV")->required();
  learn->add_option("--schema", schema, "Column schema file");
  learn->add_option("--seed", seed, "Recorded for reproducibility; every learner is deterministic");
  learn->add_option("--threshold", lcfg.threshold, "lasso/lar: coefficient threshold")->capture_default_str();
  learn->add_option("--dbn-threshold", lcfg.dbn_threshold, "lasso/lar: threshold for the --dbn-out graph")
      ->capture_default_str();
  learn->add_option("--folds", lcfg.folds, "lasso/lar: cross-validation folds")->capture_default_str();
  learn->add_option("--cutoff", lcfg.js_cutoff, "js: selection cutoff")->capture_default_str();
  learn->add_option("--select", lcfg.js_select, "js: probability or pvalue")
      ->check(CLI::IsMember({"probability", "prob", "pvalue"}))
      ->capture_default_str();
  learn->add_option("--alpha", lcfg.alpha, "pc/iamb: test level")->capture_default_str();
  learn->add_option("--gamma", lcfg.gamma, "hc/tabu: extended BIC weight")->capture_default_str();
  learn->add_option("--tabu-length", lcfg.tabu_length, "tabu: list length")->capture_default_str();
  learn->add_flag("--respect-time", lcfg.respect_time, "hc/tabu/pc/iamb: forbid edges into the past");
  learn->add_option("--out", out, "Graph output (.edges, .dot or .json)")->required();
  learn->add_option("--dbn-out", dbn_out, "Graph used for parameterization, when it differs");

  // average
  std::vector<std::string> graph_paths;
  std::string data, cutoffs, table_out;
  double kappa = 0.0, budget = kDefaultCellBudget;
  auto* average = app.add_subcommand("average", "Edge-frequency model averaging with a BIC-chosen cutoff");
  average->add_option("--graphs", graph_paths, "Input graphs")->required()->expected(2, -1);
  average->add_option("--data", data, "Discretized CSV")->required();
  average->add_option("--schema", schema, "Column schema file");
  average->add_option("--cutoffs", cutoffs, "Candidate cutoffs, e.g. 2,3,4 (default all)");
  average->add_option("--kappa", kappa, "CPT smoothing")->capture_default_str();
  average->add_option("--out", out, "Averaged graph")->required();
  average->add_option("--table", table_out, "Per-cutoff BIC table");

  // evaluate
  std::string graph_path, knowledge, name;
  auto* evaluate = app.add_subcommand("evaluate", "Structural metrics and BIC/LL of a graph");
  evaluate->add_option("--graph", graph_path, "Graph to evaluate")->required();
  evaluate->add_option("--data", data, "Discretized CSV")->required();
  evaluate->add_option("--schema", schema, "Column schema file");
  evaluate->add_option("--knowledge", knowledge, "Knowledge graph for SHD");
  evaluate->add_option("--name", name, "Row label (default: graph file stem)");
  evaluate->add_option("--kappa", kappa, "CPT smoothing")->capture_default_str();
  evaluate->add_option("--cell-budget", budget, "Largest CPT per node")->capture_default_str();
  evaluate->add_option("--out", out, "Report CSV")->required();

  // policy
  RunConfig pcfg;
  std::string interventions, outcomes;
  auto* policy = app.add_subcommand("policy", "Average causal effects of interventions");
  policy->add_option("--graph", graph_path, "Graph")->required();
  policy->add_option("--data", data, "Discretized CSV")->required();
  policy->add_option("--schema", schema, "Column schema file");
  policy->add_option("--samples", pcfg.samples, "Monte Carlo samples per state")->capture_default_str();
  policy->add_option("--seed", pcfg.seed, "Monte Carlo seed")->required();
  policy->add_option("--kappa", pcfg.policy_kappa, "CPT smoothing")->capture_default_str();
  policy->add_option("--interventions", interventions, "Comma-separated intervention variables");
  policy->add_option("--outcomes", outcomes, "Comma-separated outcome variables");
  policy->add_option("--name", name, "Learner label (default: graph file stem)");
  policy->add_option("--out", out, "Policy CSV")->required();

  // pipeline
  std::string config_path, manifest_path;
  bool verify = false, strict = false;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a config file or a manifest");
  auto* config_opt = pipeline->add_option("--config", config_path, "Pipeline config");
  auto* manifest_opt = pipeline->add_option("--manifest", manifest_path, "Re-run a recorded manifest");
  config_opt->excludes(manifest_opt);
  pipeline->add_option("--out", out, "Output directory (overrides the config)");
  pipeline->add_flag("--verify", verify, "With --manifest: require byte-identical outputs");
  pipeline->add_flag("--strict", strict, "Exit non-zero when any stage failed");

  // simulate
  std::size_t k = 6, rows = 300;
  double missing = 0.0;
  sim::SparseVarOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic sparse VAR(1) dataset and pipeline config");
  simulate->add_option("--k", k, "Variables")->capture_default_str();
  simulate->add_option("--rows", rows, "Rows")->capture_default_str();
  simulate->add_option("--missing", missing, "Share of interior cells set missing")->capture_default_str();
  simulate->add_option("--density", sim_opt.density, "Expected edge share")->capture_default_str();
  simulate->add_option("--snr", sim_opt.snr, "Signal-to-noise ratio")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed")->capture_default_str();
  simulate->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*impute) {
      const auto raw = load_dataset(in, schema);
      const auto res = impute_dataset(raw);
      write_out(out, to_csv(res.data));
      const auto text = res.report.to_text(raw.n_rows());
      if (report.empty())
        std::cout << text;
      else
        write_out(report, text);
    } else if (*discretize) {
      const auto dd = discretize_dataset(load_dataset(in, schema));
      write_out(out, to_csv(dd.data));
      if (!map_out.empty()) write_out(map_out, dd.map.to_text());
    } else if (*diagnose) {
      const auto d = load_dataset(in, schema);
      write_out(out, diagnostics_report(d, p_max, bg_lags));
      if (!pacf_out.empty()) write_out(pacf_out, pacf_csv(d, pacf_lags));
    } else if (*learn) {
      lcfg.seed = seed;
      if (lcfg.js_select == "prob") lcfg.js_select = "probability";
      const auto g = learn_graph(method, load_dataset(in, schema), lcfg);
      write_out(out, render_graph(g.structure, out, method));
      if (!dbn_out.empty()) write_out(dbn_out, render_graph(Cpdag(g.dbn_graph), dbn_out, method));
      for (const auto& n : g.notes) std::cerr << "note: " << n << "\n";
      std::cerr << method << ": " << g.structure.edge_count() << " edges\n";
    } else if (*average) {
      std::vector<Dag> graphs;
      for (const auto& p : graph_paths) graphs.push_back(load_graph(p));
      const auto sel = select_cutoff(graphs, load_discrete(data, schema), parse_cutoffs(cutoffs), kappa);
      write_out(out, to_edge_list(sel.graph));
      if (!table_out.empty()) write_out(table_out, cutoff_csv(sel));
      std::cerr << "cutoff " << sel.cutoff << ": " << sel.graph.edge_count() << " edges\n";
    } else if (*evaluate) {
      const auto g = external_graph(name.empty() ? fs::path(graph_path).stem().string() : name, load_graph(graph_path));
      std::optional<Dag> kg;
      if (!knowledge.empty()) kg = load_graph(knowledge);
      const auto row = evaluate_graph(g, load_discrete(data, schema), kg, kappa, budget);
      write_out(out, report_csv({row}));
      for (const auto& n : row.notes) std::cerr << "note: " << n << "\n";
    } else if (*policy) {
      if (!interventions.empty()) pcfg.interventions = detail::parse_list(interventions);
      if (!outcomes.empty()) pcfg.outcomes = detail::parse_list(outcomes);
      const auto rep = run_policy(load_graph(graph_path), load_discrete(data, schema), pcfg);
      const std::string label = name.empty() ? fs::path(graph_path).stem().string() : name;
      write_out(out, policy_csv({{label, rep}}, pcfg.seed, pcfg.samples));
      std::cerr << rep.identified << " identified, " << rep.matches << " matching\n";
    } else if (*pipeline) {
      PipelineResult res;
      if (!manifest_path.empty()) {
        res = rerun_from_manifest(manifest_path, out, verify);
      } else {
        if (config_path.empty()) throw ValidationError("pipeline needs --config or --manifest");
        if (verify) throw ValidationError("--verify needs --manifest");
        auto cfg = validate_config(read_file(config_path));
        cfg = resolve_paths(cfg, fs::absolute(config_path).parent_path());
        if (!out.empty()) cfg.out_dir = fs::absolute(out).lexically_normal().string();
        res = run_pipeline(cfg);
      }
      print_stages(res.manifest);
      std::cerr << "outputs in " << res.out_dir.string() << (res.manifest.complete() ? "" : " (partial)") << "\n";
      if (strict)
        for (const auto& s : res.manifest.stages)
          if (s.status == "failed") return s.exit_code;
    } else if (*simulate) {
      if (!(missing >= 0.0 && missing < 1.0)) throw ValidationError("--missing must lie in [0, 1)");
      if (rows < 10) throw ValidationError("--rows must be >= 10");
      Rng rng(seed);
      const auto var = sim::random_sparse_var(k, rng, sim_opt);
      auto d = sim::to_dataset(sim::simulate_var(var, rows, rng), var.names);
      punch_missing(d, missing, rng);
      fs::create_directories(out);
      const fs::path dir(out);
      write_file((dir / "data.csv").string(), to_csv(d));
      write_file((dir / "schema.txt").string(), Schema::of(d).to_text());
      write_file((dir / "truth.edges").string(), to_edge_list(var.support()));
      // Policy over the first half of the variables as interventions and the
      // rest as outcomes.
      std::vector<std::string> xs(var.names.begin(), var.names.begin() + static_cast<long>(k / 2));
      std::vector<std::string> ys(var.names.begin() + static_cast<long>(k / 2), var.names.end());
      std::string ini = "[input]\ndata = data.csv\nschema = schema.txt\nknowledge = truth.edges\n\n";
      ini += "[output]\ndir = run\n\n[run]\nseed = " + std::to_string(seed) + "\n\n";
      ini += "[diagnose]\np_max = " + std::to_string(std::min<std::size_t>(8, std::max<std::size_t>(1, rows / (4 * k + 4)))) + "\n\n";
      ini += "[policy]\nsamples = 2000\ninterventions = " + detail::join(xs) + "\noutcomes = " + detail::join(ys) + "\n";
      write_file((dir / "pipeline.ini").string(), ini);
      std::cerr << "wrote " << (dir / "data.csv").string() << " (" << var.support().edge_count() << " true edges)\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
