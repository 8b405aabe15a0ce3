#pragma once

#include <chrono>
#include <exception>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "manifest.hpp"
#include "stages.hpp"

namespace tsdbn {

struct PipelineResult {
  RunManifest manifest;
  std::vector<ReportRow> report;
  std::filesystem::path out_dir;
};

namespace detail {

// Runs `body`, timing it and turning any exception into a failed record.
template <class F>
StageRecord run_stage(const std::string& name, F&& body) {
  StageRecord rec{name, "ok", 0.0, {}, 0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const Error& e) {
    rec.status = "failed";
    rec.error = e.what();
    rec.exit_code = e.exit_code();
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error = e.what();
    rec.exit_code = static_cast<int>(ErrorKind::numeric);
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

inline StageRecord skipped(const std::string& name, const std::string& why) { return {name, "skipped", 0.0, why, 0}; }

// Calls f(0..n-1), concurrently when asked. Each call must only touch its
// own slot of any shared output.
template <class F>
void for_each_index(std::size_t n, bool parallel, F&& f) {
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t i = 0; i < n; ++i) jobs.push_back(std::async(std::launch::async, [&f, i] { f(i); }));
  for (auto& j : jobs) j.get();
}

}  // namespace detail

// impute -> discretize -> diagnose -> learn -> average -> evaluate -> policy.
// A failed stage halts the stages that depend on it; independent stages still
// run and the manifest records what completed. Only a failure to produce the
// imputed data (which everything depends on) is rethrown, after the manifest
// has been written.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  check_inputs(cfg);
  PipelineResult res;
  res.out_dir = cfg.out_dir;
  fs::create_directories(res.out_dir / "graphs");
  auto& man = res.manifest;
  man.config = cfg.to_text();
  auto hash_input = [&](const std::string& role, const std::string& path) {
    if (!path.empty()) man.inputs.push_back({role, path, sha256_hex(read_file(path))});
  };
  hash_input("data", cfg.data);
  hash_input("schema", cfg.schema);
  hash_input("knowledge", cfg.knowledge);
  for (const auto& [name, path] : cfg.external) hash_input("external." + name, path);

  auto write = [&](const std::string& rel, const std::string& text) {
    write_file((res.out_dir / rel).string(), text);
    man.outputs.push_back({"", rel, sha256_hex(text)});
  };
  auto finish = [&] { write_file((res.out_dir / "manifest.json").string(), man.to_json().dump(2) + "\n"); };

  // Imputation: the root of every other stage.
  std::optional<Dataset> imputed;
  std::string impute_report;
  std::exception_ptr root_error;
  man.stages.push_back(detail::run_stage("impute", [&] {
    try {
      const auto raw = load_dataset(cfg.data, cfg.schema);
      auto r = impute_dataset(raw);
      if (r.data.k_vars() == 0) throw DataError("imputation left no usable columns");
      if (r.data.n_rows() < 3) throw DataError("imputation left fewer than 3 rows");
      impute_report = r.report.to_text(raw.n_rows());
      imputed = std::move(r.data);
    } catch (...) {
      root_error = std::current_exception();
      throw;
    }
  }));
  if (!imputed) {
    finish();
    std::rethrow_exception(root_error);
  }
  write("imputed.csv", to_csv(*imputed));
  write("impute_report.txt", impute_report);

  std::optional<DiscreteData> discrete;
  man.stages.push_back(detail::run_stage("discretize", [&] {
    const auto dd = discretize_dataset(*imputed);
    discrete = discrete_from_dataset(dd.data);
    write("discretized.csv", to_csv(dd.data));
    write("discretization.map", dd.map.to_text());
  }));

  if (cfg.diagnose) {
    man.stages.push_back(detail::run_stage("diagnose", [&] {
      const auto text = diagnostics_report(*imputed, cfg.p_max, cfg.bg_lags);
      const auto pacf_text = pacf_csv(*imputed, cfg.pacf_lags);
      write("diagnostics.txt", text);
      write("pacf.csv", pacf_text);
    }));
  } else {
    man.stages.push_back(detail::skipped("diagnose", "disabled"));
  }

  // Learners, run independently of each other.
  std::vector<std::optional<LearnedGraph>> learned(cfg.methods.size());
  std::vector<StageRecord> learn_records(cfg.methods.size());
  detail::for_each_index(cfg.methods.size(), cfg.parallel, [&](std::size_t i) {
    learn_records[i] = detail::run_stage("learn." + cfg.methods[i],
                                         [&] { learned[i] = learn_graph(cfg.methods[i], *imputed, cfg); });
  });
  for (const auto& r : learn_records) man.stages.push_back(r);
  for (const auto& [name, path] : cfg.external) {
    learned.emplace_back();
    auto& slot = learned.back();
    man.stages.push_back(detail::run_stage("load." + name, [&, name = name, path = path] {
      const auto g = load_graph(path);
      const auto vars = imputed->names();
      slot = external_graph(name, is_two_slice_graph(g) ? as_two_slice(g, vars) : align_nodes(g, vars));
    }));
  }
  std::vector<std::string> names(cfg.methods);
  for (const auto& [name, path] : cfg.external) names.push_back(name);
  auto find_graph = [&](const std::string& n) -> const std::optional<LearnedGraph>* {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return &learned[i];
    return nullptr;
  };
  for (const auto& g : learned) {
    if (!g) continue;
    write("graphs/" + g->name + ".edges", to_edge_list(g->structure));
    if (Cpdag(g->dbn_graph).directed_edges() != g->structure.directed_edges() || g->structure.undirected_edges().size())
      write("graphs/" + g->name + ".dbn.edges", to_edge_list(g->dbn_graph));
  }

  // Model averaging over the requested variable-level graphs.
  if (cfg.average) {
    std::vector<std::string> members, missing;
    for (const auto& n : cfg.average_learners) {
      const auto* g = find_graph(n);
      if (!g) continue;  // not requested in this run
      (*g && (*g)->variable_graph ? members : missing).push_back(n);
    }
    if (!missing.empty()) {
      man.stages.push_back(
          {"average", "failed", 0.0, "no variable-level graph from: " + detail::join(missing), 0});
    } else if (members.size() < 2) {
      man.stages.push_back(detail::skipped("average", "fewer than two graphs to average"));
    } else if (!discrete) {
      man.stages.push_back(detail::skipped("average", "discretization failed"));
    } else {
      man.stages.push_back(detail::run_stage("average", [&] {
        std::vector<Dag> graphs;
        for (const auto& n : members) graphs.push_back(*(*find_graph(n))->variable_graph);
        const auto sel = select_cutoff(graphs, *discrete, cfg.cutoffs, cfg.kappa, cfg.cell_budget);
        write("averaging.csv", frequency_csv(edge_frequencies(graphs)));
        write("average_cutoffs.csv", cutoff_csv(sel));
        LearnedGraph avg = external_graph("average", sel.graph);
        avg.notes.push_back("cutoff " + std::to_string(sel.cutoff) + " of " + std::to_string(graphs.size()) + " (" +
                            detail::join(members, " ") + ")");
        write("graphs/average.edges", to_edge_list(avg.structure));
        names.push_back("average");
        learned.push_back(std::move(avg));
      }));
    }
  } else {
    man.stages.push_back(detail::skipped("average", "disabled"));
  }

  // Evaluation and policy, per graph.
  std::optional<Dag> knowledge;
  if (!cfg.knowledge.empty())
    man.stages.push_back(detail::run_stage("knowledge", [&] { knowledge = load_graph(cfg.knowledge); }));
  const std::size_t n_graphs = learned.size();
  std::vector<ReportRow> rows(n_graphs);
  std::vector<StageRecord> eval_records(n_graphs), policy_records(n_graphs);
  std::vector<std::optional<PolicyReport>> policies(n_graphs);
  detail::for_each_index(n_graphs, cfg.parallel, [&](std::size_t i) {
    const auto& name = names[i];
    if (!learned[i] || !discrete) {
      const std::string why = !learned[i] ? "no graph from " + name : std::string("discretization failed");
      rows[i].learner = name;
      rows[i].failed = true;
      rows[i].notes.push_back(why);
      eval_records[i] = detail::skipped("evaluate." + name, why);
      policy_records[i] = detail::skipped("policy." + name, why);
      return;
    }
    eval_records[i] = detail::run_stage("evaluate." + name, [&] {
      rows[i] = evaluate_graph(*learned[i], *discrete, knowledge, cfg.kappa, cfg.cell_budget);
    });
    if (!cfg.policy) {
      policy_records[i] = detail::skipped("policy." + name, "disabled");
      return;
    }
    policy_records[i] =
        detail::run_stage("policy." + name, [&] { policies[i] = run_policy(learned[i]->dbn_graph, *discrete, cfg); });
  });
  std::vector<std::pair<std::string, PolicyReport>> policy_rows;
  for (std::size_t i = 0; i < n_graphs; ++i) {
    if (eval_records[i].status == "failed") {
      rows[i].learner = names[i];
      rows[i].failed = true;
      rows[i].notes.push_back("evaluate: " + eval_records[i].error);
    }
    if (policies[i]) {
      rows[i].identified = policies[i]->identified;
      rows[i].matches = policies[i]->matches;
      policy_rows.emplace_back(names[i], *policies[i]);
    } else if (policy_records[i].status == "failed") {
      rows[i].notes.push_back("policy: " + policy_records[i].error);
      rows[i].partial = true;
    }
    man.stages.push_back(eval_records[i]);
    man.stages.push_back(policy_records[i]);
  }
  write("report.csv", report_csv(rows));
  if (cfg.policy) write("policy.csv", policy_csv(policy_rows, cfg.seed, cfg.samples));
  res.report = std::move(rows);
  finish();
  return res;
}

// Re-runs the configuration recorded in a manifest into `out_dir` (the
// recorded directory when empty). Inputs must still hash to the recorded
// values. With `verify`, every recorded output must come out byte-identical.
inline PipelineResult rerun_from_manifest(const std::string& manifest_path, const std::string& out_dir = {},
                                          bool verify = false) {
  const auto old = RunManifest::load(manifest_path);
  auto cfg = validate_config(old.config);
  if (!out_dir.empty()) cfg.out_dir = std::filesystem::absolute(out_dir).lexically_normal().string();
  std::vector<std::string> problems;
  for (const auto& in : old.inputs) {
    if (!std::filesystem::is_regular_file(in.path)) {
      problems.push_back(in.role + ": '" + in.path + "' is missing");
      continue;
    }
    if (sha256_hex(read_file(in.path)) != in.sha256) problems.push_back(in.role + ": '" + in.path + "' has changed");
  }
  if (!problems.empty()) throw DataError("manifest inputs do not match:\n  " + detail::join(problems, "\n  "));
  auto res = run_pipeline(cfg);
  if (verify) {
    std::map<std::string, std::string> now;
    for (const auto& f : res.manifest.outputs) now[f.path] = f.sha256;
    for (const auto& f : old.outputs) {
      const auto it = now.find(f.path);
      if (it == now.end())
        problems.push_back(f.path + " was not produced");
      else if (it->second != f.sha256)
        problems.push_back(f.path + " differs");
    }
    for (const auto& [path, hash] : now)
      if (std::none_of(old.outputs.begin(), old.outputs.end(), [&](const FileHash& f) { return f.path == path; }))
        problems.push_back(path + " is new");
    if (!problems.empty()) throw DataError("rerun is not identical:\n  " + detail::join(problems, "\n  "));
  }
  return res;
}

}  // namespace tsdbn
