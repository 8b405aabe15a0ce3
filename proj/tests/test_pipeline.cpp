#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tsdbn/pipeline/pipeline.hpp"
#include "tsdbn/sim/synthetic.hpp"

using namespace tsdbn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tsdbn_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

// Three-variable VAR(1) with X1 -> X2 -> X3 and a few missing cells.
fs::path write_synthetic(const fs::path& dir, std::size_t rows = 160) {
  Rng rng(21);
  sim::SparseVar v;
  v.names = {"X1", "X2", "X3"};
  v.a = Matrix::Zero(3, 3);
  v.a.diagonal().setConstant(0.3);
  v.a(1, 0) = 0.7;
  v.a(2, 1) = -0.6;
  v.noise_sd = Vector::Ones(3);
  auto d = sim::to_dataset(sim::simulate_var(v, rows, rng), v.names);
  d.columns[0].values[10].reset();
  d.columns[2].values[50].reset();
  d.columns[1].values[51].reset();
  write_file((dir / "data.csv").string(), to_csv(d));
  write_file((dir / "truth.edges").string(), to_edge_list(v.support()));
  return dir / "data.csv";
}

RunConfig small_config(const fs::path& dir) {
  auto cfg = validate_config(
      "[input]\ndata = data.csv\nknowledge = truth.edges\n"
      "[output]\ndir = run\n"
      "[diagnose]\np_max = 4\n"
      "[policy]\nsamples = 400\ninterventions = X1, X2\noutcomes = X2, X3\n");
  return resolve_paths(cfg, dir);
}

const ReportRow& row(const PipelineResult& r, const std::string& learner) {
  for (const auto& x : r.report)
    if (x.learner == learner) return x;
  throw std::runtime_error("no report row for " + learner);
}

const StageRecord& stage(const RunManifest& m, const std::string& name) {
  for (const auto& s : m.stages)
    if (s.name == name) return s;
  throw std::runtime_error("no stage " + name);
}

}  // namespace

TEST(ValidateConfig, EmptyGivesDefaults) {
  const auto c = validate_config("");
  EXPECT_EQ(c.methods, known_methods());
  EXPECT_DOUBLE_EQ(c.alpha, 0.05);
  EXPECT_DOUBLE_EQ(c.gamma, 0.5);
  EXPECT_DOUBLE_EQ(c.threshold, 0.0);
  EXPECT_DOUBLE_EQ(c.dbn_threshold, 0.4);
  EXPECT_DOUBLE_EQ(c.js_cutoff, 0.05);
  EXPECT_EQ(c.folds, 10u);
  EXPECT_EQ(c.grid_points, 101u);
  EXPECT_EQ(c.p_max, 17u);
  EXPECT_EQ(c.samples, 100000u);
  EXPECT_DOUBLE_EQ(c.kappa, 0.0);
  EXPECT_DOUBLE_EQ(c.policy_kappa, 1.0);
  EXPECT_EQ(c.interventions.size(), 12u);
  EXPECT_EQ(c.outcomes.size(), 3u);
  EXPECT_TRUE(c.cutoffs.empty());
}

TEST(ValidateConfig, AlphaOutOfRange) {
  try {
    validate_config("[search]\nalpha = 1.5\n");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("search.alpha"), std::string::npos) << e.what();
  }
}

TEST(ValidateConfig, AllProblemsReportedTogether) {
  try {
    validate_config("[search]\nalpha = 1.5\nbogus = 2\n[lars]\nfolds = 1\n[run]\nmethods = lasso, simone\nseed = -3\n");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    for (const char* needle : {"search.alpha", "search.bogus", "lars.folds", "simone", "run.seed"})
      EXPECT_NE(msg.find(needle), std::string::npos) << needle << " missing from:\n" << msg;
    EXPECT_NE(msg.find("5 problems"), std::string::npos) << msg;
  }
}

TEST(ValidateConfig, CutoffListAndDottedKeys) {
  const auto c = validate_config("average.cutoffs = 2,3,4\nsearch.gamma = 0\n# comment\n\n[js]\nselect = pvalue\n");
  EXPECT_EQ(c.cutoffs, (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_DOUBLE_EQ(c.gamma, 0.0);
  EXPECT_EQ(c.js_select, "pvalue");
  EXPECT_THROW(validate_config("[average]\ncutoffs = 0, 2\n"), ValidationError);
  EXPECT_THROW(validate_config("[average]\ncutoffs = 1.5\n"), ValidationError);
}

TEST(ValidateConfig, UnknownMethodAndSyntaxErrors) {
  EXPECT_THROW(validate_config("[run]\nmethods = hc, simone\n"), ValidationError);
  EXPECT_THROW(validate_config("[run]\nmethods =\n"), ValidationError);
  EXPECT_THROW(validate_config("[search\n"), ValidationError);
  EXPECT_THROW(validate_config("just words\n"), ValidationError);
  EXPECT_THROW(validate_config("[run]\nseed = 1\nseed = 2\n"), ValidationError);
  EXPECT_THROW(validate_config("[run]\nparallel = maybe\n"), ValidationError);
  EXPECT_THROW(validate_config("[external]\nhc = g.edges\n"), ValidationError);
  EXPECT_THROW(validate_config("[average]\nlearners = lasso, mystery\n"), ValidationError);
}

TEST(ValidateConfig, CanonicalTextRoundTrips) {
  const auto c = validate_config(
      "[run]\nseed = 18446744073709551615\nmethods = js, pc\nparallel = false\n"
      "[search]\nalpha = 0.01\n[external]\nsimone = s.edges\n[average]\nlearners = js, simone\ncutoffs = 2\n"
      "[policy]\ninterventions = a b, c\n");
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.interventions, (std::vector<std::string>{"a b", "c"}));
  const auto again = validate_config(c.to_text());
  EXPECT_EQ(again.to_text(), c.to_text());
  EXPECT_EQ(again.external.at("simone"), "s.edges");
  EXPECT_EQ(again.methods, (std::vector<std::string>{"js", "pc"}));
}

TEST(ValidateConfig, PathsResolvedAndChecked) {
  const auto dir = scratch("paths");
  auto c = resolve_paths(validate_config("[input]\ndata = d.csv\n[output]\ndir = out\n"), dir);
  EXPECT_EQ(fs::path(c.data), dir / "d.csv");
  EXPECT_EQ(fs::path(c.out_dir), dir / "out");
  EXPECT_THROW(check_inputs(c), ValidationError);
  write_file((dir / "d.csv").string(), "t,a\n1,1\n");
  EXPECT_NO_THROW(check_inputs(c));
  EXPECT_THROW(check_inputs(validate_config("")), ValidationError);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(TwoSliceStructure, LiftsVariableLevelEdges) {
  Dag g({"a", "b", "c"});
  g.try_add(0, 1);
  g.try_add(2, 1);
  const auto lifted = two_slice_structure(Cpdag(g), {"a", "b", "c"});
  ASSERT_EQ(lifted.size(), 6u);
  EXPECT_TRUE(lifted.has_directed(lifted.index("a@t-1"), lifted.index("b")));
  EXPECT_TRUE(lifted.has_directed(lifted.index("c@t-1"), lifted.index("b")));
  EXPECT_EQ(lifted.edge_count(), 2u);
  // Already lifted graphs keep their edges, including undirected ones.
  Cpdag two({"a@t-1", "a"});
  two.set_undirected(0, 1);
  const auto same = two_slice_structure(two, {"a"});
  EXPECT_TRUE(same.has_undirected(same.index("a@t-1"), same.index("a")));
  EXPECT_THROW(two_slice_structure(Cpdag(Dag({"z"})), {"a"}), DataError);
}

TEST(ReportCsv, ColumnsAndStatus) {
  ReportRow ok{"js", 3, 1, 20, -10.5, -4.0, 2, 1, {"1 edges rejected for cycles"}, false};
  ReportRow partial{"lasso", 9, std::nullopt, std::nullopt, std::nullopt, std::nullopt, 0, 0, {"dbn: budget"}, false, true};
  ReportRow failed{"hc", {}, {}, {}, {}, {}, {}, {}, {"no graph"}, true};
  const auto csv = report_csv({ok, partial, failed});
  EXPECT_EQ(csv,
            "learner,shd,free_parameters,edges,bic,loglik,identified,matches,status,notes\n"
            "js,1,20,3,-10.5,-4,2,1,ok,1 edges rejected for cycles\n"
            "lasso,,,9,,,0,0,partial,dbn: budget\n"
            "hc,,,,,,,,failed,no graph\n");
}

TEST(Pipeline, MinimalRunCompletesWithOneRowPerMethod) {
  const auto dir = scratch("minimal");
  write_synthetic(dir);
  const auto cfg = small_config(dir);
  const auto res = run_pipeline(cfg);
  for (const auto& s : res.manifest.stages) EXPECT_EQ(s.status, "ok") << s.name << ": " << s.error;
  EXPECT_TRUE(res.manifest.complete());
  ASSERT_EQ(res.report.size(), known_methods().size() + 1);
  for (std::size_t i = 0; i < known_methods().size(); ++i) EXPECT_EQ(res.report[i].learner, known_methods()[i]);
  EXPECT_EQ(res.report.back().learner, "average");
  for (const auto& r : res.report) {
    ASSERT_TRUE(r.bic && r.loglik && r.identified && r.matches && r.shd && r.edges) << r.learner;
    EXPECT_LE(*r.bic, *r.loglik) << r.learner;
    EXPECT_LE(*r.matches, *r.identified) << r.learner;
    EXPECT_LE(*r.identified, cfg.interventions.size() * cfg.outcomes.size()) << r.learner;
  }
  // The planted chain is strong enough for the regression learners to find.
  const auto lasso = load_graph((dir / "run" / "graphs" / "lasso.edges").string());
  EXPECT_TRUE(lasso.has_edge(lasso.index("X1"), lasso.index("X2")));
  EXPECT_TRUE(lasso.has_edge(lasso.index("X2"), lasso.index("X3")));
  for (const char* f : {"imputed.csv", "impute_report.txt", "discretized.csv", "discretization.map", "diagnostics.txt",
                        "pacf.csv", "report.csv", "policy.csv", "manifest.json", "averaging.csv", "average_cutoffs.csv",
                        "graphs/lasso.edges", "graphs/lasso.dbn.edges", "graphs/pc.edges", "graphs/average.edges"})
    EXPECT_TRUE(fs::exists(dir / "run" / f)) << f;
  // Manifest hashes describe the files on disk.
  const auto m = RunManifest::load((dir / "run" / "manifest.json").string());
  EXPECT_EQ(m.config, cfg.to_text());
  EXPECT_EQ(m.inputs.size(), 2u);
  for (const auto& f : m.outputs) EXPECT_EQ(sha256_hex(slurp(dir / "run" / f.path)), f.sha256) << f.path;
}

TEST(Pipeline, UnknownMethodFailsBeforeAnyWork) {
  const auto dir = scratch("unknown");
  write_synthetic(dir);
  EXPECT_THROW(validate_config("[input]\ndata = data.csv\n[run]\nmethods = lasso, gs\n"), ValidationError);
  auto cfg = small_config(dir);
  cfg.methods = {"lasso", "gs"};
  EXPECT_THROW(run_pipeline(cfg), ValidationError);
  EXPECT_FALSE(fs::exists(dir / "run"));
}

TEST(Pipeline, SameManifestGivesIdenticalFiles) {
  const auto dir = scratch("determinism");
  write_synthetic(dir);
  auto cfg = small_config(dir);
  const auto first = run_pipeline(cfg);
  const auto manifest = (dir / "run" / "manifest.json").string();
  const auto again = rerun_from_manifest(manifest, (dir / "rerun").string(), true);
  for (const char* f : {"report.csv", "policy.csv", "graphs/hc.edges", "graphs/js.edges", "graphs/average.edges"})
    EXPECT_EQ(slurp(dir / "run" / f), slurp(dir / "rerun" / f)) << f;
  // Sequential execution gives the same bytes as concurrent execution.
  cfg.parallel = false;
  cfg.out_dir = (dir / "serial").string();
  run_pipeline(cfg);
  EXPECT_EQ(slurp(dir / "run" / "report.csv"), slurp(dir / "serial" / "report.csv"));
  EXPECT_EQ(slurp(dir / "run" / "policy.csv"), slurp(dir / "serial" / "policy.csv"));
  // A changed input is refused.
  std::ofstream(dir / "data.csv", std::ios::app) << "161,0,0,0\n";
  EXPECT_THROW(rerun_from_manifest(manifest, (dir / "rerun2").string(), true), DataError);
}

TEST(Pipeline, VerifyDetectsTamperedManifest) {
  const auto dir = scratch("tamper");
  write_synthetic(dir);
  auto cfg = small_config(dir);
  cfg.methods = {"js", "lasso"};
  cfg.policy = false;
  cfg.diagnose = false;
  run_pipeline(cfg);
  const auto path = dir / "run" / "manifest.json";
  auto j = nlohmann::json::parse(slurp(path));
  for (auto& f : j["outputs"])
    if (f["path"] == "report.csv") f["sha256"] = std::string(64, '0');
  write_file(path.string(), j.dump());
  EXPECT_THROW(rerun_from_manifest(path.string(), (dir / "again").string(), true), DataError);
  EXPECT_NO_THROW(rerun_from_manifest(path.string(), (dir / "again2").string(), false));
}

TEST(Pipeline, FailuresHaltDependentsOnly) {
  const auto dir = scratch("partial");
  write_synthetic(dir, 60);
  auto cfg = small_config(dir);
  cfg.methods = {"lasso", "js", "hc"};
  cfg.p_max = 30;                         // too many lags for 60 rows
  cfg.interventions = {"X1", "missing"};  // policy cannot run
  const auto res = run_pipeline(cfg);
  EXPECT_FALSE(res.manifest.complete());
  EXPECT_EQ(stage(res.manifest, "diagnose").status, "failed");
  EXPECT_EQ(stage(res.manifest, "diagnose").exit_code, 2);
  for (const char* s : {"learn.lasso", "learn.js", "learn.hc", "average", "evaluate.js", "evaluate.hc"})
    EXPECT_EQ(stage(res.manifest, s).status, "ok") << s;
  for (const char* s : {"policy.js", "policy.hc", "policy.average"}) {
    EXPECT_EQ(stage(res.manifest, s).status, "failed") << s;
    EXPECT_NE(stage(res.manifest, s).error.find("missing"), std::string::npos);
  }
  const auto& js = row(res, "js");
  EXPECT_TRUE(js.bic.has_value());
  EXPECT_FALSE(js.identified.has_value());
  EXPECT_FALSE(fs::exists(dir / "run" / "diagnostics.txt"));
  EXPECT_TRUE(fs::exists(dir / "run" / "report.csv"));
  const auto m = RunManifest::load((dir / "run" / "manifest.json").string());
  EXPECT_FALSE(nlohmann::json::parse(slurp(dir / "run" / "manifest.json"))["complete"].get<bool>());
  EXPECT_EQ(m.stages.size(), res.manifest.stages.size());
}

TEST(Pipeline, BudgetFailureKeepsRowWithNote) {
  const auto dir = scratch("budget");
  write_synthetic(dir);
  auto cfg = small_config(dir);
  cfg.methods = {"js", "hc"};
  cfg.average = false;
  cfg.cell_budget = 2;  // no node with a parent fits
  const auto res = run_pipeline(cfg);
  const auto& js = row(res, "js");
  EXPECT_FALSE(js.failed);
  EXPECT_TRUE(js.edges.has_value());
  EXPECT_FALSE(js.bic.has_value());
  ASSERT_FALSE(js.notes.empty());
  EXPECT_NE(js.notes.front().find("budget"), std::string::npos);
  EXPECT_EQ(stage(res.manifest, "average").status, "skipped");
}

TEST(Pipeline, ExternalGraphsAndKnowledge) {
  const auto dir = scratch("external");
  write_synthetic(dir);
  auto cfg = small_config(dir);
  cfg.methods = {"js"};
  cfg.external["truth"] = (dir / "truth.edges").string();
  cfg.external["wrong"] = (dir / "wrong.edges").string();
  write_file(cfg.external["wrong"], "X3 -> X1\n");
  cfg.average_learners = {"js", "truth", "wrong"};
  const auto res = run_pipeline(cfg);
  EXPECT_EQ(*row(res, "truth").shd, 0u);
  // Missing both true edges and adding one.
  EXPECT_EQ(*row(res, "wrong").shd, 3u);
  EXPECT_EQ(stage(res.manifest, "average").status, "ok");
  EXPECT_EQ(res.report.size(), 4u);
  // A graph naming an unknown variable fails to load, without stopping js.
  cfg.external["bad"] = (dir / "bad.edges").string();
  write_file(cfg.external["bad"], "X1 -> Q\n");
  cfg.average_learners = {"js", "truth"};
  cfg.out_dir = (dir / "run2").string();
  const auto res2 = run_pipeline(cfg);
  EXPECT_EQ(stage(res2.manifest, "load.bad").status, "failed");
  EXPECT_TRUE(row(res2, "bad").failed);
  EXPECT_FALSE(row(res2, "js").failed);
}

TEST(Pipeline, UnreadableDataStopsWithManifest) {
  const auto dir = scratch("ragged");
  write_file((dir / "data.csv").string(), "t,a,b\n1,2\n");
  auto cfg = resolve_paths(validate_config("[input]\ndata = data.csv\n"), dir);
  EXPECT_THROW(run_pipeline(cfg), DataError);
  const auto m = RunManifest::load((dir / "run" / "manifest.json").string());
  ASSERT_EQ(m.stages.size(), 1u);
  EXPECT_EQ(m.stages[0].status, "failed");
  EXPECT_FALSE(m.complete());
}

TEST(PolicyCsv, HeaderAndLearnerColumn) {
  PolicyReport rep;
  rep.rows.push_back({"a", "b", false, false, {}});
  const auto csv = policy_csv({{"js", rep}}, 7, 100);
  EXPECT_EQ(csv,
            "# seed = 7, samples = 100\n"
            "learner,intervention,outcome,identified,ace,standard_error,p_state1,p_state2,p_state3,matches\n"
            "js,a,b,0,,,,,,0\n");
  EXPECT_EQ(policy_csv({}, 7, 100),
            "# seed = 7, samples = 100\n"
            "learner,intervention,outcome,identified,ace,standard_error,p_state1,p_state2,p_state3,matches\n");
}
