#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "../data/transform.hpp"
#include "../error.hpp"
#include "../graph/dag.hpp"
#include "../stats.hpp"
#include "shrinkage.hpp"

namespace tsdbn {

struct EdgeTest {
  std::size_t from = 0;  // lagged variable i (t-1)
  std::size_t to = 0;    // contemporaneous variable j (t)
  double pcor = 0.0;
  double t = 0.0;
  double p_value = 1.0;
  double probability = 0.0;  // posterior non-null probability
  double log_lfdr = 0.0;     // log(1 - probability), kept for resolution near 1
};

struct MixtureFit {
  double eta0 = 1.0;    // null proportion
  double kappa = 0.0;   // null shape: pcor * sqrt(kappa - 1) / sqrt(1 - pcor^2) ~ t(kappa - 1)
  std::size_t iterations = 0;
};

struct EdgeTestTable {
  std::vector<std::string> variables;
  double df = 0.0;
  double lambda = 0.0;
  MixtureFit mixture;
  std::vector<EdgeTest> tests;  // row-major over (from, to), self pairs included

  const EdgeTest& at(std::size_t from, std::size_t to) const { return tests[from * variables.size() + to]; }
};

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Null density of a correlation coefficient with shape kappa (the density of
// r when r sqrt(kappa - 1) / sqrt(1 - r^2) is t with kappa - 1 df).
inline double log_null_pcor_density(double r, double kappa) {
  return 0.5 * (kappa - 3.0) * std::log1p(-r * r) -
         (std::lgamma(0.5) + std::lgamma(0.5 * (kappa - 1.0)) - std::lgamma(0.5 * kappa));
}

struct MixtureRun {
  MixtureFit fit;
  double log_likelihood = 0.0;
};

inline MixtureRun run_mixture_em(const std::vector<double>& rs, double kappa0, double kappa_max) {
  MixtureRun run;
  auto& fit = run.fit;
  fit.kappa = kappa0;
  fit.eta0 = 0.9;
  const double log_f1 = -std::log(2.0);
  std::vector<double> w(rs.size());
  for (std::size_t it = 0; it < 500; ++it) {
    fit.iterations = it + 1;
    const double le0 = std::log(fit.eta0), le1 = std::log1p(-fit.eta0);
    double sw = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double l0 = le0 + log_null_pcor_density(rs[i], fit.kappa);
      w[i] = std::exp(l0 - log_add(l0, le1 + log_f1));
      sw += w[i];
    }
    const double eta0 = std::clamp(sw / static_cast<double>(rs.size()), 1e-6, 1.0 - 1e-9);
    const auto neg_ll = [&](double log_kappa) {
      const double kappa = std::exp(log_kappa);
      double s = 0.0;
      for (std::size_t i = 0; i < rs.size(); ++i) s += w[i] * log_null_pcor_density(rs[i], kappa);
      return -s;
    };
    const double kappa =
        std::exp(boost::math::tools::brent_find_minima(neg_ll, std::log(2.0), std::log(kappa_max), 40).first);
    const bool done = std::fabs(eta0 - fit.eta0) < 1e-10 && std::fabs(kappa - fit.kappa) < 1e-8 * fit.kappa;
    fit.eta0 = eta0;
    fit.kappa = kappa;
    if (done) break;
  }
  const double le0 = std::log(fit.eta0), le1 = std::log1p(-fit.eta0) + log_f1;
  for (double r : rs) run.log_likelihood += log_add(le0 + log_null_pcor_density(r, fit.kappa), le1);
  return run;
}

// Two-component mixture on partial correlations: null with free kappa,
// alternative uniform on [-1, 1]. EM is started from a moment estimate of
// kappa and from a median-based one (robust when a few large statistics
// dominate the second moment); the better likelihood wins.
inline MixtureFit fit_null_mixture(const std::vector<double>& rs) {
  MixtureFit fit;
  if (rs.empty()) return fit;
  std::vector<double> sq;
  for (double r : rs) sq.push_back(r * r);
  const double m2 = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
  constexpr double kappa_max = 1e7;
  if (!(m2 > 0.0)) {
    fit.kappa = kappa_max;
    return fit;
  }
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(sq.size() / 2), sq.end());
  const double med = sq[sq.size() / 2];
  // Median of r^2 under the null is about 0.455 / kappa (chi-square(1) median).
  const double k_moment = std::clamp(1.0 / m2, 2.0, kappa_max);
  const double k_median = med > 0.0 ? std::clamp(0.455 / med, 2.0, kappa_max) : kappa_max;
  auto best = run_mixture_em(rs, k_moment, kappa_max);
  const auto alt = run_mixture_em(rs, k_median, kappa_max);
  if (alt.log_likelihood > best.log_likelihood) best = alt;
  return best.fit;
}

inline double log_lfdr(const MixtureFit& fit, double r) {
  if (!(fit.kappa > 0.0)) return 0.0;
  if (!(std::fabs(r) < 1.0)) return -std::numeric_limits<double>::infinity();
  const double l0 = std::log(fit.eta0) + log_null_pcor_density(r, fit.kappa);
  const double l1 = std::log1p(-fit.eta0) - std::log(2.0);
  return std::min(0.0, l0 - log_add(l0, l1));
}

}  // namespace detail

// Shrinkage partial correlations on the stacked [X(t-1), X(t)] matrix, read
// off for every (lagged i, current j) pair, with Student t p-values and
// mixture posterior probabilities. The mixture is fitted on the non-self
// pairs only; self pairs get values from the same fit.
inline EdgeTestTable dynamic_edge_tests(const LaggedDesign& d) {
  if (d.order != 1) throw ValidationError("dynamic edge tests expect a lag-1 design");
  const std::size_t k = d.k();
  const auto n = d.rows();
  const double q = 2.0 * static_cast<double>(k) - 2.0;
  const double df = static_cast<double>(n) - 2.0 - q;
  if (!(df > 0.0))
    throw DataError("dynamic edge tests: " + std::to_string(n) + " rows leave no degrees of freedom for " +
                    std::to_string(k) + " variables");
  Matrix stacked(d.predictors.rows(), static_cast<Eigen::Index>(2 * k));
  stacked.leftCols(static_cast<Eigen::Index>(k)) = d.predictors;
  stacked.rightCols(static_cast<Eigen::Index>(k)) = d.targets;
  const auto shrunk = shrink_correlation(stacked);
  const Matrix pc = partial_correlations(shrunk);

  EdgeTestTable out;
  out.variables = d.variables;
  out.df = df;
  out.lambda = shrunk.lambda;
  out.tests.resize(k * k);
  std::vector<double> off;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      auto& e = out.tests[i * k + j];
      e.from = i;
      e.to = j;
      e.pcor = pc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k + j));
      const double r2 = e.pcor * e.pcor;
      e.t = r2 < 1.0 ? e.pcor * std::sqrt(df / (1.0 - r2)) : std::copysign(std::numeric_limits<double>::infinity(), e.pcor);
      e.p_value = stats::student_t_two_sided(e.t, df);
      if (i != j) off.push_back(e.pcor);
    }
  out.mixture = detail::fit_null_mixture(off);
  for (auto& e : out.tests) {
    e.log_lfdr = detail::log_lfdr(out.mixture, e.pcor);
    e.probability = -std::expm1(e.log_lfdr);
  }
  return out;
}

enum class JsSelect { probability, pvalue };

struct JsStructure {
  Dag graph;
  EdgeTestTable table;
  std::size_t retained = 0;
  std::size_t rejected_for_cycles = 0;
};

// Retains pairs with probability >= 1 - cutoff (or p < cutoff) and orients
// them lagged -> current. Stronger evidence goes through the cycle guard
// first.
inline JsStructure js_structure(const EdgeTestTable& table, double cutoff, JsSelect select = JsSelect::probability) {
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw ValidationError("js: cutoff must lie in [0, 1]");
  JsStructure out;
  out.table = table;
  out.graph = Dag(table.variables);
  std::vector<const EdgeTest*> keep;
  const double log_cut = cutoff > 0.0 ? std::log(cutoff) : -std::numeric_limits<double>::infinity();
  for (const auto& e : table.tests) {
    if (e.from == e.to) continue;
    const bool pass = select == JsSelect::probability ? (cutoff > 0.0 && e.log_lfdr <= log_cut) : e.p_value < cutoff;
    if (pass) keep.push_back(&e);
  }
  std::stable_sort(keep.begin(), keep.end(), [&](const EdgeTest* a, const EdgeTest* b) {
    const double ka = select == JsSelect::probability ? a->log_lfdr : a->p_value;
    const double kb = select == JsSelect::probability ? b->log_lfdr : b->p_value;
    if (ka != kb) return ka < kb;
    if (std::fabs(a->pcor) != std::fabs(b->pcor)) return std::fabs(a->pcor) > std::fabs(b->pcor);
    return std::make_pair(a->from, a->to) < std::make_pair(b->from, b->to);
  });
  out.retained = keep.size();
  for (const auto* e : keep)
    if (!out.graph.try_add(e->from, e->to)) ++out.rejected_for_cycles;
  return out;
}

inline JsStructure js_structure(const LaggedDesign& d, double cutoff = 0.05, JsSelect select = JsSelect::probability) {
  return js_structure(dynamic_edge_tests(d), cutoff, select);
}

}  // namespace tsdbn
