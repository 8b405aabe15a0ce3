#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "../data/dataset.hpp"
#include "../data/transform.hpp"
#include "../error.hpp"
#include "../graph/dag.hpp"
#include "lars.hpp"

namespace tsdbn {

struct LarsConfig {
  LarsMode mode = LarsMode::lasso;
  std::size_t folds = 10;
  std::size_t grid_points = 101;  // equispaced fractions in [0, 1]
  double threshold = 0.0;         // |coefficient| > threshold becomes an edge

  std::vector<double> grid() const {
    std::vector<double> g(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
      g[i] = grid_points > 1 ? static_cast<double>(i) / static_cast<double>(grid_points - 1) : 1.0;
    return g;
  }

  void validate() const {
    if (folds < 2) throw ValidationError("lars: folds must be >= 2");
    if (grid_points < 1) throw ValidationError("lars: fraction grid is empty");
    if (!(threshold >= 0.0)) throw ValidationError("lars: threshold must be >= 0");
  }
};

struct CvResult {
  double best_fraction = 0.0;
  std::vector<double> fractions;
  std::vector<double> mean_squared_error;
};

// K-fold cross-validation over the fraction grid with contiguous time blocks
// as folds; the smallest fraction attaining the minimum mean error wins.
inline CvResult cv_select_fraction(const Matrix& x, const Vector& y, const LarsConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < cfg.folds) throw DataError("cross-validation needs at least as many rows as folds");
  CvResult res;
  res.fractions = cfg.grid();
  res.mean_squared_error.assign(res.fractions.size(), 0.0);
  LarsOptions opt;
  opt.skip_constant = true;
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    const std::size_t lo = f * n / cfg.folds, hi = (f + 1) * n / cfg.folds;
    const std::size_t n_test = hi - lo, n_train = n - n_test;
    if (n_test == 0 || n_train < 2) throw DataError("degenerate cross-validation fold " + std::to_string(f));
    Matrix xtr(static_cast<Eigen::Index>(n_train), x.cols());
    Vector ytr(static_cast<Eigen::Index>(n_train));
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      xtr.row(r) = x.row(static_cast<Eigen::Index>(i));
      ytr(r++) = y(static_cast<Eigen::Index>(i));
    }
    const auto path = lars_path(xtr, ytr, cfg.mode, opt);
    for (std::size_t g = 0; g < res.fractions.size(); ++g) {
      const Vector beta = interpolate_fraction(path, res.fractions[g]);
      double sse = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double e = y(static_cast<Eigen::Index>(i)) - path.predict(x.row(static_cast<Eigen::Index>(i)), beta);
        sse += e * e;
      }
      res.mean_squared_error[g] += sse / static_cast<double>(n_test) / static_cast<double>(cfg.folds);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < res.fractions.size(); ++g)
    if (res.mean_squared_error[g] < res.mean_squared_error[best]) best = g;
  res.best_fraction = res.fractions[best];
  return res;
}

struct TargetFailure {
  std::string target;
  std::string error;
};

struct LarsStructure {
  Dag graph;
  Matrix coefficients;  // (target j, lagged predictor i), self-coefficients included
  std::vector<double> fractions;
  std::vector<TargetFailure> failures;
  std::size_t rejected_for_cycles = 0;
};

struct CoefficientGraph {
  Dag graph;
  std::size_t rejected_for_cycles = 0;
};

// Edges i -> j for |coefficients(j, i)| > threshold, i != j, tried through the
// cycle guard in descending magnitude (ties by target, then predictor).
inline CoefficientGraph coefficient_graph(const Matrix& coefficients, const std::vector<std::string>& names,
                                          double threshold) {
  const std::size_t k = names.size();
  if (static_cast<std::size_t>(coefficients.rows()) != k || static_cast<std::size_t>(coefficients.cols()) != k)
    throw ValidationError("coefficient matrix does not match the variable list");
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;  // (|beta|, target, predictor)
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      const double b = std::fabs(coefficients(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      if (i != j && b > threshold && b > 0.0) candidates.emplace_back(b, j, i);
    }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  CoefficientGraph out{Dag(names), 0};
  for (const auto& [b, j, i] : candidates)
    if (!out.graph.try_add(i, j)) ++out.rejected_for_cycles;
  return out;
}

// Per-column min-max scaling followed by a lag-1 design.
inline LaggedDesign scaled_lag1_design(const Dataset& d) {
  Dataset scaled = d;
  for (auto& c : scaled.columns) c = minmax_scale(c);
  return build_lagged(scaled, 1);
}

// Neighbourhood selection: regress each X_j(t) on every X_i(t-1) (the target's
// own lag included) with the fraction picked by cross-validation. Coefficients
// above the threshold become edges i -> j, tried in descending magnitude
// through the acyclicity guard; self-coefficients never become edges.
inline LarsStructure learn_structure(const LaggedDesign& d, const LarsConfig& cfg) {
  cfg.validate();
  if (d.order != 1) throw ValidationError("lars learner expects a lag-1 design");
  const std::size_t k = d.k();
  LarsStructure out;
  out.coefficients = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  out.fractions.assign(k, 0.0);
  LarsOptions opt;
  opt.skip_constant = true;
  for (std::size_t j = 0; j < k; ++j) {
    try {
      const Vector y = d.targets.col(static_cast<Eigen::Index>(j));
      const auto cv = cv_select_fraction(d.predictors, y, cfg);
      const auto path = lars_path(d.predictors, y, cfg.mode, opt);
      out.coefficients.row(static_cast<Eigen::Index>(j)) = interpolate_fraction(path, cv.best_fraction).transpose();
      out.fractions[j] = cv.best_fraction;
    } catch (const Error& e) {
      out.failures.push_back({d.variables[j], e.what()});
    }
  }
  const auto g = coefficient_graph(out.coefficients, d.variables, cfg.threshold);
  out.graph = g.graph;
  out.rejected_for_cycles = g.rejected_for_cycles;
  return out;
}

}  // namespace tsdbn
