#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "../graph/dag.hpp"
#include "../linalg.hpp"
#include "two_slice.hpp"

namespace tsdbn {

// Gaussian extended BIC. For a node regressed on parents P (with intercept):
//   LL - (d/2) log n - gamma d log m,   d = |P| + 2,
// with m the number of nodes. Local scores come from the MLE covariance and
// are cached per (node, parent set).
class GaussScore {
 public:
  GaussScore(const NumericData& data, double gamma = 0.5) : n_(data.n()), m_(data.m()), gamma_(gamma) {
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be >= 0");
    if (n_ < 2) throw DataError("score needs at least 2 rows");
    if (!data.values.allFinite()) throw DataError("data contains missing or non-finite values");
    const Matrix centered = data.values.rowwise() - data.values.colwise().mean();
    cov_ = centered.transpose() * centered / static_cast<double>(n_);
    for (std::size_t j = 0; j < m_; ++j) {
      const auto c = static_cast<Eigen::Index>(j);
      if (!(cov_(c, c) > 1e-24 * (1.0 + data.values.col(c).squaredNorm() / static_cast<double>(n_))))
        throw DataError("score: column '" + data.names[j] + "' is constant");
    }
  }

  std::size_t nodes() const { return m_; }
  std::size_t rows() const { return n_; }
  double gamma() const { return gamma_; }
  std::size_t cache_size() const { return cache_.size(); }

  // `parents` must be sorted and exclude `node`.
  double local(std::size_t node, const std::vector<std::size_t>& parents) const {
    auto key = std::make_pair(node, parents);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double s = compute(node, parents);
    cache_.emplace(std::move(key), s);
    return s;
  }

  double total(const Dag& g) const {
    double s = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) s += local(v, g.parents(v));
    return s;
  }

  // Uncached evaluation, used to check the cache.
  double compute(std::size_t node, const std::vector<std::size_t>& parents) const {
    if (std::find(parents.begin(), parents.end(), node) != parents.end())
      throw ValidationError("parent set contains the node itself");
    const double dn = static_cast<double>(n_);
    const auto q = static_cast<Eigen::Index>(parents.size());
    const auto v = static_cast<Eigen::Index>(node);
    double var = cov_(v, v);
    if (q > 0) {
      Matrix spp(q, q);
      Vector spn(q);
      for (Eigen::Index a = 0; a < q; ++a) {
        spn(a) = cov_(static_cast<Eigen::Index>(parents[static_cast<std::size_t>(a)]), v);
        for (Eigen::Index b = 0; b < q; ++b)
          spp(a, b) = cov_(static_cast<Eigen::Index>(parents[static_cast<std::size_t>(a)]),
                           static_cast<Eigen::Index>(parents[static_cast<std::size_t>(b)]));
      }
      Eigen::LDLT<Matrix> ldlt(spp);
      const auto dv = ldlt.vectorD();
      if (ldlt.info() != Eigen::Success || !(dv.minCoeff() > 1e-12 * std::max(1.0, dv.maxCoeff())))
        return -std::numeric_limits<double>::infinity();
      var -= spn.dot(ldlt.solve(spn));
    }
    if (!(var > 1e-14 * std::max(1e-300, cov_(v, v)))) return -std::numeric_limits<double>::infinity();
    const double ll = -0.5 * dn * (std::log(2.0 * M_PI * var) + 1.0);
    const double d = static_cast<double>(q) + 2.0;
    return ll - 0.5 * d * std::log(dn) - gamma_ * d * std::log(static_cast<double>(std::max<std::size_t>(m_, 1)));
  }

 private:
  std::size_t n_, m_;
  double gamma_;
  Matrix cov_;
  mutable std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> cache_;
};

}  // namespace tsdbn
