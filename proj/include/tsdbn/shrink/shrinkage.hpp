#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../linalg.hpp"

namespace tsdbn {

// Sample correlations plus the per-entry variance estimates the analytic
// shrinkage intensity needs. Computed once so that intensities for column
// subsets cost O(m^2).
struct CorrelationMoments {
  Matrix correlation;
  Matrix entry_variance;  // Var-hat(r_ij)
  std::size_t n = 0;

  static CorrelationMoments of(const Matrix& data) {
    const auto n = data.rows();
    const auto k = data.cols();
    if (n < 3) throw DataError("shrinkage correlation needs at least 3 rows");
    Matrix xs = data.rowwise() - data.colwise().mean();
    for (Eigen::Index j = 0; j < k; ++j) {
      const double sd = std::sqrt(xs.col(j).squaredNorm() / static_cast<double>(n - 1));
      if (!(sd > 1e-12 * (1.0 + data.col(j).cwiseAbs().maxCoeff())))
        throw DataError("shrinkage correlation: column " + std::to_string(j) + " is constant");
      xs.col(j) /= sd;
    }
    const double dn = static_cast<double>(n);
    CorrelationMoments m;
    m.n = static_cast<std::size_t>(n);
    m.correlation = xs.transpose() * xs / (dn - 1.0);
    // sum_k (w_kij - wbar_ij)^2 = sum_k w_kij^2 - n wbar_ij^2 with w_kij = x_ki x_kj.
    const Matrix sq = xs.array().square().matrix();
    const Matrix sum_w2 = sq.transpose() * sq;
    const Matrix wbar = xs.transpose() * xs / dn;
    m.entry_variance = (sum_w2 - dn * wbar.cwiseProduct(wbar)) * (dn / std::pow(dn - 1.0, 3));
    m.correlation.diagonal().setOnes();
    return m;
  }
};

struct ShrunkCorrelation {
  Matrix matrix;
  double lambda = 0.0;
  std::size_t n = 0;
};

// R* = (1 - lambda) R + lambda I with lambda = sum Var(r_ij) / sum r_ij^2 over
// off-diagonal entries, clamped to [0, 1].
inline ShrunkCorrelation shrink_correlation(const CorrelationMoments& m, const std::vector<std::size_t>& columns,
                                            std::optional<double> forced_lambda = std::nullopt) {
  const auto q = static_cast<Eigen::Index>(columns.size());
  Matrix r(q, q);
  double num = 0.0, den = 0.0;
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b < q; ++b) {
      const auto i = static_cast<Eigen::Index>(columns[static_cast<std::size_t>(a)]);
      const auto j = static_cast<Eigen::Index>(columns[static_cast<std::size_t>(b)]);
      r(a, b) = m.correlation(i, j);
      if (a != b) {
        num += m.entry_variance(i, j);
        den += m.correlation(i, j) * m.correlation(i, j);
      }
    }
  ShrunkCorrelation out;
  out.n = m.n;
  out.lambda = forced_lambda ? *forced_lambda : (den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0);
  out.matrix = (1.0 - out.lambda) * r;
  out.matrix.diagonal().setOnes();
  return out;
}

inline ShrunkCorrelation shrink_correlation(const Matrix& data, std::optional<double> forced_lambda = std::nullopt) {
  const auto m = CorrelationMoments::of(data);
  std::vector<std::size_t> all(static_cast<std::size_t>(data.cols()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return shrink_correlation(m, all, forced_lambda);
}

// pcor_ij = -P_ij / sqrt(P_ii P_jj) with P the inverse of R*; unit diagonal.
inline Matrix partial_correlations(const Matrix& r) {
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) throw NumericError("partial correlations: matrix is not positive definite");
  const Matrix p = llt.solve(Matrix::Identity(r.rows(), r.cols()));
  Matrix out(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      out(i, j) = i == j ? 1.0 : std::clamp(-p(i, j) / std::sqrt(p(i, i) * p(j, j)), -1.0, 1.0);
  return out;
}

inline Matrix partial_correlations(const ShrunkCorrelation& s) { return partial_correlations(s.matrix); }

}  // namespace tsdbn
