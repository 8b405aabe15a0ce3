#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace tsdbn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct OlsResult {
  Vector coefficients;
  Vector residuals;
  Vector fitted;
  double rss = 0.0;
  double r_squared = 0.0;  // centered
};

// Least squares via column-pivoted QR. Throws NumericError naming the columns
// that fall outside the numerical rank.
inline OlsResult ols(const Matrix& x, const Vector& y, double rank_tol = 1e-10) {
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(rank_tol);
  if (qr.rank() < x.cols()) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < x.cols(); ++i) {
      if (!cols.empty()) cols += ", ";
      cols += std::to_string(perm(i));
    }
    throw NumericError("rank-deficient design (rank " + std::to_string(qr.rank()) + " of " +
                       std::to_string(x.cols()) + "); collinear column(s): " + cols);
  }
  OlsResult r;
  r.coefficients = qr.solve(y);
  r.fitted = x * r.coefficients;
  r.residuals = y - r.fitted;
  r.rss = r.residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  r.r_squared = tss > 0.0 ? 1.0 - r.rss / tss : 0.0;
  return r;
}

inline Matrix with_intercept(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

}  // namespace tsdbn
