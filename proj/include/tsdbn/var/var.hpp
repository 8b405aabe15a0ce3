#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "../data/dataset.hpp"
#include "../data/transform.hpp"
#include "../error.hpp"
#include "../linalg.hpp"

namespace tsdbn {

// Y_t = c + A_1 Y_{t-1} + ... + A_p Y_{t-p} + e_t, each equation by OLS.
// lag_matrices[l](j, i) is the effect of variable i at lag l+1 on variable j.
struct VarFit {
  std::size_t order = 1;
  std::size_t k = 0;
  std::size_t n_used = 0;
  Vector intercept;
  std::vector<Matrix> lag_matrices;
  Matrix residuals;  // n_used x k
  Vector r_squared;

  Matrix residual_covariance() const { return residuals.transpose() * residuals / static_cast<double>(n_used); }
};

inline VarFit fit_var(const LaggedDesign& d) {
  const std::size_t k = d.k(), p = d.order, n = d.rows();
  if (n <= k * p + 1)
    throw DataError("VAR(" + std::to_string(p) + ") with " + std::to_string(k) + " variables needs more than " +
                    std::to_string(k * p + 1) + " rows, got " + std::to_string(n));
  const Matrix x = with_intercept(d.predictors);
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < x.cols(); ++i) {
      if (!cols.empty()) cols += ", ";
      cols += perm(i) == 0 ? std::string("(intercept)") : d.predictor_name(static_cast<std::size_t>(perm(i) - 1));
    }
    throw NumericError("VAR design is rank deficient; collinear column(s): " + cols);
  }
  const Matrix beta = qr.solve(d.targets);  // (1 + kp) x k
  VarFit fit;
  fit.order = p;
  fit.k = k;
  fit.n_used = n;
  fit.intercept = beta.row(0).transpose();
  for (std::size_t l = 0; l < p; ++l)
    fit.lag_matrices.push_back(
        beta.middleRows(static_cast<Eigen::Index>(1 + l * k), static_cast<Eigen::Index>(k)).transpose());
  fit.residuals = d.targets - x * beta;
  fit.r_squared.resize(static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const auto y = d.targets.col(static_cast<Eigen::Index>(j));
    const double tss = (y.array() - y.mean()).square().sum();
    const double rss = fit.residuals.col(static_cast<Eigen::Index>(j)).squaredNorm();
    fit.r_squared(static_cast<Eigen::Index>(j)) = tss > 0 ? 1.0 - rss / tss : 0.0;
  }
  return fit;
}

struct OrderCriteria {
  std::size_t order = 0;
  double log_likelihood = 0.0;  // Gaussian, from the log-determinant of the ML residual covariance
  double log_det_sigma = 0.0;
  std::size_t parameters = 0;   // k (k p + 1)
  std::size_t n = 0;            // common effective sample
  double aic = 0.0;
  double sc = 0.0;
  double hq = 0.0;
  double log_fpe = 0.0;         // FPE itself underflows for many variables
};

struct OrderSelectionTable {
  std::vector<OrderCriteria> rows;
  std::size_t aic_order = 0;
  std::size_t sc_order = 0;
  std::size_t hq_order = 0;
  std::size_t fpe_order = 0;
};

// Fits VAR(1..p_max) on the common sample that starts at row p_max and
// evaluates AIC = -2lnL + 2k, SC = -2lnL + k ln n, HQ = -2lnL + 2k ln ln n and
// FPE = (det S / n)(n + p + 1)/(n - p - 1) for each order.
inline OrderSelectionTable select_order(const Matrix& data, std::size_t p_max) {
  if (p_max < 1) throw ValidationError("p_max must be >= 1");
  const auto n_total = static_cast<std::size_t>(data.rows());
  const auto k = static_cast<std::size_t>(data.cols());
  if (n_total <= p_max) throw DataError("not enough rows for p_max = " + std::to_string(p_max));
  const std::size_t n = n_total - p_max;
  if (n <= k * p_max + 1)
    throw DataError("insufficient rows: VAR(" + std::to_string(p_max) + ") on " + std::to_string(k) +
                    " variables needs more than " + std::to_string(k * p_max + 1) + " effective rows, got " +
                    std::to_string(n));
  const auto rows = static_cast<Eigen::Index>(n);
  const Matrix y = data.bottomRows(rows);
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  constexpr double log_two_pi = 1.8378770664093453;

  OrderSelectionTable table;
  for (std::size_t p = 1; p <= p_max; ++p) {
    Matrix x(rows, static_cast<Eigen::Index>(1 + k * p));
    x.col(0).setOnes();
    for (std::size_t lag = 1; lag <= p; ++lag)
      x.middleCols(static_cast<Eigen::Index>(1 + (lag - 1) * k), static_cast<Eigen::Index>(k)) =
          data.middleRows(static_cast<Eigen::Index>(p_max - lag), rows);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    const Matrix u = y - x * qr.solve(y);
    const Matrix sigma = u.transpose() * u / dn;
    Eigen::LDLT<Matrix> ldlt(sigma);
    double logdet = 0.0;
    const auto dvec = ldlt.vectorD();
    for (Eigen::Index i = 0; i < dvec.size(); ++i)
      logdet += dvec(i) > 0 ? std::log(dvec(i)) : -std::numeric_limits<double>::infinity();

    OrderCriteria c;
    c.order = p;
    c.n = n;
    c.log_det_sigma = logdet;
    c.parameters = k * (k * p + 1);
    c.log_likelihood = -0.5 * dn * (dk * log_two_pi + logdet + dk);
    const double m2ll = -2.0 * c.log_likelihood;
    const double kp = static_cast<double>(c.parameters);
    const double dp = static_cast<double>(p);
    c.aic = m2ll + 2.0 * kp;
    c.sc = m2ll + kp * std::log(dn);
    c.hq = m2ll + 2.0 * kp * std::log(std::log(dn));
    c.log_fpe = logdet - std::log(dn) + std::log(dn + dp + 1.0) - std::log(dn - dp - 1.0);
    table.rows.push_back(c);
  }
  auto argmin = [&](auto member) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      if (table.rows[i].*member < table.rows[best].*member) best = i;
    return table.rows[best].order;
  };
  table.aic_order = argmin(&OrderCriteria::aic);
  table.sc_order = argmin(&OrderCriteria::sc);
  table.hq_order = argmin(&OrderCriteria::hq);
  table.fpe_order = argmin(&OrderCriteria::log_fpe);
  return table;
}

inline OrderSelectionTable select_order(const Dataset& d, std::size_t p_max) {
  if (!d.fully_observed()) throw DataError("order selection needs a fully observed dataset");
  return select_order(numeric_matrix(d), p_max);
}

}  // namespace tsdbn
