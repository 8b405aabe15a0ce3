#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "../error.hpp"
#include "../linalg.hpp"
#include "../stats.hpp"
#include "var.hpp"

namespace tsdbn {

struct DiagnosticResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  double skewness = 0.0;   // Jarque-Bera only
  double kurtosis = 0.0;   // raw, not excess
  double r_squared = 0.0;  // Breusch-Godfrey auxiliary regression
};

// JB = n/6 (S^2 + (K - 3)^2 / 4) with population moments; chi-square, 2 df.
inline DiagnosticResult jarque_bera(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) throw DataError("Jarque-Bera needs at least 8 observations");
  const double dn = static_cast<double>(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / dn;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  if (!(m2 > 1e-300)) throw NumericError("Jarque-Bera: zero-variance sample");
  DiagnosticResult r;
  r.n = n;
  r.skewness = m3 / std::pow(m2, 1.5);
  r.kurtosis = m4 / (m2 * m2);
  r.statistic = dn / 6.0 * (r.skewness * r.skewness + 0.25 * (r.kurtosis - 3.0) * (r.kurtosis - 3.0));
  r.df = 2;
  r.p_value = stats::chi_square_sf(r.statistic, 2.0);
  return r;
}

// Auxiliary regression of u_t on the original regressors and u_{t-1..t-lags}
// (pre-sample lags set to zero); LM = T * R^2, chi-square with `lags` df.
// `regressors` must already contain the intercept column if the model had one.
inline DiagnosticResult breusch_godfrey(const Vector& residuals, const Matrix& regressors, std::size_t lags = 1) {
  const auto n = residuals.size();
  if (regressors.rows() != n) throw ValidationError("Breusch-Godfrey: residuals and regressors are not aligned");
  if (lags < 1) throw ValidationError("Breusch-Godfrey: lags must be >= 1");
  Matrix aux(n, regressors.cols() + static_cast<Eigen::Index>(lags));
  aux.leftCols(regressors.cols()) = regressors;
  for (std::size_t l = 1; l <= lags; ++l) {
    auto col = aux.col(regressors.cols() + static_cast<Eigen::Index>(l - 1));
    for (Eigen::Index t = 0; t < n; ++t) col(t) = t >= static_cast<Eigen::Index>(l) ? residuals(t - static_cast<Eigen::Index>(l)) : 0.0;
  }
  OlsResult fit;
  try {
    fit = ols(aux, residuals);
  } catch (const NumericError& e) {
    throw NumericError(std::string("Breusch-Godfrey auxiliary regression failed: ") + e.what());
  }
  const double ss = residuals.squaredNorm();
  if (!(ss > 0)) throw NumericError("Breusch-Godfrey: zero residuals");
  DiagnosticResult r;
  r.n = static_cast<std::size_t>(n);
  r.r_squared = fit.fitted.squaredNorm() / ss;
  r.statistic = static_cast<double>(n) * r.r_squared;
  r.df = static_cast<double>(lags);
  r.p_value = stats::chi_square_sf(r.statistic, r.df);
  return r;
}

inline DiagnosticResult breusch_godfrey(const VarFit& fit, const LaggedDesign& design, std::size_t equation,
                                        std::size_t lags = 1) {
  return breusch_godfrey(fit.residuals.col(static_cast<Eigen::Index>(equation)), with_intercept(design.predictors),
                         lags);
}

// Sample autocorrelations r_0..r_max_lag (biased autocovariance).
inline std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw DataError("autocorrelation of a constant series");
  std::vector<double> r(max_lag + 1);
  for (std::size_t l = 0; l <= max_lag; ++l) {
    double c = 0.0;
    for (std::size_t t = l; t < n; ++t) c += (x[t] - mean) * (x[t - l] - mean);
    r[l] = c / c0;
  }
  return r;
}

// Partial autocorrelations at lags 1..max_lag by Durbin-Levinson.
inline std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
  if (max_lag < 1) throw ValidationError("pacf: max_lag must be >= 1");
  if (x.size() <= max_lag + 1) throw DataError("pacf: series too short for requested lags");
  const auto r = acf(x, max_lag);
  std::vector<double> out(max_lag);
  std::vector<double> phi(max_lag + 1, 0.0), prev(max_lag + 1, 0.0);
  for (std::size_t l = 1; l <= max_lag; ++l) {
    double num = r[l], den = 1.0;
    for (std::size_t j = 1; j < l; ++j) {
      num -= prev[j] * r[l - j];
      den -= prev[j] * r[j];
    }
    const double pll = den != 0.0 ? std::clamp(num / den, -1.0, 1.0) : 0.0;
    phi[l] = pll;
    for (std::size_t j = 1; j < l; ++j) phi[j] = prev[j] - pll * prev[l - j];
    out[l - 1] = pll;
    prev = phi;
  }
  return out;
}

}  // namespace tsdbn
