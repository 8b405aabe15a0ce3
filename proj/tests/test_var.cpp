#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tsdbn/data/transform.hpp"
#include "tsdbn/rng.hpp"
#include "tsdbn/stats.hpp"
#include "tsdbn/var/diagnostics.hpp"
#include "tsdbn/var/var.hpp"

using namespace tsdbn;

namespace {

Matrix simulate(const Matrix& a, double noise, std::size_t n, Rng& rng) {
  const auto k = a.rows();
  Matrix out(static_cast<Eigen::Index>(n), k);
  Vector x = Vector::Zero(k);
  for (std::size_t t = 0; t < n + 100; ++t) {
    Vector e(k);
    for (Eigen::Index j = 0; j < k; ++j) e(j) = noise * rng.normal();
    x = a * x + e;
    if (t >= 100) out.row(static_cast<Eigen::Index>(t - 100)) = x.transpose();
  }
  return out;
}

std::vector<std::string> names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

std::vector<double> normals(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Last Yule-Walker coefficient of order l from an explicit Toeplitz solve.
double yule_walker_last(const std::vector<double>& r, std::size_t l) {
  Matrix t(l, l);
  Vector rhs(l);
  for (std::size_t i = 0; i < l; ++i) {
    rhs(i) = r[i + 1];
    for (std::size_t j = 0; j < l; ++j) t(i, j) = r[i > j ? i - j : j - i];
  }
  return t.fullPivLu().solve(rhs)(l - 1);
}

}  // namespace

TEST(Stats, ChiSquareAndStudentTails) {
  EXPECT_NEAR(stats::chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(stats::chi_square_sf(5.991464547107979, 2), 0.05, 1e-12);
  EXPECT_NEAR(stats::chi_square_sf(2.0, 2), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(stats::student_t_two_sided(2.228138851986274, 10), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(stats::chi_square_sf(0.0, 3), 1.0);
}

TEST(FitVar, RecoversKnownCoefficients) {
  Rng rng(1);
  Matrix a(2, 2);
  a << 0.5, -0.3, 0.2, 0.7;
  const Matrix data = simulate(a, 0.01, 1000, rng);
  const auto fit = fit_var(build_lagged(data, names(2), 1));
  ASSERT_EQ(fit.lag_matrices.size(), 1u);
  EXPECT_LT((fit.lag_matrices[0] - a).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_EQ(fit.residuals.rows(), 999);
  EXPECT_EQ(fit.n_used, 999u);
}

TEST(FitVar, WhiteNoiseCoefficientsWithinThreeSe) {
  Rng rng(12);
  const std::size_t k = 3, p = 2, n = 400;
  Matrix data(n, k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) data(r, c) = rng.normal();
  const auto d = build_lagged(data, names(k), p);
  const auto fit = fit_var(d);
  const Matrix x = with_intercept(d.predictors);
  const Matrix xtx_inv = (x.transpose() * x).inverse();
  const double dof = static_cast<double>(d.rows() - x.cols());
  int inside = 0, total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double s2 = fit.residuals.col(j).squaredNorm() / dof;
    for (std::size_t l = 0; l < p; ++l)
      for (std::size_t i = 0; i < k; ++i) {
        const auto col = 1 + l * k + i;
        const double se = std::sqrt(s2 * xtx_inv(col, col));
        inside += std::fabs(fit.lag_matrices[l](j, i)) < 3 * se;
        ++total;
      }
  }
  EXPECT_GE(inside, static_cast<int>(std::ceil(0.95 * total)));
}

TEST(FitVar, ResidualsOrthogonalToRegressors) {
  Rng rng(3);
  Matrix a(3, 3);
  a << 0.4, 0.1, 0, 0, 0.5, 0.2, 0.1, 0, 0.3;
  const Matrix data = simulate(a, 1.0, 300, rng);
  const auto d = build_lagged(data, names(3), 2);
  const auto fit = fit_var(d);
  const Matrix x = with_intercept(d.predictors);
  const double scale = data.cwiseAbs().maxCoeff();
  EXPECT_LT((x.transpose() * fit.residuals).cwiseAbs().maxCoeff(), 1e-8 * d.rows() * scale * scale);
}

TEST(FitVar, DuplicatedColumnIsRankError) {
  Rng rng(4);
  Matrix data(50, 3);
  for (Eigen::Index r = 0; r < 50; ++r) data(r, 0) = data(r, 2) = rng.normal(), data(r, 1) = rng.normal();
  try {
    fit_var(build_lagged(data, {"a", "b", "a_copy"}, 1));
    FAIL();
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_TRUE(msg.find("a@t-1") != std::string::npos || msg.find("a_copy@t-1") != std::string::npos) << msg;
  }
  EXPECT_THROW(fit_var(build_lagged(Matrix::Random(4, 3), names(3), 1)), DataError);
}

TEST(SelectOrder, MatchesPerOrderRefit) {
  Rng rng(5);
  Matrix a(2, 2);
  a << 0.6, 0.2, -0.1, 0.5;
  const Matrix data = simulate(a, 1.0, 200, rng);
  const std::size_t p_max = 4;
  const auto table = select_order(data, p_max);
  ASSERT_EQ(table.rows.size(), p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    // Same common sample: drop the first p_max - p rows before lagging by p.
    const Matrix slice = data.bottomRows(data.rows() - static_cast<Eigen::Index>(p_max - p));
    const auto fit = fit_var(build_lagged(slice, names(2), p));
    const double n = static_cast<double>(fit.n_used);
    const double logdet = std::log(fit.residual_covariance().determinant());
    const double ll = -0.5 * n * (2 * std::log(2 * M_PI) + logdet + 2);
    const double kpar = 2.0 * (2.0 * p + 1);
    const auto& row = table.rows[p - 1];
    EXPECT_NEAR(row.log_likelihood, ll, 1e-6);
    EXPECT_NEAR(row.aic, -2 * ll + 2 * kpar, 1e-6);
    EXPECT_NEAR(row.sc, -2 * ll + kpar * std::log(n), 1e-6);
    EXPECT_NEAR(row.hq, -2 * ll + 2 * kpar * std::log(std::log(n)), 1e-6);
    EXPECT_NEAR(row.log_fpe, std::log(std::exp(logdet) / n * (n + p + 1) / (n - p - 1)), 1e-9);
    EXPECT_GE(row.sc, row.aic);
  }
  auto argmin = [&](auto member) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p_max; ++i)
      if (table.rows[i].*member < table.rows[best].*member) best = i;
    return best + 1;
  };
  EXPECT_EQ(table.aic_order, argmin(&OrderCriteria::aic));
  EXPECT_EQ(table.sc_order, argmin(&OrderCriteria::sc));
  EXPECT_EQ(table.hq_order, argmin(&OrderCriteria::hq));
  EXPECT_EQ(table.fpe_order, argmin(&OrderCriteria::log_fpe));
}

TEST(SelectOrder, StrongLagOneSignalPicksOrderOne) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Matrix a(3, 3);
    a << 0.8, 0, 0, 0.3, 0.7, 0, 0, -0.3, 0.6;
    const auto table = select_order(simulate(a, 1.0, 400, rng), 5);
    EXPECT_EQ(table.sc_order, 1u) << seed;
  }
}

TEST(SelectOrder, InsufficientRows) {
  EXPECT_THROW(select_order(Matrix::Random(10, 3), 4), DataError);
  EXPECT_THROW(select_order(Matrix::Random(10, 3), 0), ValidationError);
}

TEST(JarqueBera, TwoPointAnchor) {
  for (std::size_t n : {8u, 20u, 1000u}) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = i % 2 ? 1.0 : -1.0;
    const auto r = jarque_bera(x);
    EXPECT_NEAR(r.skewness, 0.0, 1e-14);
    EXPECT_NEAR(r.kurtosis, 1.0, 1e-14);
    EXPECT_NEAR(r.statistic, static_cast<double>(n) / 6.0, 1e-10);
    EXPECT_EQ(r.df, 2.0);
    EXPECT_NEAR(r.p_value, std::exp(-r.statistic / 2), 1e-12);
  }
}

TEST(JarqueBera, NormalSamplesRarelyReject) {
  int accepted = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(1000 + s);
    const auto r = jarque_bera(normals(10000, rng));
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    accepted += r.p_value > 0.001;
  }
  EXPECT_GE(accepted, static_cast<int>(0.99 * seeds));
}

TEST(JarqueBera, ExponentialRejects) {
  Rng rng(7);
  std::vector<double> x(1000);
  for (auto& v : x) v = rng.exponential();
  EXPECT_LT(jarque_bera(x).p_value, 0.001);
}

TEST(JarqueBera, Degenerate) {
  EXPECT_THROW(jarque_bera(std::vector<double>(10, 3.0)), NumericError);
  EXPECT_THROW(jarque_bera(std::vector<double>(5, 1.0)), DataError);
}

TEST(BreuschGodfrey, Ar1ResidualsReject) {
  Rng rng(8);
  const Eigen::Index n = 500;
  Vector u(n);
  double prev = 0;
  for (Eigen::Index t = 0; t < n; ++t) u(t) = prev = 0.8 * prev + rng.normal();
  u.array() -= u.mean();
  const Matrix regressors = Matrix::Ones(n, 1);
  EXPECT_LT(breusch_godfrey(u, regressors, 1).p_value, 0.001);
}

TEST(BreuschGodfrey, IidResidualsAcceptAboutNinetyFivePercent) {
  int accepted = 0;
  const int seeds = 400;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(500 + s);
    const Eigen::Index n = 200;
    Matrix x(n, 2);
    Vector y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      x(t, 0) = 1.0;
      x(t, 1) = rng.normal();
      y(t) = 0.5 * x(t, 1) + rng.normal();
    }
    const auto fit = ols(x, y);
    accepted += breusch_godfrey(fit.residuals, x, 1).p_value > 0.05;
  }
  EXPECT_GT(accepted, static_cast<int>(0.91 * seeds));
  EXPECT_LT(accepted, static_cast<int>(0.99 * seeds));
}

TEST(BreuschGodfrey, MatchesNormalEquationOracle) {
  Rng rng(9);
  const Eigen::Index n = 120;
  Matrix x(n, 3);
  Vector y(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    x(t, 0) = 1;
    x(t, 1) = rng.normal();
    x(t, 2) = rng.normal();
    y(t) = x(t, 1) - x(t, 2) + rng.normal() + (t ? 0.3 * y(t - 1) : 0.0);
  }
  const Vector u = ols(x, y).residuals;
  for (std::size_t lags : {1u, 2u, 4u}) {
    Matrix z(n, 3 + static_cast<Eigen::Index>(lags));
    z.leftCols(3) = x;
    for (std::size_t l = 1; l <= lags; ++l)
      for (Eigen::Index t = 0; t < n; ++t) z(t, 2 + static_cast<Eigen::Index>(l)) = t >= static_cast<Eigen::Index>(l) ? u(t - static_cast<Eigen::Index>(l)) : 0.0;
    const Vector b = (z.transpose() * z).ldlt().solve(z.transpose() * u);
    const Vector e = u - z * b;
    const double r2 = 1.0 - e.squaredNorm() / (u.array() - u.mean()).square().sum();
    const auto r = breusch_godfrey(u, x, lags);
    EXPECT_NEAR(r.statistic, static_cast<double>(n) * r2, 1e-8);
    EXPECT_EQ(r.df, static_cast<double>(lags));
    EXPECT_NEAR(r.p_value, stats::chi_square_sf(r.statistic, static_cast<double>(lags)), 1e-14);
  }
}

TEST(BreuschGodfrey, VarEquationOverload) {
  Rng rng(10);
  Matrix a(2, 2);
  a << 0.5, 0.1, 0.0, 0.4;
  const Matrix data = simulate(a, 1.0, 150, rng);
  const auto d = build_lagged(data, names(2), 1);
  const auto fit = fit_var(d);
  const auto r = breusch_godfrey(fit, d, 1, 1);
  EXPECT_NEAR(r.statistic, breusch_godfrey(Vector(fit.residuals.col(1)), with_intercept(d.predictors), 1).statistic,
              1e-12);
  EXPECT_THROW(breusch_godfrey(Vector(Vector::Ones(5)), Matrix::Ones(4, 1), 1), ValidationError);
}

TEST(Pacf, Ar1Profile) {
  Rng rng(11);
  const std::size_t n = 2000;
  std::vector<double> x(n);
  double prev = 0;
  for (auto& v : x) v = prev = 0.9 * prev + rng.normal();
  const auto p = pacf(x, 10);
  EXPECT_NEAR(p[0], 0.9, 0.03);
  const double band = 2.0 / std::sqrt(static_cast<double>(n));
  int inside = 0;
  for (std::size_t l = 1; l < p.size(); ++l) inside += std::fabs(p[l]) < band;
  EXPECT_GE(inside, 8);
}

TEST(Pacf, WhiteNoiseInsideBand) {
  Rng rng(13);
  const std::size_t n = 1000;
  const auto p = pacf(normals(n, rng), 20);
  const double band = 2.0 / std::sqrt(static_cast<double>(n));
  int inside = 0;
  for (double v : p) inside += std::fabs(v) < band;
  EXPECT_GE(inside, 18);
}

TEST(Pacf, MatchesYuleWalkerAndAcfAtLagOne) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(300);
    double a = 0, b = 0;
    for (auto& v : x) {
      const double next = 0.5 * a - 0.3 * b + rng.normal();
      b = a;
      a = next;
      v = next + 0.2 * rng.normal();
    }
    const auto r = acf(x, 8);
    const auto p = pacf(x, 8);
    EXPECT_NEAR(p[0], r[1], 1e-14);
    for (std::size_t l = 1; l <= 8; ++l) {
      EXPECT_NEAR(p[l - 1], yule_walker_last(r, l), 1e-10) << l;
      EXPECT_LE(std::fabs(p[l - 1]), 1.0);
    }
  }
}

TEST(Pacf, Degenerate) {
  EXPECT_THROW(pacf(std::vector<double>(20, 1.0), 3), DataError);
  EXPECT_THROW(pacf(std::vector<double>(4, 1.0), 3), DataError);
}
