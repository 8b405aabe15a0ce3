#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../linalg.hpp"

namespace tsdbn {

enum class LarsMode { lasso, lar };

inline const char* to_string(LarsMode m) { return m == LarsMode::lasso ? "lasso" : "lar"; }

struct LarsBreakpoint {
  Vector coefficients;               // original predictor scale
  std::vector<std::size_t> active;   // in order of entry
  double l1_norm = 0.0;              // |coefficients|_1
  double max_correlation = 0.0;      // max |X_n' r| on the normalized scale
  Vector correlations;               // X_n' r for every predictor
};

struct LarsPath {
  LarsMode mode = LarsMode::lasso;
  std::vector<LarsBreakpoint> breakpoints;
  Vector x_mean;
  double y_mean = 0.0;

  double max_l1() const {
    double m = 0.0;
    for (const auto& b : breakpoints) m = std::max(m, b.l1_norm);
    return m;
  }

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Vector& beta) const {
    return y_mean + (x - x_mean.transpose()).dot(beta.transpose());
  }
};

struct LarsOptions {
  bool center = true;
  bool normalize = true;
  // Constant columns are skipped (coefficient fixed at zero) instead of
  // rejected.
  bool skip_constant = false;
  double tol = 1e-12;
};

// Least angle regression path with the optional LASSO modification: in lasso
// mode a coefficient that reaches zero leaves the active set.
inline LarsPath lars_path(const Matrix& x, const Vector& y, LarsMode mode, const LarsOptions& opt = {}) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (y.size() != n) throw ValidationError("lars: X and y row counts differ");
  if (n < 2 || p < 1) throw ValidationError("lars: empty design");
  if (!x.allFinite() || !y.allFinite()) throw DataError("lars: missing or non-finite values");

  LarsPath path;
  path.mode = mode;
  path.x_mean = opt.center ? Vector(x.colwise().mean().transpose()) : Vector::Zero(p);
  path.y_mean = opt.center ? y.mean() : 0.0;
  Matrix xn = x.rowwise() - path.x_mean.transpose();
  const Vector yc = y.array() - path.y_mean;
  Vector norms = Vector::Ones(p);
  std::vector<char> usable(static_cast<std::size_t>(p), 1);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double nj = xn.col(j).norm();
    if (!(nj > 1e-10 * std::sqrt(static_cast<double>(n)))) {
      if (!opt.skip_constant) throw DataError("lars: predictor column " + std::to_string(j) + " is constant");
      usable[static_cast<std::size_t>(j)] = 0;
      xn.col(j).setZero();
      continue;
    }
    if (opt.normalize) {
      norms(j) = nj;
      xn.col(j) /= nj;
    }
  }

  Vector beta = Vector::Zero(p);  // normalized scale
  Vector mu = Vector::Zero(n);
  std::vector<std::size_t> active;
  std::vector<char> in_active(static_cast<std::size_t>(p), 0);
  std::vector<std::size_t> just_dropped;
  const std::size_t max_active =
      std::min<std::size_t>(static_cast<std::size_t>(std::count(usable.begin(), usable.end(), 1)),
                            static_cast<std::size_t>(opt.center ? n - 1 : n));

  auto record = [&](const Vector& c) {
    LarsBreakpoint b;
    b.coefficients = beta.cwiseQuotient(norms);
    b.active = active;
    b.l1_norm = b.coefficients.lpNorm<1>();
    b.correlations = c;
    double m = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (usable[static_cast<std::size_t>(j)]) m = std::max(m, std::fabs(c(j)));
    b.max_correlation = m;
    path.breakpoints.push_back(std::move(b));
  };

  Vector c = xn.transpose() * (yc - mu);
  record(c);
  const double c0 = path.breakpoints.front().max_correlation;
  if (!(c0 > opt.tol)) return path;

  // First entrants: every predictor tied for the largest correlation.
  std::vector<std::size_t> entering;
  for (Eigen::Index j = 0; j < p; ++j)
    if (usable[static_cast<std::size_t>(j)] && std::fabs(c(j)) >= c0 * (1.0 - 1e-12))
      entering.push_back(static_cast<std::size_t>(j));

  const std::size_t max_steps = 8 * std::max<std::size_t>(1, max_active) + 8;
  for (std::size_t step = 0; step < max_steps; ++step) {
    for (auto j : entering) {
      if (active.size() >= max_active) break;
      active.push_back(j);
      in_active[j] = 1;
    }
    entering.clear();
    if (active.empty()) break;

    const auto na = static_cast<Eigen::Index>(active.size());
    Matrix xa(n, na);
    Vector s(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      xa.col(a) = xn.col(static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)]));
      s(a) = c(static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)])) >= 0 ? 1.0 : -1.0;
    }
    const Matrix gram = xa.transpose() * xa;
    Eigen::LDLT<Matrix> ldlt(gram);
    const auto dv = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || dv.minCoeff() <= 1e-11 * std::max(1.0, dv.maxCoeff())) {
      std::string cols;
      for (auto j : active) cols += (cols.empty() ? "" : ", ") + std::to_string(j);
      throw NumericError("lars: singular active-set Gram matrix; active columns: " + cols);
    }
    const Vector g_inv_s = ldlt.solve(s);
    const double aa = 1.0 / std::sqrt(s.dot(g_inv_s));
    const Vector w = aa * g_inv_s;
    const Vector u = xa * w;
    const Vector acorr = xn.transpose() * u;

    double big_c = 0.0;
    for (auto j : active) big_c = std::max(big_c, std::fabs(c(static_cast<Eigen::Index>(j))));

    // Step to the next entry (or to the full least-squares fit). A variable
    // dropped at the previous breakpoint sits exactly at the entry boundary,
    // so its zero-length re-entry step is ignored.
    const double full_step = big_c / aa;
    double gamma = full_step;
    bool reached_full = true;
    if (active.size() < max_active) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (!usable[ju] || in_active[ju]) continue;
        const bool dropped = std::find(just_dropped.begin(), just_dropped.end(), ju) != just_dropped.end();
        const double floor = dropped ? 1e-9 * full_step : opt.tol;
        for (double cand : {(big_c - c(j)) / (aa - acorr(j)), (big_c + c(j)) / (aa + acorr(j))}) {
          if (cand > floor && cand < gamma * (1.0 - 1e-12)) {
            gamma = cand;
            reached_full = false;
          }
        }
      }
    }

    // LASSO modification: first active coefficient to hit zero.
    std::optional<Eigen::Index> drop;
    if (path.mode == LarsMode::lasso) {
      for (Eigen::Index a = 0; a < na; ++a) {
        const auto j = static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)]);
        if (w(a) == 0.0) continue;
        const double g = -beta(j) / w(a);
        if (g > opt.tol && g < gamma) {
          gamma = g;
          drop = a;
        }
      }
    }

    for (Eigen::Index a = 0; a < na; ++a) beta(static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)])) += gamma * w(a);
    mu += gamma * u;
    c = xn.transpose() * (yc - mu);
    just_dropped.clear();

    if (drop) {
      const auto j = active[static_cast<std::size_t>(*drop)];
      beta(static_cast<Eigen::Index>(j)) = 0.0;
      active.erase(active.begin() + *drop);
      in_active[j] = 0;
      just_dropped.push_back(j);
      record(c);
      continue;
    }
    if (!reached_full) {
      double new_c = 0.0;
      for (auto j : active) new_c = std::max(new_c, std::fabs(c(static_cast<Eigen::Index>(j))));
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (usable[ju] && !in_active[ju] && std::fabs(std::fabs(c(j)) - new_c) <= 1e-9 * std::max(1.0, c0))
          entering.push_back(ju);
      }
    }
    record(c);
    if (reached_full) break;
    if (path.breakpoints.back().max_correlation <= opt.tol * std::max(1.0, c0)) break;
  }
  return path;
}

// Coefficients whose l1 norm is s times the largest l1 norm on the path,
// interpolated linearly between the bracketing breakpoints.
inline Vector interpolate_fraction(const LarsPath& path, double s) {
  if (path.breakpoints.empty()) throw ValidationError("interpolate_fraction: empty path");
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("interpolate_fraction: fraction must lie in [0, 1]");
  const double target = s * path.max_l1();
  const auto& bps = path.breakpoints;
  if (target <= bps.front().l1_norm) return bps.front().coefficients;
  for (std::size_t k = 1; k < bps.size(); ++k) {
    if (bps[k].l1_norm >= target) {
      const double lo = bps[k - 1].l1_norm, hi = bps[k].l1_norm;
      const double t = hi > lo ? (target - lo) / (hi - lo) : 1.0;
      return (1.0 - t) * bps[k - 1].coefficients + t * bps[k].coefficients;
    }
  }
  return bps.back().coefficients;
}

}  // namespace tsdbn
