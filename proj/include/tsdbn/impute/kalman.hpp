#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../data/dataset.hpp"
#include "../error.hpp"
#include "nelder_mead.hpp"

namespace tsdbn {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Local linear trend: level_{t+1} = level_t + slope_t + eta, slope_{t+1} =
// slope_t + zeta, y_t = level_t + eps.
struct StateSpaceModel {
  double level_variance = 0.0;
  double slope_variance = 0.0;
  double observation_variance = 0.0;
  Vec2 initial_mean = Vec2::Zero();
  Mat2 initial_covariance = Mat2::Identity();

  static Mat2 transition() {
    Mat2 t;
    t << 1.0, 1.0, 0.0, 1.0;
    return t;
  }

  Mat2 state_noise() const {
    Mat2 q = Mat2::Zero();
    q(0, 0) = level_variance;
    q(1, 1) = slope_variance;
    return q;
  }

  bool finite() const {
    return std::isfinite(level_variance) && std::isfinite(slope_variance) && std::isfinite(observation_variance) &&
           initial_mean.allFinite() && initial_covariance.allFinite();
  }

  void validate() const {
    if (!finite()) throw NumericError("state-space model has non-finite parameters");
    if (level_variance < 0 || slope_variance < 0 || observation_variance < 0)
      throw NumericError("state-space model has negative variance");
  }
};

struct KalmanRun {
  std::vector<Vec2> filtered_means;
  std::vector<Mat2> filtered_covariances;
  std::vector<double> predictions;  // one-step-ahead prediction of y_t
  double log_likelihood = 0.0;
};

// Observations contribute to the likelihood only after the first two
// observed points; those two pin down the diffuse level and slope.
inline KalmanRun kalman_filter(const std::vector<std::optional<double>>& y, const StateSpaceModel& m,
                               std::size_t diffuse_points = 2) {
  m.validate();
  const Mat2 t = StateSpaceModel::transition();
  const Mat2 q = m.state_noise();
  const double h = m.observation_variance;
  Vec2 a = m.initial_mean;
  Mat2 p = m.initial_covariance;
  KalmanRun run;
  run.filtered_means.reserve(y.size());
  run.filtered_covariances.reserve(y.size());
  run.predictions.reserve(y.size());
  std::size_t observed = 0;
  constexpr double log_two_pi = 1.8378770664093453;
  for (const auto& obs : y) {
    run.predictions.push_back(a(0));
    if (obs) {
      const double f = p(0, 0) + h;
      if (!(f > 0.0)) throw NumericError("Kalman filter: non-positive innovation variance");
      const double v = *obs - a(0);
      const Vec2 k = p.col(0) / f;
      a += k * v;
      // Joseph form keeps the covariance symmetric positive semidefinite.
      Mat2 ikz = Mat2::Identity();
      ikz.col(0) -= k;
      p = ikz * p * ikz.transpose() + (k * k.transpose()) * h;
      p = 0.5 * (p + p.transpose());
      if (observed >= diffuse_points) run.log_likelihood += -0.5 * (log_two_pi + std::log(f) + v * v / f);
      ++observed;
    }
    run.filtered_means.push_back(a);
    run.filtered_covariances.push_back(p);
    a = t * a;
    p = t * p * t.transpose() + q;
  }
  return run;
}

namespace detail {

inline double observed_variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
}

}  // namespace detail

struct StateSpaceFitOptions {
  double min_log_ratio = std::log(1e-10);  // variances bounded relative to the sample variance
  double max_log_ratio = std::log(1e2);
  int max_iterations = 5000;
};

inline StateSpaceModel model_with_variances(const std::vector<std::optional<double>>& y, double level, double slope,
                                            double obs) {
  StateSpaceModel m;
  m.level_variance = level;
  m.slope_variance = slope;
  m.observation_variance = obs;
  const auto first = std::find_if(y.begin(), y.end(), [](const auto& v) { return v.has_value(); });
  double scale = 1.0;
  std::vector<double> vals;
  for (const auto& v : y)
    if (v) vals.push_back(*v);
  if (!vals.empty()) {
    const double var = detail::observed_variance(vals);
    const double mag = std::fabs(vals.front());
    scale = std::max({var, 1e-8 * (1.0 + mag * mag), 1e-12});
  }
  m.initial_mean = Vec2(first != y.end() ? **first : 0.0, 0.0);
  m.initial_covariance = Mat2::Identity() * (1e7 * scale);
  return m;
}

// Maximum-likelihood variances by Nelder-Mead on bounded log-variance ratios.
// The simplex starts at the reference point where all three variances equal
// the sample variance, so the fit is never worse than that reference.
inline StateSpaceModel fit_state_space(const Series& s, const StateSpaceFitOptions& opt = {}) {
  const auto vals = s.present();
  if (vals.empty()) throw DataError("column '" + s.name + "': all values missing");
  if (vals.size() < 10)
    throw DataError("column '" + s.name + "': state-space fit needs >= 10 observed values, got " +
                    std::to_string(vals.size()));
  const double var = detail::observed_variance(vals);
  const double mag = std::fabs(vals.front());
  const double scale = std::max({var, 1e-8 * (1.0 + mag * mag), 1e-12});

  auto model_at = [&](const std::vector<double>& theta) {
    std::array<double, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) v[i] = scale * std::exp(std::clamp(theta[i], opt.min_log_ratio, opt.max_log_ratio));
    return model_with_variances(s.values, v[0], v[1], v[2]);
  };
  auto objective = [&](const std::vector<double>& theta) {
    const double ll = kalman_filter(s.values, model_at(theta)).log_likelihood;
    return std::isfinite(ll) ? -ll : 1e300;
  };

  NelderMeadOptions nm;
  nm.initial_step = -3.0;
  nm.max_iterations = opt.max_iterations;
  auto res = nelder_mead(objective, {0.0, 0.0, 0.0}, nm);
  if (!res.converged)
    throw NumericError("column '" + s.name + "': variance optimizer did not converge after " +
                       std::to_string(res.iterations) + " iterations");
  // One restart around the optimum guards against a collapsed simplex.
  nm.initial_step = 1.0;
  auto again = nelder_mead(objective, res.x, nm);
  if (again.converged && again.value <= res.value) res = again;
  return model_at(res.x);
}

// Observed cells pass through; each missing cell gets the filter's one-step
// prediction (the update step is skipped there). Leading gaps are predicted
// from the initial state prior, i.e. the first observed value.
inline Series kalman_impute(const Series& s, const StateSpaceModel& m) {
  if (!m.finite()) throw NumericError("column '" + s.name + "': non-finite state-space parameters");
  if (s.missing_count() == 0) return s;
  const auto run = kalman_filter(s.values, m);
  Series out = s;
  for (std::size_t t = 0; t < out.values.size(); ++t)
    if (!out.values[t] && std::isfinite(run.predictions[t])) out.values[t] = run.predictions[t];
  return out;
}

}  // namespace tsdbn
