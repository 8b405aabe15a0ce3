#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace tsdbn::stats {

// Upper tail P(X >= x) for a chi-square variable.
inline double chi_square_sf(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  boost::math::chi_squared dist(df);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, x)), 0.0, 1.0);
}

// Two-sided Student t p-value.
inline double student_t_two_sided(double t, double df) {
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

inline double student_t_log_pdf(double t, double df) {
  return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI) -
         (df + 1.0) / 2.0 * std::log1p(t * t / df);
}

}  // namespace tsdbn::stats
