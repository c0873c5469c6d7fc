#pragma once

// Small statistics helpers: sample moments and a one-sided Welch t-test
// (unequal variances) used to score training improvement.

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctsim {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty set");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
  double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

// One-sided Welch t-test p-value for the hypothesis mean(a) > mean(b).
// Smaller p means stronger evidence that a's mean exceeds b's.
inline double welch_p_value_greater(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  double ma = mean(a), mb = mean(b);
  double va = sample_variance(a), vb = sample_variance(b);
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double se2 = va / na + vb / nb;
  if (se2 <= 0) return ma > mb ? 0.0 : 1.0;  // degenerate: zero variance
  double t = (ma - mb) / std::sqrt(se2);
  double dof = se2 * se2 /
               (va * va / (na * na * (na - 1)) + vb * vb / (nb * nb * (nb - 1)));
  boost::math::students_t dist(dof);
  return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace ctsim
