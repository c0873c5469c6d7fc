#pragma once

// Seeded RNG helpers. Everything downstream draws from a single mt19937_64
// stream so runs are reproducible and checkpoints can capture the exact
// generator state via the standard stream operators.

#include "ctsim/types.hpp"

#include <random>
#include <sstream>
#include <string>

namespace ctsim {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) {
  // std::normal_distribution carries hidden state (it caches a spare draw),
  // which breaks state capture; Box-Muller from explicit uniforms does not.
  double u1 = std::uniform_real_distribution<double>(
      std::numeric_limits<double>::min(), 1.0)(rng);
  double u2 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline VecX gaussian_vec(Rng& rng, int n) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(rng);
  return v;
}

inline MatX gaussian_mat(Rng& rng, int rows, int cols) {
  MatX m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = gaussian(rng);
  return m;
}

inline std::string rng_state_string(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline void rng_set_state(Rng& rng, const std::string& s) {
  std::istringstream is(s);
  is >> rng;
}

}  // namespace ctsim
