#pragma once

// Shared helpers for the test suite: default parameter sets, hover thrust,
// and small utilities the oracles reuse.

#include "ctsim/dynamics.hpp"
#include "ctsim/rng.hpp"
#include "ctsim/types.hpp"

#include <gtest/gtest.h>

namespace ctsim::test {

inline SystemParams default_params() { return SystemParams{}; }

// Per-rotor force that exactly balances gravity when applied to all eight
// rotors (four per drone).
inline double hover_rotor_force(const SystemParams& p) {
  double total_mass = p.leader.mass + p.follower.mass + p.object.mass;
  return total_mass * p.gravity / 8.0;
}

inline Vec4 constant_rotors(double f) { return Vec4::Constant(f); }

inline CgTrajectory centered_cg() {
  CgTrajectory traj;
  traj.amplitude = 0.0;
  return traj;
}

// Random state in the small-angle regime with moderate rates.
inline SystemState random_state(Rng& rng) {
  SystemState s;
  for (int i = 0; i < 3; ++i) {
    s.p_o[i] = uniform(rng, -2.0, 2.0);
    s.v_o[i] = uniform(rng, -1.5, 1.5);
    s.eta[i] = uniform(rng, -0.4, 0.4);
    s.omega[i] = uniform(rng, -1.0, 1.0);
  }
  s.t = uniform(rng, 0.0, 20.0);
  return s;
}

inline Vec4 random_rotors(Rng& rng, const DroneParams& d) {
  Vec4 f;
  for (int i = 0; i < 4; ++i)
    f[i] = uniform(rng, d.rotor_force_limits[0], d.rotor_force_limits[1]);
  return f;
}

}  // namespace ctsim::test
