#pragma once

// Per-drone inner loop: PD attitude controller plus the exact 4x4 rotor mixer.
// Torque requests are pre-scaled to the mixer's feasible polytope so that in
// closed loop the mixer never has to clamp.

#include "ctsim/dynamics.hpp"
#include "ctsim/types.hpp"

#include <algorithm>
#include <cmath>

namespace ctsim {

struct AttitudeGains {
  // Stiff inner loop: wn ~ 12.25 rad/s, zeta ~ 0.707 per axis once scaled by
  // the effective inertia. Soft gains cannot reject the CG gravity moment
  // tightly enough for sub-half-meter station keeping.
  Vec3 kp = Vec3(150.0, 150.0, 150.0);  // 1/s^2
  Vec3 kd = Vec3(17.32, 17.32, 17.32);  // 1/s
};

struct RotorCommand {
  Vec4 forces = Vec4::Zero();  // N, order F1..F4
  bool feasible = true;        // false when clamping moved any force > 1e-6 N
};

struct ThrustTorque {
  double thrust = 0.0;      // N, along body Z
  Vec3 torque = Vec3::Zero();  // N m, body frame
  bool saturated = false;   // torque was scaled down to stay mixer-feasible
};

// PD attitude law. mass_share is the vertical load this drone carries (its
// own mass plus its share of the payload); eff_inertia is the inertia the
// torque request is scaled by (the drone's share of the composite inertia
// when flying attached).
inline ThrustTorque attitude_control(const SystemState& state,
                                     const ControlAction& action,
                                     const DroneParams& params,
                                     double mass_share,
                                     const Mat3& eff_inertia,
                                     const AttitudeGains& gains = {},
                                     double gravity = kGravity) {
  ThrustTorque out;
  const double f_min = params.rotor_force_limits[0];
  const double f_max = params.rotor_force_limits[1];

  double thrust = mass_share * (gravity + action.az_d);
  out.thrust = std::clamp(thrust, 4 * f_min, 4 * f_max);

  Vec3 eta_d(action.phi_d, action.theta_d, action.psi_d);
  Vec3 accel_d = gains.kp.cwiseProduct(eta_d - state.eta) -
                 gains.kd.cwiseProduct(state.omega);
  Vec3 torque = eff_inertia * accel_d;

  // Scale the torque so every rotor stays inside its force limits given the
  // thrust request (uniform scaling keeps the torque direction).
  const double headroom =
      std::min(f_max - out.thrust / 4, out.thrust / 4 - f_min);
  const double b = std::abs(torque.x()) / params.arm_length;
  const double c = std::abs(torque.y()) / params.arm_length;
  const double d = std::abs(torque.z()) / params.rotor_moment_coeff;
  const double deviation = d / 4 + std::max(b, c) / 2;
  if (deviation > headroom) {
    torque *= (headroom > 0 ? headroom / deviation : 0.0);
    out.saturated = true;
  }
  out.torque = torque;
  return out;
}

// Wrench produced by four rotor forces (the forward map the mixer inverts).
inline Vec4 rotor_wrench(const Vec4& f, const DroneParams& params) {
  Vec3 tau = rotor_torque(f, params);
  return Vec4(f.sum(), tau.x(), tau.y(), tau.z());
}

// Exact inverse of {sum, L(F2-F4), L(F3-F1), c_M(F1-F2+F3-F4)}, then clamped.
inline RotorCommand mix(double total_thrust, const Vec3& torques,
                        const DroneParams& params) {
  const double a = total_thrust;
  const double b = torques.x() / params.arm_length;
  const double c = torques.y() / params.arm_length;
  const double d = torques.z() / params.rotor_moment_coeff;

  Vec4 f((a + d) / 4 - c / 2, (a - d) / 4 + b / 2, (a + d) / 4 + c / 2,
         (a - d) / 4 - b / 2);

  RotorCommand cmd;
  for (int i = 0; i < 4; ++i) {
    double clamped = std::clamp(f[i], params.rotor_force_limits[0],
                                params.rotor_force_limits[1]);
    if (std::abs(clamped - f[i]) > 1e-6) cmd.feasible = false;
    cmd.forces[i] = clamped;
  }
  return cmd;
}

}  // namespace ctsim
