#pragma once

// Leader outer loop: position PID producing a desired acceleration, then the
// small-angle linearization mapping horizontal acceleration to tilt angles.

#include "ctsim/dynamics.hpp"
#include "ctsim/types.hpp"

#include <algorithm>
#include <utility>

namespace ctsim {

struct PidGains {
  Vec3 kp = Vec3(0.5, 0.5, 0.5);  // 1/s^2
  Vec3 kd = Vec3(1.0, 1.0, 1.0);  // 1/s
  Vec3 ki = Vec3::Zero();         // 1/s^3
  double integral_limit = 2.0;    // m s, componentwise anti-windup clamp
};

struct PidState {
  Vec3 integral = Vec3::Zero();  // m s
  double prev_time = 0.0;        // s
};

// accel_d = kp e + kd e_dot + ki * integral, with the integral advanced by
// e * dt first and clamped componentwise.
inline std::pair<Vec3, PidState> pid_desired_accel(const Vec3& e,
                                                   const Vec3& e_dot,
                                                   const PidState& pid,
                                                   const PidGains& gains,
                                                   double dt) {
  PidState next = pid;
  next.integral += e * dt;
  next.integral = next.integral.cwiseMax(-gains.integral_limit)
                      .cwiseMin(gains.integral_limit);
  next.prev_time += dt;
  Vec3 accel = gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(e_dot) +
               gains.ki.cwiseProduct(next.integral);
  return {accel, next};
}

// Small-angle inversion of horizontal acceleration into tilt angles:
//   phi_d   = (ax sin(psi_d) - ay cos(psi_d)) / g
//   theta_d = (ax cos(psi_d) + ay sin(psi_d)) / g
inline std::pair<double, double> accel_to_attitude(const Vec3& accel_d,
                                                   double psi_d,
                                                   const ActionBounds& bounds = {},
                                                   double gravity = kGravity) {
  double s = std::sin(psi_d), c = std::cos(psi_d);
  double phi_d = (accel_d.x() * s - accel_d.y() * c) / gravity;
  double theta_d = (accel_d.x() * c + accel_d.y() * s) / gravity;
  phi_d = std::clamp(phi_d, -bounds.tilt_max, bounds.tilt_max);
  theta_d = std::clamp(theta_d, -bounds.tilt_max, bounds.tilt_max);
  return {phi_d, theta_d};
}

// Which position error feeds the leader PID: the object center (normal
// operation) or the leader drone itself (test-stand configuration).
enum class LeaderError { object, leader_position };

// Full leader policy: position error -> PID -> tilt linearization. Returns
// the action and the advanced PID state so the caller decides whether to
// commit the integrator (preview vs. actual step).
inline std::pair<ControlAction, PidState> leader_action(
    const SystemState& state, const Vec3& goal, const PidState& pid,
    const PidGains& gains, double dt, const ObjectParams& obj = {},
    LeaderError mode = LeaderError::object, const ActionBounds& bounds = {},
    double gravity = kGravity) {
  Vec3 e, e_dot;
  if (mode == LeaderError::leader_position) {
    e = goal - drone_position(state, obj.attach_leader);
    e_dot = -drone_velocity(state, obj.attach_leader);
  } else {
    e = goal - state.p_o;
    e_dot = -state.v_o;
  }
  auto [accel, next_pid] = pid_desired_accel(e, e_dot, pid, gains, dt);

  ControlAction action;
  action.psi_d = 0.0;
  std::tie(action.phi_d, action.theta_d) =
      accel_to_attitude(accel, action.psi_d, bounds, gravity);
  action.az_d = std::clamp(accel.z(), -bounds.az_max, bounds.az_max);
  return {action, next_pid};
}

}  // namespace ctsim
