#pragma once

// Composite rigid-body dynamics: leader drone + follower drone rigidly
// attached to a rod payload, integrated as a single body with a time-varying
// payload CG. Drone positions are derived from the object pose, never
// integrated. Interaction wrenches are recovered from the per-drone
// force/torque balance after the fact.

#include "ctsim/types.hpp"

#include <cmath>
#include <utility>

namespace ctsim {

// Z-X-Y intrinsic rotation (yaw, then roll, then pitch), body to world.
inline Mat3 rotation_matrix(const Vec3& eta) {
  return (Eigen::AngleAxisd(eta.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(eta.x(), Vec3::UnitX()) *
          Eigen::AngleAxisd(eta.y(), Vec3::UnitY()))
      .toRotationMatrix();
}

inline Vec3 cg_offset_at(double t, const CgTrajectory& traj) {
  return traj.amplitude * std::sin(traj.angular_frequency * t) * traj.axis;
}

// Parallel-axis combination about the object geometric center.
inline std::pair<Mat3, double> composite_inertia(const DroneParams& leader,
                                                 const DroneParams& follower,
                                                 const ObjectParams& obj) {
  Mat3 inertia = obj.inertia;
  double mass = obj.mass;
  auto add = [&](const DroneParams& d, const Vec3& r) {
    inertia += d.inertia +
               d.mass * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
    mass += d.mass;
  };
  add(leader, obj.attach_leader);
  add(follower, obj.attach_follower);
  return {inertia, mass};
}

// Body torque produced by one drone's rotors about its own center:
// (L(F2-F4), L(F3-F1), c_M(F1-F2+F3-F4)).
inline Vec3 rotor_torque(const Vec4& f, const DroneParams& d) {
  return Vec3(d.arm_length * (f[1] - f[3]), d.arm_length * (f[2] - f[0]),
              d.rotor_moment_coeff * (f[0] - f[1] + f[2] - f[3]));
}

struct Accels {
  Vec3 linear = Vec3::Zero();     // object center, world frame
  Vec3 angular = Vec3::Zero();    // body frame
};

struct StepResult {
  SystemState state;
  Accels accels;        // evaluated at the start of the step (exact for the
                        // applied forces; wrench recovery depends on this)
  bool diverged = false;
};

// One RK4 step with rotor forces held constant and the CG law evaluated at
// stage times.
inline StepResult step(const SystemState& state, const Vec4& rotors_l,
                       const Vec4& rotors_f, const SystemParams& params,
                       const CgTrajectory& traj, double dt) {
  StepResult res;
  res.state = state;
  if (!state.finite() || !rotors_l.allFinite() || !rotors_f.allFinite()) {
    res.diverged = true;
    return res;
  }

  auto [inertia, total_mass] =
      composite_inertia(params.leader, params.follower, params.object);
  const Mat3 inertia_inv = inertia.inverse();

  struct Deriv {
    Vec3 dp, dv, deta, domega;
  };
  auto f = [&](const SystemState& s) -> Deriv {
    const Mat3 R = rotation_matrix(s.eta);
    const double thrust_l = rotors_l.sum();
    const double thrust_f = rotors_f.sum();
    Vec3 a = (R * Vec3(0, 0, thrust_l + thrust_f) -
              Vec3(0, 0, total_mass * params.gravity)) /
             total_mass;
    Vec3 torque =
        rotor_torque(rotors_l, params.leader) +
        rotor_torque(rotors_f, params.follower) +
        params.object.attach_leader.cross(Vec3(0, 0, thrust_l)) +
        params.object.attach_follower.cross(Vec3(0, 0, thrust_f)) +
        cg_offset_at(s.t, traj).cross(
            R.transpose() * Vec3(0, 0, -params.object.mass * params.gravity));
    Vec3 omega_dot = inertia_inv * (torque - s.omega.cross(inertia * s.omega));
    Deriv d{s.v_o, a, s.omega, omega_dot};
    if (params.lock_pitch) {
      d.deta.y() = 0.0;
      d.domega.y() = 0.0;
    }
    return d;
  };

  auto advance = [&](const SystemState& s, const Deriv& d, double h) {
    SystemState n = s;
    n.p_o += h * d.dp;
    n.v_o += h * d.dv;
    n.eta += h * d.deta;
    n.omega += h * d.domega;
    n.t += h;
    return n;
  };

  Deriv k1 = f(state);
  Deriv k2 = f(advance(state, k1, dt / 2));
  Deriv k3 = f(advance(state, k2, dt / 2));
  Deriv k4 = f(advance(state, k3, dt));

  SystemState next = state;
  next.p_o += dt / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
  next.v_o += dt / 6 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
  next.eta += dt / 6 * (k1.deta + 2 * k2.deta + 2 * k3.deta + k4.deta);
  next.omega += dt / 6 * (k1.domega + 2 * k2.domega + 2 * k3.domega + k4.domega);
  next.t += dt;

  res.state = next;
  res.accels = {k1.dv, k1.domega};

  double worst = 0.0;
  worst = std::max(worst, next.p_o.cwiseAbs().maxCoeff());
  worst = std::max(worst, next.v_o.cwiseAbs().maxCoeff());
  worst = std::max(worst, next.eta.cwiseAbs().maxCoeff());
  worst = std::max(worst, next.omega.cwiseAbs().maxCoeff());
  res.diverged = !next.finite() || worst > params.divergence_bound;
  return res;
}

// Drone world position/velocity derived from the shared pose.
inline Vec3 drone_position(const SystemState& state, const Vec3& attach) {
  return state.p_o + rotation_matrix(state.eta) * attach;
}

inline Vec3 drone_velocity(const SystemState& state, const Vec3& attach) {
  // Small-angle identification: omega used directly as the world angular rate.
  return state.v_o + state.omega.cross(rotation_matrix(state.eta) * attach);
}

// Contact wrench each drone applies to the object, recovered from the drone's
// own force/torque balance. Force in world frame, torque in body frame.
inline std::pair<Wrench, Wrench> interaction_wrench(const SystemState& state,
                                                    const Accels& accels,
                                                    const Vec4& rotors_l,
                                                    const Vec4& rotors_f,
                                                    const SystemParams& params) {
  const Mat3 R = rotation_matrix(state.eta);
  auto one = [&](const DroneParams& d, const Vec4& rotors, const Vec3& attach) {
    // Rigid constraint: p_ddot_i = p_ddot_o + R(omega_dot x r + omega x (omega x r)).
    Vec3 p_ddot =
        accels.linear + R * (accels.angular.cross(attach) +
                             state.omega.cross(state.omega.cross(attach)));
    Wrench w;
    w.force = R * Vec3(0, 0, rotors.sum()) -
              Vec3(0, 0, d.mass * params.gravity) - d.mass * p_ddot;
    w.torque = rotor_torque(rotors, d) - state.omega.cross(d.inertia * state.omega) -
               d.inertia * accels.angular;
    return w;
  };
  return {one(params.leader, rotors_l, params.object.attach_leader),
          one(params.follower, rotors_f, params.object.attach_follower)};
}

}  // namespace ctsim
