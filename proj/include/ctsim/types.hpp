#pragma once

// Shared types for the cooperative-transport simulator: two quadrotors rigidly
// attached to a rod-shaped payload, simulated as one composite rigid body.

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace ctsim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kGravity = 9.81;  // m/s^2

// Pose and velocity of the composite system. The attitude is shared by the
// payload and both drones (rigid attachment); drone positions are derived
// from p_o, never integrated.
struct SystemState {
  Vec3 p_o = Vec3::Zero();    // object geometric center, world frame, m
  Vec3 v_o = Vec3::Zero();    // m/s
  Vec3 eta = Vec3::Zero();    // roll phi, pitch theta, yaw psi, rad
  Vec3 omega = Vec3::Zero();  // attitude rates (phi_dot, theta_dot, psi_dot), rad/s
  double t = 0.0;             // s

  bool finite() const {
    return p_o.allFinite() && v_o.allFinite() && eta.allFinite() &&
           omega.allFinite() && std::isfinite(t);
  }
};

struct DroneParams {
  double mass = 1.0;                       // kg
  Mat3 inertia = (8e-3 * Vec3(1, 1, 2)).asDiagonal();  // kg m^2, diagonal
  double arm_length = 0.12;                // rotor center to geometric center, m
  double rotor_moment_coeff = 0.02;        // M_i / F_i ratio, m
  std::array<double, 2> rotor_force_limits = {0.0, 8.0};  // N
};

struct ObjectParams {
  double mass = 0.2;   // kg
  Mat3 inertia = rod_inertia(0.2, 0.34);
  double length = 0.34;                    // m
  Vec3 attach_leader = Vec3(0.17, 0, 0);   // body frame, m
  Vec3 attach_follower = Vec3(-0.17, 0, 0);

  // Slender-rod inertia about the geometric center, axis along body X.
  static Mat3 rod_inertia(double m, double len) {
    double i = m * len * len / 12.0;
    return Vec3(0.0, i, i).asDiagonal();
  }
};

// Sinusoidal offset of the payload's center of gravity in the body frame.
struct CgTrajectory {
  double amplitude = 0.068;         // m
  double angular_frequency = 0.31;  // rad/s
  Vec3 axis = Vec3::UnitX();        // body frame, unit norm
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // N, world frame
  Vec3 torque = Vec3::Zero();  // N m, body frame
};

// Commanded (phi_d, theta_d, az_d, psi_d) produced by either controller.
struct ControlAction {
  double phi_d = 0.0;    // rad
  double theta_d = 0.0;  // rad
  double az_d = 0.0;     // desired vertical acceleration, m/s^2
  double psi_d = 0.0;    // rad
};

struct ActionBounds {
  double tilt_max = 0.35;  // rad, applies to phi_d and theta_d
  double az_max = 5.0;     // m/s^2
};

// Everything the dynamics needs about the physical system.
struct SystemParams {
  DroneParams leader;
  DroneParams follower;
  ObjectParams object;
  double gravity = kGravity;
  double divergence_bound = 1e3;  // any |state component| beyond this flags divergence
  bool lock_pitch = false;        // test-stand restriction: theta held at 0
};

}  // namespace ctsim
