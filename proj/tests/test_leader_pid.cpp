// Leader outer-loop PID and the acceleration-to-attitude map.

#include "ctsim/leader_pid.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ctsim {
namespace {

TEST(PidAccel, ZeroErrorGivesZeroAccel) {
  PidState st;
  auto [accel, next] = pid_desired_accel(Vec3::Zero(), Vec3::Zero(), st,
                                         PidGains{}, 0.01);
  EXPECT_EQ(accel.norm(), 0.0);
  EXPECT_EQ(next.integral.norm(), 0.0);
}

TEST(PidAccel, ProportionalTermAlone) {
  PidState st;
  PidGains g;  // kp = 0.5, kd = 1, ki = 0
  auto [accel, next] =
      pid_desired_accel(Vec3(1, 0, 0), Vec3::Zero(), st, g, 0.01);
  EXPECT_NEAR(accel.x(), 0.5, 1e-15);
  EXPECT_EQ(accel.y(), 0.0);
  EXPECT_EQ(accel.z(), 0.0);
}

TEST(PidAccel, DerivativeTermAlone) {
  PidState st;
  PidGains g;
  auto [accel, next] =
      pid_desired_accel(Vec3::Zero(), Vec3(0, -0.3, 0), st, g, 0.01);
  EXPECT_NEAR(accel.y(), -0.3, 1e-15);
}

TEST(PidAccel, IsLinearWhenIntegralInactive) {
  PidGains g;
  g.kp = Vec3(0.4, 0.5, 0.6);
  g.kd = Vec3(1.0, 0.9, 0.8);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec3 e1 = gaussian_vec(rng, 3), e2 = gaussian_vec(rng, 3);
    Vec3 d1 = gaussian_vec(rng, 3), d2 = gaussian_vec(rng, 3);
    PidState st;
    Vec3 a1 = pid_desired_accel(e1, d1, st, g, 0.01).first;
    Vec3 a2 = pid_desired_accel(e2, d2, st, g, 0.01).first;
    Vec3 sum = pid_desired_accel(e1 + e2, d1 + d2, st, g, 0.01).first;
    ASSERT_LT((sum - a1 - a2).norm(), 1e-12);
  }
}

TEST(PidAccel, IntegralAccumulatesErrorTimesDt) {
  PidGains g;
  g.kp = Vec3::Zero();
  g.kd = Vec3::Zero();
  g.ki = Vec3(0.2, 0.1, 0.1);
  PidState st;
  Vec3 e(1.0, -0.5, 0.25);
  double dt = 0.01;
  for (int i = 0; i < 10; ++i) {
    auto [accel, next] = pid_desired_accel(e, Vec3::Zero(), st, g, dt);
    st = next;
    Vec3 expected_integral = e * dt * (i + 1);
    ASSERT_LT((st.integral - expected_integral).norm(), 1e-12);
    ASSERT_LT((accel - g.ki.cwiseProduct(expected_integral)).norm(), 1e-12);
  }
}

TEST(PidAccel, IntegralClampsAtLimit) {
  PidGains g;
  g.ki = Vec3(0.1, 0.1, 0.1);
  g.integral_limit = 0.05;
  PidState st;
  Vec3 e(10.0, -10.0, 0.0);
  for (int i = 0; i < 100; ++i)
    st = pid_desired_accel(e, Vec3::Zero(), st, g, 0.01).second;
  EXPECT_DOUBLE_EQ(st.integral.x(), 0.05);
  EXPECT_DOUBLE_EQ(st.integral.y(), -0.05);
  EXPECT_EQ(st.integral.z(), 0.0);
}

TEST(AccelToAttitude, ZeroAccelIsLevel) {
  auto [phi, theta] = accel_to_attitude(Vec3::Zero(), 0.0);
  EXPECT_EQ(phi, 0.0);
  EXPECT_EQ(theta, 0.0);
}

TEST(AccelToAttitude, LateralAccelMapsToRollBeforeClamp) {
  ActionBounds wide;
  wide.tilt_max = 10.0;  // disable the clamp to expose the raw formula
  auto [phi, theta] = accel_to_attitude(Vec3(0, -kGravity, 0), 0.0, wide);
  EXPECT_NEAR(phi, 1.0, 1e-12);
  EXPECT_NEAR(theta, 0.0, 1e-12);
}

TEST(AccelToAttitude, ForwardAccelMapsToPitchBeforeClamp) {
  ActionBounds wide;
  wide.tilt_max = 10.0;
  auto [phi, theta] = accel_to_attitude(Vec3(kGravity, 0, 0), 0.0, wide);
  EXPECT_NEAR(theta, 1.0, 1e-12);
  EXPECT_NEAR(phi, 0.0, 1e-12);
}

TEST(AccelToAttitude, YawRotatesTheMapping) {
  ActionBounds wide;
  wide.tilt_max = 10.0;
  double psi = 0.7;
  Vec3 accel(1.2, -0.8, 0.3);
  auto [phi, theta] = accel_to_attitude(accel, psi, wide);
  double g = kGravity;
  EXPECT_NEAR(phi,
              (accel.x() * std::sin(psi) - accel.y() * std::cos(psi)) / g,
              1e-12);
  EXPECT_NEAR(theta,
              (accel.x() * std::cos(psi) + accel.y() * std::sin(psi)) / g,
              1e-12);
}

TEST(AccelToAttitude, DefaultBoundsClampTilt) {
  auto [phi, theta] = accel_to_attitude(Vec3(30, -30, 40), 0.0);
  ActionBounds b;
  EXPECT_DOUBLE_EQ(phi, b.tilt_max);
  EXPECT_DOUBLE_EQ(theta, b.tilt_max);
}

TEST(LeaderAction, AtGoalAtRestCommandsHover) {
  SystemParams p = test::default_params();
  SystemState s;
  Vec3 goal = Vec3::Zero();  // object frame goal, tracking object position
  PidState pid;
  auto [action, next] =
      leader_action(s, goal, pid, PidGains{}, 0.01, p.object);
  EXPECT_EQ(action.phi_d, 0.0);
  EXPECT_EQ(action.theta_d, 0.0);
  EXPECT_EQ(action.az_d, 0.0);
  EXPECT_EQ(action.psi_d, 0.0);
}

TEST(LeaderAction, ClimbErrorMapsToVerticalAccel) {
  SystemParams p = test::default_params();
  SystemState s;
  Vec3 goal(0, 0, 1);  // 1 m above, at rest, kp_z = 0.5
  PidState pid;
  auto [action, next] =
      leader_action(s, goal, pid, PidGains{}, 0.01, p.object);
  EXPECT_NEAR(action.az_d, 0.5, 1e-15);
  EXPECT_EQ(action.phi_d, 0.0);
  EXPECT_EQ(action.theta_d, 0.0);
}

TEST(LeaderAction, TracksLeaderPositionWhenAsked) {
  SystemParams p = test::default_params();
  SystemState s;
  // Goal equal to the leader attach point: zero error in leader mode even
  // though the object origin is elsewhere.
  Vec3 goal = p.object.attach_leader;
  PidState pid;
  auto [action, next] =
      leader_action(s, goal, pid, PidGains{}, 0.01, p.object,
                    LeaderError::leader_position);
  EXPECT_EQ(action.phi_d, 0.0);
  EXPECT_EQ(action.theta_d, 0.0);
  EXPECT_EQ(action.az_d, 0.0);
}

TEST(LeaderAction, OutputAlwaysWithinBounds) {
  SystemParams p = test::default_params();
  Rng rng(11);
  ActionBounds b;
  for (int i = 0; i < 200; ++i) {
    SystemState s = test::random_state(rng);
    Vec3 goal = gaussian_vec(rng, 3) * 5.0;
    PidState pid;
    PidGains wild;
    wild.kp = Vec3(20, 20, 20);
    wild.kd = Vec3(10, 10, 10);
    auto [action, next] =
        leader_action(s, goal, pid, wild, 0.01, p.object);
    ASSERT_LE(std::abs(action.phi_d), b.tilt_max);
    ASSERT_LE(std::abs(action.theta_d), b.tilt_max);
    ASSERT_LE(std::abs(action.az_d), b.az_max);
    ASSERT_EQ(action.psi_d, 0.0);
  }
}

}  // namespace
}  // namespace ctsim
