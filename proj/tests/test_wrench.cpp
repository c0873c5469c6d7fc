// Interaction-wrench recovery and the Newton-Euler closure of the payload's
// own force/torque balance against the integrated accelerations.

#include "ctsim/dynamics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

namespace ctsim {
namespace {

using test::centered_cg;
using test::constant_rotors;
using test::default_params;
using test::hover_rotor_force;

// Force balance of the payload: m_o p_ddot_o = F_l + F_f - m_o g z.
double force_residual(const SystemParams& p, const Accels& acc,
                      const Wrench& wl, const Wrench& wf) {
  Vec3 lhs = p.object.mass * acc.linear;
  Vec3 rhs = wl.force + wf.force - Vec3(0, 0, p.object.mass * p.gravity);
  return (lhs - rhs).norm();
}

// Torque balance of the payload about its geometric center, body frame. The
// moving-CG gravity moment enters exactly as the simulator applies it; with
// the CG centered the extra term vanishes and this reduces to the plain
// centered-payload balance.
double torque_residual(const SystemParams& p, const SystemState& s,
                       const Accels& acc, const Wrench& wl, const Wrench& wf,
                       const Vec3& cg_offset) {
  Mat3 r_t = rotation_matrix(s.eta).transpose();
  Vec3 lhs = p.object.inertia * acc.angular;
  Vec3 rhs = wl.torque + wf.torque -
             s.omega.cross(p.object.inertia * s.omega) +
             p.object.attach_leader.cross(r_t * wl.force) +
             p.object.attach_follower.cross(r_t * wf.force) +
             cg_offset.cross(r_t * Vec3(0, 0, -p.object.mass * p.gravity));
  return (lhs - rhs).norm();
}

TEST(InteractionWrench, SymmetricHoverSplitsPayloadWeight) {
  SystemParams p = default_params();
  Vec4 rotors = constant_rotors(hover_rotor_force(p));
  SystemState s;
  StepResult res = step(s, rotors, rotors, p, centered_cg(), 0.01);
  auto [wl, wf] = interaction_wrench(s, res.accels, rotors, rotors, p);

  Vec3 expected(0, 0, p.object.mass * p.gravity / 2);
  EXPECT_LT((wl.force - expected).norm(), 1e-12);
  EXPECT_LT((wf.force - expected).norm(), 1e-12);
  EXPECT_LT(wl.torque.norm(), 1e-12);
  EXPECT_LT(wf.torque.norm(), 1e-12);
}

TEST(InteractionWrench, FreeFallTransfersNothing) {
  SystemParams p = default_params();
  SystemState s;
  s.v_o = Vec3(0.3, 0, -1.0);
  StepResult res = step(s, Vec4::Zero(), Vec4::Zero(), p, centered_cg(), 0.01);
  auto [wl, wf] =
      interaction_wrench(s, res.accels, Vec4::Zero(), Vec4::Zero(), p);
  EXPECT_LT(wl.force.norm(), 1e-12);
  EXPECT_LT(wf.force.norm(), 1e-12);
  EXPECT_LT(wl.torque.norm(), 1e-12);
  EXPECT_LT(wf.torque.norm(), 1e-12);
}

TEST(InteractionWrench, ClosureOverRandomSimulatedSteps) {
  SystemParams p = default_params();
  CgTrajectory traj;  // active CG, default amplitude and speed
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    SystemState s = test::random_state(rng);
    Vec4 rl = test::random_rotors(rng, p.leader);
    Vec4 rf = test::random_rotors(rng, p.follower);
    StepResult res = step(s, rl, rf, p, traj, 0.01);
    auto [wl, wf] = interaction_wrench(s, res.accels, rl, rf, p);

    ASSERT_LT(force_residual(p, res.accels, wl, wf), 1e-8);
    ASSERT_LT(torque_residual(p, s, res.accels, wl, wf,
                              cg_offset_at(s.t, traj)),
              1e-8);
  }
}

TEST(InteractionWrench, PlainCenteredBalanceHoldsWithoutCgTerm) {
  SystemParams p = default_params();
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    SystemState s = test::random_state(rng);
    Vec4 rl = test::random_rotors(rng, p.leader);
    Vec4 rf = test::random_rotors(rng, p.follower);
    StepResult res = step(s, rl, rf, p, centered_cg(), 0.01);
    auto [wl, wf] = interaction_wrench(s, res.accels, rl, rf, p);
    ASSERT_LT(force_residual(p, res.accels, wl, wf), 1e-8);
    ASSERT_LT(torque_residual(p, s, res.accels, wl, wf, Vec3::Zero()), 1e-8);
  }
}

}  // namespace
}  // namespace ctsim
