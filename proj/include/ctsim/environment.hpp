#pragma once

// Episodic MDP for the follower agent: the leader runs its PID policy, the
// follower supplies a ControlAction, both go through the inner attitude
// loops, and the composite dynamics advances one step. Reward is the
// action-mimicry penalty; termination is horizon, goal-distance breach, or
// numerical divergence.

#include "ctsim/dynamics.hpp"
#include "ctsim/inner_control.hpp"
#include "ctsim/leader_pid.hpp"
#include "ctsim/rng.hpp"
#include "ctsim/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctsim {

inline constexpr int kObsDim = 18;
using Observation = Eigen::Matrix<double, kObsDim, 1>;

struct EpisodeConfig {
  Vec3 goal = Vec3(1.0, 1.0, 1.0);  // object goal position p_o^d, m
  int max_steps = 1000;
  double d_term = 2.5;              // object-to-goal distance cutoff, m
  CgTrajectory cg;
  double object_mass = 0.2;         // kg, overrides system.object.mass
  double dt = 0.01;                 // s
  unsigned long seed = 0;

  bool random_goal = false;         // redraw the goal uniformly each reset
  Vec3 goal_box_lo = Vec3(0.5, 0.5, 0.5);
  Vec3 goal_box_hi = Vec3(1.5, 1.5, 1.5);

  // Test-stand configuration: pitch locked, theta_d forced to zero, leader
  // PID regulates its own position to leader_goal.
  bool test_stand = false;
  Vec3 leader_goal = Vec3(0.0, 0.0, 0.08);

  // When false, the payload inertia follows the slender-rod formula from
  // object_mass and length (so mass sweeps stay physically consistent).
  bool object_inertia_override = false;

  SystemParams system;
  PidGains pid;
  AttitudeGains attitude;
  ActionBounds bounds;
};

// [p_f, eta, v_f, eta_dot, e_o, e_o_dot], all from the shared rigid state.
inline Observation build_observation(const SystemState& state, const Vec3& goal,
                                     const ObjectParams& obj) {
  Observation o;
  o.segment<3>(0) = drone_position(state, obj.attach_follower);
  o.segment<3>(3) = state.eta;
  o.segment<3>(6) = drone_velocity(state, obj.attach_follower);
  o.segment<3>(9) = state.omega;
  o.segment<3>(12) = goal - state.p_o;
  o.segment<3>(15) = -state.v_o;
  return o;
}

// r = -10 |az_l - az_f| - 10 |phi_l - phi_f| - 10 |theta_l - theta_f|; always
// <= 0, zero only when the follower matches the leader exactly.
inline double reward(const ControlAction& leader, const ControlAction& follower) {
  return -10.0 * std::abs(leader.az_d - follower.az_d) -
         10.0 * std::abs(leader.phi_d - follower.phi_d) -
         10.0 * std::abs(leader.theta_d - follower.theta_d);
}

enum class Termination { none, horizon, diverged, numerical };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::horizon:
      return "horizon";
    case Termination::diverged:
      return "diverged";
    case Termination::numerical:
      return "numerical";
    default:
      return "none";
  }
}

struct StepOutput {
  Observation obs = Observation::Zero();
  double reward = 0.0;
  bool done = false;
  Termination termination = Termination::none;
  ControlAction leader;    // what the leader commanded this step
  ControlAction follower;  // the (clamped) action actually applied
  bool saturated = false;  // either inner loop had to scale its torque
  Vec3 cg_offset = Vec3::Zero();  // body frame, at the step's start time
};

class Environment {
 public:
  explicit Environment(const EpisodeConfig& cfg) : cfg_(cfg) {
    cfg_.system.object.mass = cfg_.object_mass;
    if (!cfg_.object_inertia_override)
      cfg_.system.object.inertia = ObjectParams::rod_inertia(
          cfg_.object_mass, cfg_.system.object.length);
    cfg_.system.lock_pitch = cfg_.test_stand;
    auto [inertia, total_mass] =
        composite_inertia(cfg_.system.leader, cfg_.system.follower,
                          cfg_.system.object);
    half_inertia_ = 0.5 * inertia;
    total_mass_ = total_mass;
    goal_rng_.seed(cfg_.seed);
    reset();
  }

  Observation reset() {
    state_ = SystemState{};
    pid_ = PidState{};
    steps_ = 0;
    done_ = false;
    term_ = Termination::none;
    goal_ = cfg_.goal;
    if (cfg_.random_goal) {
      for (int i = 0; i < 3; ++i)
        goal_[i] = uniform(goal_rng_, cfg_.goal_box_lo[i], cfg_.goal_box_hi[i]);
    }
    return build_observation(state_, goal_, cfg_.system.object);
  }

  // The action the leader would command right now. env_step recomputes the
  // same thing and commits the PID integrator; the preview never does.
  ControlAction leader_preview() const {
    return compute_leader().first;
  }

  StepOutput env_step(const ControlAction& follower_action) {
    if (done_) throw std::logic_error("env_step called on a finished episode");

    auto [leader_act, next_pid] = compute_leader();

    ControlAction follower = clamp_action(follower_action);
    if (cfg_.test_stand) follower.theta_d = 0.0;

    StepOutput out;
    out.leader = leader_act;
    out.follower = follower;
    out.cg_offset = cg_offset_at(state_.t, cfg_.cg);
    out.reward = reward(leader_act, follower);

    Vec4 rotors_l = inner_loop(leader_act, cfg_.system.leader,
                               cfg_.system.object.mass / 2 +
                                   cfg_.system.leader.mass,
                               out.saturated);
    Vec4 rotors_f = inner_loop(follower, cfg_.system.follower,
                               cfg_.system.object.mass / 2 +
                                   cfg_.system.follower.mass,
                               out.saturated);

    StepResult sr =
        step(state_, rotors_l, rotors_f, cfg_.system, cfg_.cg, cfg_.dt);
    state_ = sr.state;
    pid_ = next_pid;
    steps_ += 1;

    if (sr.diverged) {
      term_ = Termination::numerical;
    } else if ((state_.p_o - goal_).norm() > cfg_.d_term) {
      term_ = Termination::diverged;
    } else if (steps_ >= cfg_.max_steps) {
      term_ = Termination::horizon;
    }
    done_ = term_ != Termination::none;

    out.obs = build_observation(state_, goal_, cfg_.system.object);
    out.done = done_;
    out.termination = term_;
    return out;
  }

  const SystemState& state() const { return state_; }
  const Vec3& goal() const { return goal_; }
  bool done() const { return done_; }
  int steps() const { return steps_; }
  Termination termination() const { return term_; }
  const EpisodeConfig& config() const { return cfg_; }
  double total_mass() const { return total_mass_; }

  ControlAction clamp_action(const ControlAction& a) const {
    ControlAction c;
    c.phi_d = std::clamp(a.phi_d, -cfg_.bounds.tilt_max, cfg_.bounds.tilt_max);
    c.theta_d =
        std::clamp(a.theta_d, -cfg_.bounds.tilt_max, cfg_.bounds.tilt_max);
    c.az_d = std::clamp(a.az_d, -cfg_.bounds.az_max, cfg_.bounds.az_max);
    c.psi_d = 0.0;
    return c;
  }

 private:
  std::pair<ControlAction, PidState> compute_leader() const {
    if (cfg_.test_stand) {
      auto res = leader_action(state_, cfg_.leader_goal, pid_, cfg_.pid,
                               cfg_.dt, cfg_.system.object,
                               LeaderError::leader_position, cfg_.bounds,
                               cfg_.system.gravity);
      res.first.theta_d = 0.0;
      return res;
    }
    return leader_action(state_, goal_, pid_, cfg_.pid, cfg_.dt,
                         cfg_.system.object, LeaderError::object, cfg_.bounds,
                         cfg_.system.gravity);
  }

  Vec4 inner_loop(const ControlAction& action, const DroneParams& drone,
                  double mass_share, bool& saturated) {
    ThrustTorque tt =
        attitude_control(state_, action, drone, mass_share, half_inertia_,
                         cfg_.attitude, cfg_.system.gravity);
    saturated = saturated || tt.saturated;
    return mix(tt.thrust, tt.torque, drone).forces;
  }

  EpisodeConfig cfg_;
  SystemState state_;
  PidState pid_;
  Mat3 half_inertia_;
  double total_mass_ = 0.0;
  Vec3 goal_ = Vec3::Zero();
  Rng goal_rng_;
  int steps_ = 0;
  bool done_ = false;
  Termination term_ = Termination::none;
};

}  // namespace ctsim
