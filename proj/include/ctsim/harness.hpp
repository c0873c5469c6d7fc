#pragma once

// Experiment orchestration: seeded training runs with reward-curve logging
// and checkpoints, deterministic evaluation sweeps over CG speed and payload
// mass, single-rollout simulation with full trajectory logging, and the
// thrust-count export used on the real rig.

#include "ctsim/checkpoint.hpp"
#include "ctsim/config.hpp"
#include "ctsim/csv.hpp"
#include "ctsim/environment.hpp"
#include "ctsim/replay.hpp"
#include "ctsim/sac.hpp"
#include "ctsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace ctsim {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline long thrust_command(double az_d, const ThrustMapping& map) {
  if (!std::isfinite(az_d))
    throw std::invalid_argument("thrust_command: non-finite input");
  double raw = map.hover + map.k_pz * az_d;
  return std::lround(std::clamp(raw, map.min, map.max));
}

// Pitch-locked, roll-and-height-only configuration: the leader PID regulates
// the leader drone's own position to leader_goal, and the object goal is the
// matching object-center position so observations and termination stay
// meaningful.
inline EpisodeConfig test_stand_mode(EpisodeConfig cfg) {
  cfg.test_stand = true;
  cfg.goal = cfg.leader_goal - cfg.system.object.attach_leader;
  return cfg;
}

inline VecX follower_action_bound(const ActionBounds& b) {
  VecX v(3);
  v << b.tilt_max, b.tilt_max, b.az_max;
  return v;
}

inline ControlAction vec_to_action(const VecX& a) {
  ControlAction act;
  act.phi_d = a[0];
  act.theta_d = a[1];
  act.az_d = a[2];
  act.psi_d = 0.0;
  return act;
}

// ---------------------------------------------------------------------------
// Rollouts

struct RolloutResult {
  int steps = 0;
  Termination termination = Termination::none;
  double episode_return = 0.0;
  double final_distance = 0.0;   // |p_o - goal| when the episode ended
  double max_distance = 0.0;
  double mean_action_gap = 0.0;  // mean per-step |d_phi|+|d_theta|+|d_az|
};

inline std::vector<std::string> trajectory_columns() {
  return {"t",          "p_o_x",      "p_o_y",      "p_o_z",
          "phi",        "theta",      "psi",        "leader_phi_d",
          "leader_theta_d", "leader_az_d", "follower_phi_d",
          "follower_theta_d", "follower_az_d", "reward",
          "cg_x",       "cg_y",       "cg_z"};
}

// Runs one episode with the given policy (obs -> ControlAction), optionally
// logging every step. The environment must be freshly reset.
template <typename PolicyFn>
RolloutResult rollout(Environment& env, PolicyFn policy,
                      CsvWriter* trajectory = nullptr) {
  RolloutResult res;
  Observation obs = build_observation(env.state(), env.goal(),
                                      env.config().system.object);
  double gap_sum = 0.0;
  while (!env.done()) {
    ControlAction action = policy(obs, env);
    double t = env.state().t;
    Vec3 p = env.state().p_o;
    Vec3 eta = env.state().eta;
    StepOutput so = env.env_step(action);
    if (trajectory) {
      trajectory->add(t)
          .add(p.x()).add(p.y()).add(p.z())
          .add(eta.x()).add(eta.y()).add(eta.z())
          .add(so.leader.phi_d).add(so.leader.theta_d).add(so.leader.az_d)
          .add(so.follower.phi_d).add(so.follower.theta_d).add(so.follower.az_d)
          .add(so.reward)
          .add(so.cg_offset.x()).add(so.cg_offset.y()).add(so.cg_offset.z());
      trajectory->end_row();
    }
    res.episode_return += so.reward;
    gap_sum += std::abs(so.leader.phi_d - so.follower.phi_d) +
               std::abs(so.leader.theta_d - so.follower.theta_d) +
               std::abs(so.leader.az_d - so.follower.az_d);
    res.max_distance =
        std::max(res.max_distance, (env.state().p_o - env.goal()).norm());
    obs = so.obs;
    res.steps += 1;
  }
  res.termination = env.termination();
  res.final_distance = (env.state().p_o - env.goal()).norm();
  res.mean_action_gap = res.steps > 0 ? gap_sum / res.steps : 0.0;
  return res;
}

// Follower that replays the leader's action: the centralized-PID baseline.
inline RolloutResult rollout_oracle(Environment& env,
                                    CsvWriter* trajectory = nullptr) {
  return rollout(
      env,
      [](const Observation&, const Environment& e) {
        return e.leader_preview();
      },
      trajectory);
}

// Deterministic trained-policy rollout.
inline RolloutResult rollout_policy(Environment& env, const SacState& sac,
                                    CsvWriter* trajectory = nullptr) {
  return rollout(
      env,
      [&sac](const Observation& obs, const Environment& e) {
        PolicySample ps =
            policy_sample(sac.policy, obs, sac.action_bound, nullptr,
                          sac.config.log_std_min, sac.config.log_std_max);
        return e.clamp_action(vec_to_action(ps.a));
      },
      trajectory);
}

// ---------------------------------------------------------------------------
// Training

struct EpisodeStat {
  int episode = 0;
  int steps = 0;
  double episode_return = 0.0;
  double trailing_mean = 0.0;  // over the last 100 episodes, inclusive
  Termination termination = Termination::none;
};

struct TrainResult {
  std::string checkpoint_path;
  std::string reward_log_path;
  std::vector<EpisodeStat> episodes;
};

inline TrainResult train(const RunConfig& cfg, bool quiet = false) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  Environment env(cfg.env);
  VecX bound = follower_action_bound(cfg.env.bounds);
  SacState sac = sac_init(kObsDim, 3, bound, cfg.sac);
  ReplayBuffer replay(cfg.sac.replay_capacity);

  TrainResult result;
  result.reward_log_path = (fs::path(cfg.out_dir) / "reward_log.csv").string();
  CsvWriter reward_log(result.reward_log_path, "reward_log", 1,
                       {"episode", "steps", "return", "avg100", "termination"});

  std::vector<double> returns;
  for (int episode = 1; episode <= cfg.episodes; ++episode) {
    Observation obs = env.reset();
    double ep_return = 0.0;
    int ep_steps = 0;

    while (!env.done()) {
      VecX a_unit(3), a(3);
      if (sac.env_steps < cfg.sac.warmup_steps) {
        for (int i = 0; i < 3; ++i) a_unit[i] = uniform(sac.rng, -1.0, 1.0);
        a = a_unit.cwiseProduct(bound);
      } else {
        VecX noise = gaussian_vec(sac.rng, 3);
        PolicySample ps =
            policy_sample(sac.policy, obs, bound, &noise,
                          cfg.sac.log_std_min, cfg.sac.log_std_max);
        a_unit = ps.a_unit;
        a = ps.a;
      }

      StepOutput so = env.env_step(vec_to_action(a));
      sac.env_steps += 1;
      ep_steps += 1;
      ep_return += so.reward;

      Transition tr;
      tr.s = obs;
      tr.a_unit = a_unit;
      tr.a = a;
      tr.r = so.reward;
      tr.s_next = so.obs;
      // Horizon cutoff is a truncation, not a terminal state: bootstrap
      // through it. Distance and numerical blowups are real terminals.
      tr.done = so.done && so.termination != Termination::horizon;
      replay_push(replay, std::move(tr));
      obs = so.obs;

      if (sac.env_steps >= cfg.sac.warmup_steps &&
          replay.size() >= static_cast<size_t>(cfg.sac.batch_size) &&
          sac.env_steps % cfg.sac.update_every == 0) {
        Batch batch = replay_sample(replay, cfg.sac.batch_size, sac.rng);
        SacLosses losses = sac_update(sac, batch);
        if (!losses.finite) {
          std::ofstream dump(fs::path(cfg.out_dir) / "diagnostics.txt");
          dump << "non-finite loss at episode " << episode << " step "
               << ep_steps << "\n"
               << "value_loss=" << losses.value << " q_loss=" << losses.q
               << " policy_loss=" << losses.policy << "\n"
               << "p_o=" << env.state().p_o.transpose() << "\n"
               << "eta=" << env.state().eta.transpose() << "\n";
          throw DivergenceError("training aborted: non-finite loss");
        }
      }
    }

    returns.push_back(ep_return);
    size_t window = std::min<size_t>(returns.size(), 100);
    double avg = 0.0;
    for (size_t i = returns.size() - window; i < returns.size(); ++i)
      avg += returns[i];
    avg /= static_cast<double>(window);

    EpisodeStat stat{episode, ep_steps, ep_return, avg, env.termination()};
    result.episodes.push_back(stat);
    reward_log.add(episode)
        .add(ep_steps)
        .add(ep_return)
        .add(avg)
        .add(termination_name(env.termination()));
    reward_log.end_row();
    reward_log.flush();

    if (!quiet && episode % 10 == 0)
      std::cout << "episode " << episode << "  return " << ep_return
                << "  avg100 " << avg << "\n";

    if (cfg.checkpoint_every > 0 && episode % cfg.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_%06d.ckpt", episode);
      sac_save(sac, (fs::path(cfg.out_dir) / name).string());
    }
  }

  result.checkpoint_path =
      (fs::path(cfg.out_dir) / "checkpoint_final.ckpt").string();
  sac_save(sac, result.checkpoint_path);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation sweeps

struct SweepPoint {
  std::string sweep;      // "cg" or "mass"
  double value = 0.0;     // rad/s or kg
  RolloutResult result;
  std::string trajectory_path;
};

inline std::vector<double> sweep_values(const std::string& sweep) {
  if (sweep == "cg") return {0.1, 0.31, 0.6, 1.0};
  if (sweep == "mass") return {0.1, 0.2, 0.3, 0.4};
  throw ConfigError("unknown sweep '" + sweep + "' (expected cg or mass)");
}

inline std::vector<SweepPoint> evaluate(const SacState& sac,
                                        const std::string& sweep,
                                        const RunConfig& cfg,
                                        bool quiet = false) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<SweepPoint> points;

  for (double v : sweep_values(sweep)) {
    EpisodeConfig env_cfg = cfg.env;
    if (sweep == "cg") {
      env_cfg.cg.angular_frequency = v;
    } else {
      env_cfg.object_mass = v;
    }

    for (int ep = 0; ep < cfg.eval_episodes_per_point; ++ep) {
      char name[80];
      std::snprintf(name, sizeof(name), "sweep_%s_%.2f_ep%d.csv",
                    sweep.c_str(), v, ep);
      SweepPoint pt;
      pt.sweep = sweep;
      pt.value = v;
      pt.trajectory_path = (fs::path(cfg.out_dir) / name).string();
      CsvWriter traj(pt.trajectory_path, "trajectory", 1, trajectory_columns());
      Environment env(env_cfg);
      pt.result = rollout_policy(env, sac, &traj);
      points.push_back(std::move(pt));
    }
  }

  std::string summary_path =
      (fs::path(cfg.out_dir) / ("sweep_" + sweep + "_summary.csv")).string();
  CsvWriter summary(summary_path, "sweep_summary", 1,
                    {"sweep", "value", "steps", "termination",
                     "final_distance", "max_distance", "mean_action_gap"});
  for (const SweepPoint& pt : points) {
    summary.add(pt.sweep)
        .add(pt.value)
        .add(pt.result.steps)
        .add(std::string(termination_name(pt.result.termination)))
        .add(pt.result.final_distance)
        .add(pt.result.max_distance)
        .add(pt.result.mean_action_gap);
    summary.end_row();
    if (!quiet)
      std::cout << sweep << "=" << pt.value << "  steps " << pt.result.steps
                << "  term " << termination_name(pt.result.termination)
                << "  final_dist " << pt.result.final_distance << "\n";
  }
  return points;
}

// ---------------------------------------------------------------------------
// Single-trajectory simulation

struct SimulateResult {
  RolloutResult rollout;
  std::string trajectory_path;
};

inline SimulateResult simulate(const RunConfig& cfg, const SacState* sac,
                               const std::string& label = "trajectory") {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  SimulateResult out;
  out.trajectory_path = (fs::path(cfg.out_dir) / (label + ".csv")).string();
  CsvWriter traj(out.trajectory_path, "trajectory", 1, trajectory_columns());
  Environment env(cfg.env);
  if (sac) {
    out.rollout = rollout_policy(env, *sac, &traj);
  } else {
    out.rollout = rollout_oracle(env, &traj);
  }
  return out;
}

}  // namespace ctsim
