#pragma once

// Plain-text run configuration: dotted `key = value` lines, `#` comments.
// Every physical and learning parameter has a built-in default, so an
// empty file (or no file) reproduces the reference setup. Unknown keys and
// malformed values are hard errors, not warnings.

#include "ctsim/environment.hpp"
#include "ctsim/sac.hpp"
#include "ctsim/types.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Crazyflie-style thrust counts: thrust = round(hover + k_pz * az_d), clamped.
struct ThrustMapping {
  double hover = 46000.0;  // counts
  double k_pz = 1000.0;    // counts s^2 / m
  double min = 10000.0;
  double max = 60000.0;
};

struct RunConfig {
  int episodes = 1000;
  std::string out_dir = "runs";
  int checkpoint_every = 50;         // episodes between periodic checkpoints
  int eval_episodes_per_point = 1;
  unsigned long seed = 0;
  EpisodeConfig env;
  SacConfig sac;
  ThrustMapping thrust;
};

namespace cfgdetail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

inline long to_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad bool for " + key + ": '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

inline Vec3 to_vec3(const std::string& key, const std::string& v) {
  auto list = to_list(key, v);
  if (list.size() != 3)
    throw ConfigError("config: " + key + " needs exactly 3 values");
  return Vec3(list[0], list[1], list[2]);
}

inline Activation to_activation(const std::string& key, const std::string& v) {
  if (v == "softplus") return Activation::softplus;
  if (v == "relu") return Activation::relu;
  if (v == "tanh") return Activation::tanh;
  throw ConfigError("config: unknown activation for " + key + ": '" + v + "'");
}

}  // namespace cfgdetail

inline void apply_config_entry(RunConfig& c, const std::string& key,
                               const std::string& value) {
  using namespace cfgdetail;
  auto& env = c.env;
  auto& sys = env.system;

  if (key == "run.episodes") c.episodes = static_cast<int>(to_long(key, value));
  else if (key == "run.out_dir") c.out_dir = value;
  else if (key == "run.checkpoint_every")
    c.checkpoint_every = static_cast<int>(to_long(key, value));
  else if (key == "run.eval_episodes_per_point")
    c.eval_episodes_per_point = static_cast<int>(to_long(key, value));
  else if (key == "run.seed") c.seed = static_cast<unsigned long>(to_long(key, value));

  else if (key == "env.goal") env.goal = to_vec3(key, value);
  else if (key == "env.max_steps") env.max_steps = static_cast<int>(to_long(key, value));
  else if (key == "env.d_term") env.d_term = to_double(key, value);
  else if (key == "env.dt") env.dt = to_double(key, value);
  else if (key == "env.random_goal") env.random_goal = to_bool(key, value);
  else if (key == "env.goal_box_lo") env.goal_box_lo = to_vec3(key, value);
  else if (key == "env.goal_box_hi") env.goal_box_hi = to_vec3(key, value);
  else if (key == "env.test_stand") env.test_stand = to_bool(key, value);
  else if (key == "env.leader_goal") env.leader_goal = to_vec3(key, value);

  else if (key == "cg.amplitude") env.cg.amplitude = to_double(key, value);
  else if (key == "cg.omega") env.cg.angular_frequency = to_double(key, value);
  else if (key == "cg.axis") env.cg.axis = to_vec3(key, value).normalized();

  else if (key == "object.mass") env.object_mass = to_double(key, value);
  else if (key == "object.length") sys.object.length = to_double(key, value);
  else if (key == "object.inertia") {
    sys.object.inertia = to_vec3(key, value).asDiagonal();
    env.object_inertia_override = true;
  }
  else if (key == "object.attach_leader") sys.object.attach_leader = to_vec3(key, value);
  else if (key == "object.attach_follower")
    sys.object.attach_follower = to_vec3(key, value);

  else if (key == "drone.mass") {
    sys.leader.mass = to_double(key, value);
    sys.follower.mass = sys.leader.mass;
  } else if (key == "drone.arm_length") {
    sys.leader.arm_length = to_double(key, value);
    sys.follower.arm_length = sys.leader.arm_length;
  } else if (key == "drone.moment_coeff") {
    sys.leader.rotor_moment_coeff = to_double(key, value);
    sys.follower.rotor_moment_coeff = sys.leader.rotor_moment_coeff;
  } else if (key == "drone.force_min") {
    sys.leader.rotor_force_limits[0] = to_double(key, value);
    sys.follower.rotor_force_limits[0] = sys.leader.rotor_force_limits[0];
  } else if (key == "drone.force_max") {
    sys.leader.rotor_force_limits[1] = to_double(key, value);
    sys.follower.rotor_force_limits[1] = sys.leader.rotor_force_limits[1];
  } else if (key == "drone.inertia") {
    sys.leader.inertia = to_vec3(key, value).asDiagonal();
    sys.follower.inertia = sys.leader.inertia;
  }

  else if (key == "system.gravity") sys.gravity = to_double(key, value);
  else if (key == "system.divergence_bound")
    sys.divergence_bound = to_double(key, value);

  else if (key == "pid.kp") env.pid.kp = to_vec3(key, value);
  else if (key == "pid.kd") env.pid.kd = to_vec3(key, value);
  else if (key == "pid.ki") env.pid.ki = to_vec3(key, value);
  else if (key == "pid.integral_limit") env.pid.integral_limit = to_double(key, value);

  else if (key == "att.kp") env.attitude.kp = to_vec3(key, value);
  else if (key == "att.kd") env.attitude.kd = to_vec3(key, value);

  else if (key == "bounds.tilt_max") env.bounds.tilt_max = to_double(key, value);
  else if (key == "bounds.az_max") env.bounds.az_max = to_double(key, value);

  else if (key == "sac.lr") c.sac.lr = to_double(key, value);
  else if (key == "sac.gamma") c.sac.gamma = to_double(key, value);
  else if (key == "sac.alpha") c.sac.alpha = to_double(key, value);
  else if (key == "sac.replay_capacity")
    c.sac.replay_capacity = static_cast<size_t>(to_long(key, value));
  else if (key == "sac.batch_size")
    c.sac.batch_size = static_cast<int>(to_long(key, value));
  else if (key == "sac.hidden") {
    auto list = cfgdetail::to_list(key, value);
    c.sac.hidden.clear();
    for (double d : list) c.sac.hidden.push_back(static_cast<int>(d));
  } else if (key == "sac.polyak_tau") c.sac.polyak_tau = to_double(key, value);
  else if (key == "sac.twin_q") c.sac.twin_q = to_bool(key, value);
  else if (key == "sac.activation") c.sac.activation = to_activation(key, value);
  else if (key == "sac.update_every")
    c.sac.update_every = static_cast<int>(to_long(key, value));
  else if (key == "sac.warmup_steps")
    c.sac.warmup_steps = static_cast<int>(to_long(key, value));
  else if (key == "sac.log_std_min") c.sac.log_std_min = to_double(key, value);
  else if (key == "sac.log_std_max") c.sac.log_std_max = to_double(key, value);

  else if (key == "thrust.hover") c.thrust.hover = to_double(key, value);
  else if (key == "thrust.k_pz") c.thrust.k_pz = to_double(key, value);
  else if (key == "thrust.min") c.thrust.min = to_double(key, value);
  else if (key == "thrust.max") c.thrust.max = to_double(key, value);

  else
    throw ConfigError("config: unknown key '" + key + "'");
}

inline RunConfig parse_config_stream(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfgdetail::trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = cfgdetail::trim(line.substr(0, eq));
    std::string value = cfgdetail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    apply_config_entry(c, key, value);
  }
  // One seed drives everything downstream.
  c.env.seed = c.seed;
  c.sac.seed = c.seed;
  return c;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config_stream(in);
}

}  // namespace ctsim
