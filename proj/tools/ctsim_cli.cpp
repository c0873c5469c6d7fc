// Command-line driver: train, eval, simulate, export-thrust.
// Exit codes: 0 success, 2 configuration/input error, 3 numerical divergence.

#include "ctsim/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

ctsim::RunConfig load_config(const std::string& path, long seed_override,
                             const std::string& out_override) {
  ctsim::RunConfig cfg;
  if (!path.empty()) cfg = ctsim::parse_config_file(path);
  if (seed_override >= 0) {
    cfg.seed = static_cast<unsigned long>(seed_override);
    cfg.env.seed = cfg.seed;
    cfg.sac.seed = cfg.seed;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative-transport simulation and learning workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint, sweep, label = "trajectory";
  long seed = -1;
  bool oracle = false;
  double az = 0.0;

  auto* train_cmd = app.add_subcommand("train", "Train the follower policy");
  train_cmd->add_option("--config", config_path, "Run configuration file")
      ->required();
  train_cmd->add_option("--seed", seed, "Override the run seed");
  train_cmd->add_option("--out", out_dir, "Output directory");

  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint across a sweep");
  eval_cmd->add_option("--checkpoint", checkpoint, "Trained checkpoint")
      ->required();
  eval_cmd->add_option("--sweep", sweep, "Sweep: cg or mass")->required();
  eval_cmd->add_option("--config", config_path, "Run configuration file");
  eval_cmd->add_option("--out", out_dir, "Output directory");

  auto* sim_cmd =
      app.add_subcommand("simulate", "Roll out one episode and log it");
  sim_cmd->add_option("--checkpoint", checkpoint, "Trained checkpoint");
  sim_cmd->add_flag("--oracle", oracle,
                    "Follower copies the leader's action");
  sim_cmd->add_option("--config", config_path, "Run configuration file");
  sim_cmd->add_option("--out", out_dir, "Output directory");
  sim_cmd->add_option("--label", label, "Trajectory file name (no extension)");

  auto* thrust_cmd = app.add_subcommand(
      "export-thrust", "Convert a vertical acceleration to thrust counts");
  thrust_cmd->add_option("--az", az, "Desired vertical acceleration, m/s^2")
      ->required();
  thrust_cmd->add_option("--config", config_path, "Run configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) {
      ctsim::RunConfig cfg = load_config(config_path, seed, out_dir);
      ctsim::TrainResult res = ctsim::train(cfg);
      std::cout << "checkpoint: " << res.checkpoint_path << "\n"
                << "reward log: " << res.reward_log_path << "\n";
    } else if (*eval_cmd) {
      ctsim::RunConfig cfg = load_config(config_path, seed, out_dir);
      ctsim::SacState sac = ctsim::sac_load(checkpoint);
      auto points = ctsim::evaluate(sac, sweep, cfg);
      for (const auto& pt : points) {
        if (pt.result.termination == ctsim::Termination::numerical)
          throw ctsim::DivergenceError("sweep point diverged numerically");
      }
    } else if (*sim_cmd) {
      if (oracle != checkpoint.empty())
        throw ctsim::ConfigError(
            "simulate needs exactly one of --checkpoint or --oracle");
      ctsim::RunConfig cfg = load_config(config_path, seed, out_dir);
      ctsim::SimulateResult res;
      if (oracle) {
        res = ctsim::simulate(cfg, nullptr, label);
      } else {
        ctsim::SacState sac = ctsim::sac_load(checkpoint);
        res = ctsim::simulate(cfg, &sac, label);
      }
      std::cout << "trajectory: " << res.trajectory_path << "\n"
                << "steps: " << res.rollout.steps << "\n"
                << "termination: "
                << ctsim::termination_name(res.rollout.termination) << "\n"
                << "final distance: " << res.rollout.final_distance << "\n";
    } else if (*thrust_cmd) {
      ctsim::RunConfig cfg = load_config(config_path, -1, "");
      std::cout << ctsim::thrust_command(az, cfg.thrust) << "\n";
    }
  } catch (const ctsim::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
