#pragma once

#include <map>
#include <string>
#include <vector>

#include "agrl/algos/relabel.hpp"
#include "agrl/net.hpp"
#include "agrl/rollout.hpp"
#include "agrl/train_config.hpp"

namespace agrl {

// One training/eval/bench invocation, loadable from a JSON document and
// overridable with dotted --set paths.
struct RunConfig {
  std::string method = "leo";          // uvfa_pqn | uvfa_pqn_her | leo | dual_leo_pqn |
                                       // ppo | dual_leo_ppo | leo_dpg
  std::string env = "gridcraft_small"; // gridcraft_small | gridcraft_full | pointmaze
  TrainConfig train;
  int64_t total_steps = 200000;
  int64_t eval_every = 50000;
  uint64_t seed = 0;
  bool autocurriculum = true;
  std::string out_dir;

  bool has_goal_subsample = false;
  int subsample_k = 0;
  std::vector<std::string> subsample_must_include;

  int eval_episodes = 16;
  std::vector<double> checkpoint_fracs{1.0};
  // Dual (PQN) only: run component-wise greedy evaluations at these
  // fractions of training.
  std::vector<double> component_eval_fracs;

  std::string her_strategy = "mixed";
  int her_n = 1;
  int her_m = 1;
  bool her_per_trajectory = true;

  // pointmaze quantization
  double grid_spacing = 0.5;
  double eps_reach = 0.14;

  // gridcraft world edge; 0 picks the env preset default.
  int world_size = 0;

  void validate() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& cfg);
// Dotted-path override, value parsed as JSON when possible ("train.gamma=0.9",
// "method=leo", "subsample_must_include=[\"tools/stone_pickaxe\"]").
void apply_override(RunConfig& cfg, const std::string& key_eq_value);

struct MetricsRecord {
  int64_t step = 0;
  double mean_success = 0.0;
  std::map<std::string, double> per_goal_success;
  std::map<std::string, double> losses;
  double sps = 0.0;  // wall-clock; excluded from the deterministic metrics file
};

struct ComponentEval {
  double frac = 0.0;
  rollout::EvalReport leo;
  rollout::EvalReport uvfa;
};

struct TrainOutcome {
  GoalSet goals;
  std::vector<MetricsRecord> metrics;
  rollout::EvalReport final_eval;
  std::vector<ComponentEval> component_evals;
  // Commanded-channel achievements per goal within the first 10% of steps.
  std::vector<int64_t> early_commanded_hits;
  rollout::ReturnBoundStats return_stats;
  // Trained parameter sets, keyed by role: "uvfa", "leo", "actor", "critic",
  // "q", "pi" (methods fill the roles they use).
  std::map<std::string, NetParams> nets;
};

// Runs the full collect/update loop for cfg.method. Deterministic in
// (config, seed). Writes checkpoints under cfg.out_dir when set.
TrainOutcome train_run(const RunConfig& cfg);

// Greedy evaluation of stored nets against the config's environment;
// cmd_eval and the acceptance suite share this path.
rollout::EvalReport evaluate_nets(const RunConfig& cfg, const std::map<std::string, NetParams>& nets,
                                  const GoalSet& goals, int episodes_per_goal, uint64_t seed);

// Environment assembly shared by the trainer and the CLI. The env adapters
// hold pointers into the bundle's own members, so after copying or moving a
// bundle call rebind() before using the adapters.
struct EnvBundle {
  bool is_gridcraft = true;
  rollout::GridcraftEnv grid_env;
  pointmaze::MazeSpec maze;
  QuantGrid quant;
  rollout::PointmazeEnv maze_env;
  GoalSet goals;
  int obs_dim = 0;
  int num_actions = 0;  // discrete action count (gridcraft)

  void rebind() {
    grid_env.goals = &goals;
    maze_env.spec = &maze;
    maze_env.grid = &quant;
  }
};
EnvBundle make_env_bundle(const RunConfig& cfg);

}  // namespace agrl
