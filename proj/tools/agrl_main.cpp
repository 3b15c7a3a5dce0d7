// Command-line front end: train / eval / bench / gradcheck / list-goals.
// Exit codes: 0 ok, 1 usage or config error, 2 numeric failure, 3 I/O.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "agrl/bench.hpp"
#include "agrl/checkpoint.hpp"
#include "agrl/errors.hpp"
#include "agrl/gradcheck_suite.hpp"
#include "agrl/metrics.hpp"
#include "agrl/trainer.hpp"

using namespace agrl;

namespace {

RunConfig config_from_cli(const std::string& config_path, const std::vector<std::string>& sets) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  for (const std::string& kv : sets) apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets) {
  RunConfig cfg = config_from_cli(config_path, sets);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "config.json");
    if (!f) throw IoError("cannot write resolved config to " + cfg.out_dir);
    f << run_config_to_json_text(cfg) << "\n";
  }
  const TrainOutcome outcome = train_run(cfg);
  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir(cfg.out_dir);
    write_metrics_jsonl((dir / "metrics.jsonl").string(), outcome.metrics);
    write_timing_csv((dir / "timing.csv").string(), outcome.metrics);
    write_summary_csv((dir / "summary.csv").string(), outcome.goals, outcome.final_eval);
  }
  std::printf("method=%s env=%s steps=%lld final_mean_success=%.4f\n", cfg.method.c_str(),
              cfg.env.c_str(), static_cast<long long>(cfg.total_steps),
              outcome.final_eval.mean_success);
  for (const MetricsRecord& m : outcome.metrics) {
    std::printf("  step=%-10lld mean_success=%.4f sps=%lld\n", static_cast<long long>(m.step),
                m.mean_success, static_cast<long long>(m.sps));
  }
  if (outcome.return_stats.violations != 0) {
    std::fprintf(stderr, "return-bound violations: %lld\n",
                 static_cast<long long>(outcome.return_stats.violations));
    return 2;
  }
  return 0;
}

int cmd_eval(const std::string& config_path, const std::vector<std::string>& sets,
             const std::string& checkpoint_dir, const std::string& goal_filter, int episodes,
             uint64_t seed, const std::string& json_out) {
  RunConfig cfg = config_from_cli(config_path, sets);
  EnvBundle env = make_env_bundle(cfg);
  env.rebind();

  // Acting nets per method, loaded from <dir>/<role>.{json,bin}.
  std::vector<std::string> roles;
  if (cfg.method == "leo") roles = {"leo"};
  else if (cfg.method == "dual_leo_pqn") roles = {"leo", "uvfa"};
  else if (cfg.method == "ppo" || cfg.method == "dual_leo_ppo") roles = {"actor"};
  else if (cfg.method == "leo_dpg") roles = {"pi"};
  else roles = {"uvfa"};

  std::map<std::string, NetParams> nets;
  for (const std::string& role : roles) {
    const std::string prefix = (std::filesystem::path(checkpoint_dir) / role).string();
    nets.emplace(role, load_checkpoint(prefix));
  }
  // Shape consistency between the checkpoint and the configured env.
  const int G = env.goals.size();
  for (const auto& [role, net] : nets) {
    int want_in = 0, want_goals = 0;
    if (role == "leo") {
      want_in = env.obs_dim;
      want_goals = G;
    } else if (role == "uvfa" || role == "actor") {
      want_in = env.obs_dim + G;
      want_goals = 1;
    } else {  // pi
      want_in = env.obs_dim;
      want_goals = G;
    }
    if (net.input_dim() != want_in || net.head.num_goals != want_goals) {
      throw ShapeError("checkpoint '" + role + "' has input " + std::to_string(net.input_dim()) +
                       " and " + std::to_string(net.head.num_goals) +
                       " goal heads, but method/env expect " + std::to_string(want_in) + " and " +
                       std::to_string(want_goals) + " (env " + cfg.env + ", |G|=" +
                       std::to_string(G) + ")");
    }
  }

  const rollout::EvalReport report = evaluate_nets(cfg, nets, env.goals, episodes, seed);

  std::vector<int> order(static_cast<size_t>(G));
  for (int g = 0; g < G; ++g) order[static_cast<size_t>(g)] = g;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = report.per_goal_success[static_cast<size_t>(a)];
    const double sb = report.per_goal_success[static_cast<size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  });
  std::printf("%-40s %-12s %s\n", "goal", "category", "success");
  bool filter_hit = false;
  for (int g : order) {
    const GoalSpec& spec = env.goals.spec(g);
    if (!goal_filter.empty() && spec.name != goal_filter) continue;
    filter_hit = true;
    std::printf("%-40s %-12s %.4f\n", spec.name.c_str(), spec.category.c_str(),
                report.per_goal_success[static_cast<size_t>(g)]);
  }
  if (!goal_filter.empty() && !filter_hit) {
    throw ConfigError("eval: unknown goal '" + goal_filter + "'");
  }
  std::printf("mean_success %.4f over %d episodes/goal\n", report.mean_success,
              report.episodes_per_goal);

  if (!json_out.empty()) {
    nlohmann::json j;
    j["mean_success"] = report.mean_success;
    j["episodes_per_goal"] = report.episodes_per_goal;
    nlohmann::json per;
    for (int g = 0; g < G; ++g) {
      per[env.goals.spec(g).name] = report.per_goal_success[static_cast<size_t>(g)];
    }
    j["per_goal_success"] = std::move(per);
    std::ofstream f(json_out);
    if (!f) throw IoError("cannot write report " + json_out);
    f << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_bench(const std::vector<std::string>& methods, const std::vector<int>& goal_counts,
              int64_t steps, bool update_only, uint64_t seed, int width,
              const std::string& csv_out) {
  bench::BenchOptions opt;
  if (!methods.empty()) opt.methods = methods;
  if (!goal_counts.empty()) opt.goal_counts = goal_counts;
  opt.steps = steps;
  opt.update_only = update_only;
  opt.seed = seed;
  if (width > 0) opt.train.net_width = width;
  const auto results = bench::run_bench(opt);
  const std::string csv = bench::bench_csv(results);
  std::fputs(csv.c_str(), stdout);
  if (!csv_out.empty()) {
    std::ofstream f(csv_out);
    if (!f) throw IoError("cannot write bench csv " + csv_out);
    f << csv;
  }
  return 0;
}

int cmd_gradcheck(uint64_t seed, const std::string& method) {
  const auto entries = run_gradcheck_suite(seed, method);
  bool ok = true;
  for (const auto& e : entries) {
    std::printf("%-28s max_rel_err=%.3e threshold=%.0e %s\n", e.name.c_str(), e.max_rel_err,
                e.threshold, e.passed() ? "ok" : "FAIL");
    ok = ok && e.passed();
  }
  if (!ok) throw NumericError("gradient check failed");
  return 0;
}

int cmd_list_goals(const std::string& env_name, const std::vector<std::string>& sets) {
  RunConfig cfg;
  cfg.env = env_name;
  if (env_name == "pointmaze") cfg.method = "leo_dpg";
  for (const std::string& kv : sets) apply_override(cfg, kv);
  cfg.validate();
  EnvBundle env = make_env_bundle(cfg);
  std::fputs(env.goals.table().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("AGRL_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"all-goals reinforcement learning toolkit"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_dir, goal_filter, json_out, method_filter, env_name, csv_out;
  std::vector<std::string> sets, methods;
  std::vector<int> goal_counts;
  int episodes = 16;
  int width = 0;
  int64_t steps = 4096;
  uint64_t seed = 0;
  bool update_only = false;

  CLI::App* train = app.add_subcommand("train", "run a training loop from a config");
  train->add_option("--config", config_path, "JSON run config");
  train->add_option("--set", sets, "dotted-path override key=value");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--config", config_path, "JSON run config");
  eval->add_option("--set", sets, "dotted-path override key=value");
  eval->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
  eval->add_option("--goal", goal_filter, "restrict the table to one goal");
  eval->add_option("--episodes", episodes, "episodes per goal");
  eval->add_option("--seed", seed, "evaluation seed");
  eval->add_option("--json", json_out, "also write a JSON report here");

  CLI::App* bench_cmd = app.add_subcommand("bench", "update-throughput comparison");
  bench_cmd->add_option("--methods", methods, "subset of single_goal,leo,naive_relabel")
      ->delimiter(',');
  bench_cmd->add_option("--goal-counts", goal_counts, "goal-set sizes to sweep")
      ->delimiter(',');
  bench_cmd->add_option("--steps", steps, "environment steps per measurement");
  bench_cmd->add_flag("--update-only", update_only, "time the update loop without stepping");
  bench_cmd->add_option("--seed", seed, "bench seed");
  bench_cmd->add_option("--width", width, "net width shared by all methods");
  bench_cmd->add_option("--csv", csv_out, "also write the CSV here");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference sweep over all losses");
  gradcheck->add_option("--seed", seed, "probe seed");
  gradcheck->add_option("--method", method_filter, "restrict to one loss family");

  CLI::App* list_goals = app.add_subcommand("list-goals", "print the goal table for an env");
  list_goals->add_option("--env", env_name, "gridcraft_small | gridcraft_full | pointmaze")
      ->required();
  list_goals->add_option("--set", sets, "dotted-path override key=value");

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train(config_path, sets);
    if (eval->parsed()) {
      return cmd_eval(config_path, sets, checkpoint_dir, goal_filter, episodes, seed, json_out);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(methods, goal_counts, steps, update_only, seed, width, csv_out);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(seed, method_filter);
    if (list_goals->parsed()) return cmd_list_goals(env_name, sets);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  }
  return 0;
}
