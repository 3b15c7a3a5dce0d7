#include "agrl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>

#include "agrl/adam.hpp"
#include "agrl/algos/dpg.hpp"
#include "agrl/algos/ppo.hpp"
#include "agrl/algos/qlearn.hpp"
#include "agrl/algos/relabel.hpp"
#include "agrl/algos/training.hpp"
#include "agrl/checkpoint.hpp"
#include "agrl/errors.hpp"
#include "agrl/policies.hpp"

namespace agrl {

using algos::HerParams;
using algos::LossResult;

EnvBundle make_env_bundle(const RunConfig& cfg) {
  EnvBundle bundle;
  if (cfg.env == "pointmaze") {
    bundle.is_gridcraft = false;
    bundle.maze = pointmaze::umaze();
    bundle.quant = pointmaze::make_maze_grid(bundle.maze, cfg.grid_spacing);
    bundle.goals = bundle.quant.goal_set();
    bundle.maze_env = rollout::PointmazeEnv{&bundle.maze, &bundle.quant, cfg.eps_reach};
    bundle.obs_dim = pointmaze::observation_size();
    bundle.num_actions = 0;
    return bundle;
  }
  bundle.is_gridcraft = true;
  const bool small = (cfg.env == "gridcraft_small");
  bundle.goals = gridcraft::make_goal_set(small ? gridcraft::GoalPreset::Small
                                                : gridcraft::GoalPreset::Full);
  if (cfg.has_goal_subsample) {
    bundle.goals = subsample_goals(bundle.goals, cfg.subsample_k, cfg.seed,
                                   cfg.subsample_must_include);
  }
  const int world = cfg.world_size > 0 ? cfg.world_size : (small ? 10 : 12);
  bundle.grid_env = rollout::GridcraftEnv{world, &bundle.goals, gridcraft::kDefaultTMax};
  bundle.obs_dim = gridcraft::observation_size();
  bundle.num_actions = gridcraft::kNumActions;
  return bundle;
}

namespace {

std::vector<int> hidden_widths(const TrainConfig& t) {
  return std::vector<int>(static_cast<size_t>(t.net_layers), t.net_width);
}

std::string frac_tag(double frac) {
  const int pct = static_cast<int>(std::lround(frac * 100.0));
  return "ckpt_" + std::to_string(pct) + "pct";
}

}  // namespace

rollout::EvalReport evaluate_nets(const RunConfig& cfg, const std::map<std::string, NetParams>& nets,
                                  const GoalSet& goals, int episodes_per_goal, uint64_t seed) {
  EnvBundle env = make_env_bundle(cfg);
  env.goals = goals;
  env.rebind();
  const int G = goals.size();

  if (cfg.method == "leo_dpg") {
    if (!nets.count("pi")) throw ConfigError("evaluate_nets: missing 'pi' net");
    // Success on a cell goal means entering the success ball around its
    // center, judged with the environment's success radius.
    rollout::PointmazeEnv eval_env = env.maze_env;
    eval_env.eps_reach = env.maze.success_eps;
    return rollout::evaluate(eval_env, policies::dpg_actor(&nets.at("pi"), 0.0f), G,
                             episodes_per_goal, seed);
  }
  if (cfg.method == "ppo" || cfg.method == "dual_leo_ppo") {
    if (!nets.count("actor")) throw ConfigError("evaluate_nets: missing 'actor' net");
    return rollout::evaluate(env.grid_env, policies::greedy_actor(&nets.at("actor"), G), G,
                             episodes_per_goal, seed);
  }
  if (cfg.method == "leo") {
    if (!nets.count("leo")) throw ConfigError("evaluate_nets: missing 'leo' net");
    return rollout::evaluate(env.grid_env, policies::eps_greedy_leo(&nets.at("leo"), 0.0f), G,
                             episodes_per_goal, seed);
  }
  if (cfg.method == "dual_leo_pqn") {
    if (!nets.count("leo") || !nets.count("uvfa")) {
      throw ConfigError("evaluate_nets: missing 'leo'/'uvfa' nets");
    }
    return rollout::evaluate(env.grid_env,
                             policies::eps_greedy_dual(&nets.at("leo"), &nets.at("uvfa"),
                                                       &cfg.train, 0.0f),
                             G, episodes_per_goal, seed);
  }
  if (!nets.count("uvfa")) throw ConfigError("evaluate_nets: missing 'uvfa' net");
  return rollout::evaluate(env.grid_env, policies::eps_greedy_uvfa(&nets.at("uvfa"), G, 0.0f), G,
                           episodes_per_goal, seed);
}

TrainOutcome train_run(const RunConfig& cfg) {
  cfg.validate();
  EnvBundle env = make_env_bundle(cfg);
  env.rebind();
  const int G = env.goals.size();
  const int obs_dim = env.obs_dim;
  const TrainConfig& tc = cfg.train;

  TrainOutcome outcome;
  outcome.goals = env.goals;
  outcome.early_commanded_hits.assign(static_cast<size_t>(G), 0);

  // Nets per method role.
  std::map<std::string, NetParams> nets;
  const uint64_t net_seed = Rng::mix(cfg.seed, 0xe77);
  const std::vector<int> widths = hidden_widths(tc);
  const bool wants_leo = (cfg.method == "leo" || cfg.method == "dual_leo_pqn" ||
                          cfg.method == "dual_leo_ppo");
  const bool wants_uvfa = (cfg.method == "uvfa_pqn" || cfg.method == "uvfa_pqn_her" ||
                           cfg.method == "dual_leo_pqn");
  if (wants_leo) {
    nets.emplace("leo", make_mlp(obs_dim, widths, {G, gridcraft::kNumActions}, true,
                                 Rng::mix(net_seed, 1)));
  }
  if (wants_uvfa) {
    nets.emplace("uvfa", make_mlp(algos::uvfa_input_dim(obs_dim, G), widths,
                                  {1, gridcraft::kNumActions}, true, Rng::mix(net_seed, 2)));
  }
  if (cfg.method == "ppo" || cfg.method == "dual_leo_ppo") {
    nets.emplace("actor", make_mlp(algos::uvfa_input_dim(obs_dim, G), widths,
                                   {1, gridcraft::kNumActions}, true, Rng::mix(net_seed, 3)));
    nets.emplace("critic", make_mlp(algos::uvfa_input_dim(obs_dim, G), widths, {1, 1}, true,
                                    Rng::mix(net_seed, 4)));
  }
  if (cfg.method == "leo_dpg") {
    nets.emplace("pi", make_mlp(obs_dim, widths, {G, 2}, true, Rng::mix(net_seed, 5)));
    nets.emplace("q", make_mlp(obs_dim + 2, widths, {G, 1}, true, Rng::mix(net_seed, 6)));
  }
  std::map<std::string, AdamState> adam;
  for (auto& [name, net] : nets) adam.emplace(name, make_adam_state(net));

  Rng update_rng(Rng::mix(cfg.seed, 0x0bdaULL));
  algos::PpoParams ppo_view;  // filled per use

  HerParams her;
  her.strategy = algos::her_strategy_from_string(cfg.her_strategy);
  her.n_random = cfg.her_n;
  her.m_positive = cfg.her_m;
  her.per_trajectory = cfg.her_per_trajectory;
  Rng her_rng(Rng::mix(cfg.seed, 0xbe7aULL));

  const int64_t steps_per_iter =
      static_cast<int64_t>(tc.num_lanes) * static_cast<int64_t>(tc.num_steps);
  const int64_t iters = (cfg.total_steps + steps_per_iter - 1) / steps_per_iter;
  const int64_t early_cutoff = cfg.total_steps / 10;

  // Greedy evaluation of the current acting policy.
  auto eval_now = [&](uint64_t salt) {
    RunConfig ecfg = cfg;
    ecfg.out_dir.clear();
    return evaluate_nets(ecfg, nets, env.goals, cfg.eval_episodes, Rng::mix(cfg.seed, salt));
  };

  auto save_all = [&](const std::string& tag) {
    if (cfg.out_dir.empty()) return;
    const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / tag;
    std::filesystem::create_directories(dir);
    for (const auto& [name, net] : nets) save_checkpoint((dir / name).string(), net);
  };

  rollout::Collector<rollout::GridcraftEnv> grid_collector(
      env.grid_env, &env.goals, tc.num_lanes, Rng::mix(cfg.seed, 0xc0ecULL), cfg.autocurriculum);
  rollout::Collector<rollout::PointmazeEnv> maze_collector(
      env.maze_env, &env.goals, tc.num_lanes, Rng::mix(cfg.seed, 0xc0edULL), cfg.autocurriculum);

  std::vector<double> ckpt_pending = cfg.checkpoint_fracs;
  std::vector<double> comp_pending = cfg.component_eval_fracs;
  std::sort(ckpt_pending.begin(), ckpt_pending.end());
  std::sort(comp_pending.begin(), comp_pending.end());

  auto wall = [] { return std::chrono::steady_clock::now(); };
  auto t_last = wall();
  int64_t steps_since_eval = 0;
  int64_t next_eval = cfg.eval_every;
  std::map<std::string, double> last_losses;

  for (int64_t iter = 0; iter < iters; ++iter) {
    const int64_t step_before = iter * steps_per_iter;
    const int64_t step_after = std::min(cfg.total_steps, step_before + steps_per_iter);
    const float eps = algos::epsilon_schedule(step_before, cfg.total_steps, tc);
    const float progress = static_cast<float>(step_before) / static_cast<float>(cfg.total_steps);
    const float anneal = tc.anneal_clone ? (1.0f - progress) : 1.0f;
    std::vector<int64_t>* hits =
        (step_before < early_cutoff) ? &outcome.early_commanded_hits : nullptr;

    SegmentBatch batch;
    if (cfg.method == "leo_dpg") {
      batch = maze_collector.collect(policies::dpg_actor(&nets.at("pi"), tc.dpg_noise),
                                     tc.num_steps, hits);
    } else if (cfg.method == "ppo" || cfg.method == "dual_leo_ppo") {
      batch = grid_collector.collect(policies::categorical_actor(&nets.at("actor"), G),
                                     tc.num_steps, hits);
    } else if (cfg.method == "leo") {
      batch = grid_collector.collect(policies::eps_greedy_leo(&nets.at("leo"), eps), tc.num_steps,
                                     hits);
    } else if (cfg.method == "dual_leo_pqn") {
      batch = grid_collector.collect(
          policies::eps_greedy_dual(&nets.at("leo"), &nets.at("uvfa"), &tc, eps), tc.num_steps,
          hits);
    } else {
      batch = grid_collector.collect(policies::eps_greedy_uvfa(&nets.at("uvfa"), G, eps),
                                     tc.num_steps, hits);
    }

    if (cfg.method == "uvfa_pqn" || cfg.method == "uvfa_pqn_her") {
      const bool use_her = (cfg.method == "uvfa_pqn_her");
      const algos::PqnRows rows = algos::build_pqn_rows(
          batch, nets.at("uvfa"), tc, G,
          use_her ? algos::RelabelMode::Her : algos::RelabelMode::None,
          use_her ? &her : nullptr, use_her ? &her_rng : nullptr);
      last_losses["q_loss"] = algos::uvfa_sgd(nets.at("uvfa"), adam.at("uvfa"), rows, tc, update_rng);
    } else if (cfg.method == "leo") {
      const algos::LeoRows rows = algos::build_leo_rows(batch, nets.at("leo"), tc);
      last_losses["leo_loss"] = algos::leo_sgd(nets.at("leo"), adam.at("leo"), rows, tc, update_rng);
    } else if (cfg.method == "dual_leo_pqn") {
      // Two independent learners on the shared stream; no cross terms.
      const algos::LeoRows lrows = algos::build_leo_rows(batch, nets.at("leo"), tc);
      last_losses["leo_loss"] = algos::leo_sgd(nets.at("leo"), adam.at("leo"), lrows, tc, update_rng);
      const algos::PqnRows urows = algos::build_pqn_rows(batch, nets.at("uvfa"), tc, G);
      last_losses["uvfa_loss"] = algos::uvfa_sgd(nets.at("uvfa"), adam.at("uvfa"), urows, tc, update_rng);
    } else if (cfg.method == "ppo" || cfg.method == "dual_leo_ppo") {
      if (cfg.method == "dual_leo_ppo") {
        const algos::LeoRows lrows = algos::build_leo_rows(batch, nets.at("leo"), tc);
        last_losses["leo_loss"] = algos::leo_sgd(nets.at("leo"), adam.at("leo"), lrows, tc, update_rng);
      }
      const algos::PpoRows rows = algos::build_ppo_rows(batch, nets.at("critic"), tc, G);
      ppo_view.actor = std::move(nets.at("actor"));
      ppo_view.critic = std::move(nets.at("critic"));
      const algos::PpoUpdateStats stats = algos::ppo_update(
          ppo_view, adam.at("actor"), adam.at("critic"), rows, tc, update_rng,
          cfg.method == "dual_leo_ppo" ? &nets.at("leo") : nullptr, anneal);
      nets.at("actor") = std::move(ppo_view.actor);
      nets.at("critic") = std::move(ppo_view.critic);
      last_losses["policy_loss"] = stats.policy_loss;
      last_losses["value_loss"] = stats.value_loss;
      if (cfg.method == "dual_leo_ppo") {
        last_losses["aux_policy_loss"] = stats.aux_policy_loss;
        last_losses["aux_value_loss"] = stats.aux_value_loss;
      }
    } else {  // leo_dpg
      algos::DpgParams dpg{std::move(nets.at("q")), std::move(nets.at("pi"))};
      const std::vector<const Transition*> all_rows = algos::flatten_transitions(batch);
      algos::DpgUpdateStats stats;
      int n_updates = 0;
      algos::sgd_passes(static_cast<int>(all_rows.size()), tc, update_rng,
                 [&](const std::vector<int>& order, int start, int count) {
                   std::vector<const Transition*> mb(static_cast<size_t>(count));
                   for (int i = 0; i < count; ++i) {
                     mb[static_cast<size_t>(i)] =
                         all_rows[static_cast<size_t>(order[static_cast<size_t>(start + i)])];
                   }
                   const algos::DpgUpdateStats st =
                       algos::leo_dpg_update(dpg, adam.at("q"), adam.at("pi"), mb, tc);
                   stats.critic_loss += st.critic_loss;
                   stats.actor_loss += st.actor_loss;
                   ++n_updates;
                 });
      nets.at("q") = std::move(dpg.q);
      nets.at("pi") = std::move(dpg.pi);
      last_losses["critic_loss"] = stats.critic_loss / std::max(1, n_updates);
      last_losses["actor_loss"] = stats.actor_loss / std::max(1, n_updates);
    }

    steps_since_eval += step_after - step_before;

    // Checkpoints and component evaluations at their fractions.
    while (!ckpt_pending.empty() &&
           static_cast<double>(step_after) >= ckpt_pending.front() * cfg.total_steps) {
      save_all(frac_tag(ckpt_pending.front()));
      ckpt_pending.erase(ckpt_pending.begin());
    }
    while (!comp_pending.empty() &&
           static_cast<double>(step_after) >= comp_pending.front() * cfg.total_steps) {
      if (cfg.method == "dual_leo_pqn") {
        ComponentEval ce;
        ce.frac = comp_pending.front();
        ce.leo = rollout::evaluate(env.grid_env, policies::eps_greedy_leo(&nets.at("leo"), 0.0f),
                                   G, cfg.eval_episodes, Rng::mix(cfg.seed, 0xce0ULL));
        ce.uvfa = rollout::evaluate(env.grid_env,
                                    policies::eps_greedy_uvfa(&nets.at("uvfa"), G, 0.0f), G,
                                    cfg.eval_episodes, Rng::mix(cfg.seed, 0xce1ULL));
        outcome.component_evals.push_back(std::move(ce));
      }
      comp_pending.erase(comp_pending.begin());
    }

    const bool final_iter = (iter + 1 == iters);
    if (step_after >= next_eval || final_iter) {
      while (next_eval <= step_after) next_eval += cfg.eval_every;
      const auto t_now = wall();
      const double secs = std::chrono::duration<double>(t_now - t_last).count();
      const rollout::EvalReport report = eval_now(0x7e57ULL + static_cast<uint64_t>(iter));
      MetricsRecord rec;
      rec.step = step_after;
      rec.mean_success = report.mean_success;
      for (int g = 0; g < G; ++g) {
        rec.per_goal_success[env.goals.spec(g).name] = report.per_goal_success[static_cast<size_t>(g)];
      }
      rec.losses = last_losses;
      rec.sps = secs > 0.0 ? static_cast<double>(steps_since_eval) / secs : 0.0;
      outcome.metrics.push_back(std::move(rec));
      if (final_iter) outcome.final_eval = report;
      t_last = wall();
      steps_since_eval = 0;
    }
  }

  outcome.return_stats = env.is_gridcraft ? grid_collector.return_stats()
                                          : maze_collector.return_stats();
  outcome.nets = std::move(nets);
  return outcome;
}

}  // namespace agrl
