#include "agrl/bench.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "agrl/algos/training.hpp"
#include "agrl/errors.hpp"
#include "agrl/policies.hpp"
#include "agrl/rollout.hpp"

namespace agrl::bench {

namespace {

// Gridcraft with the achieved mask tiled up to an arbitrary goal count, so
// throughput can be measured at goal-set sizes the concrete environment does
// not enumerate.
struct TiledGridEnv {
  using State = gridcraft::WorldState;
  using Action = int;

  rollout::GridcraftEnv base;
  int total_goals = 0;

  int obs_dim() const { return base.obs_dim(); }
  State reset(uint64_t seed) const { return base.reset(seed); }
  State step(const State& s, int action) const { return base.step(s, action); }
  void write_obs(const State& s, float* out) const { base.write_obs(s, out); }
  bool terminal(const State& s) const { return base.terminal(s); }
  GoalMask achieved(const State& s) const {
    const GoalMask m = base.achieved(s);
    GoalMask tiled(static_cast<size_t>(total_goals));
    for (int g = 0; g < total_goals; ++g) {
      tiled[static_cast<size_t>(g)] = m[static_cast<size_t>(g) % m.size()];
    }
    return tiled;
  }
};

GoalSet tiled_goal_set(const GoalSet& base, int total) {
  GoalSet out;
  for (int g = 0; g < total; ++g) {
    GoalSpec spec = base.goals[static_cast<size_t>(g) % base.goals.size()];
    spec.name = "bench/g" + std::to_string(g);
    spec.category = "bench";
    out.goals.push_back(std::move(spec));
  }
  out.validate();
  return out;
}

double measure_method(const std::string& method, int goal_count, const BenchOptions& opt) {
  const TrainConfig& tc = opt.train;
  const GoalSet base_goals = gridcraft::make_goal_set(gridcraft::GoalPreset::Small);
  const GoalSet goals = tiled_goal_set(base_goals, goal_count);
  TiledGridEnv env{rollout::GridcraftEnv{10, &base_goals, gridcraft::kDefaultTMax}, goal_count};
  rollout::Collector<TiledGridEnv> collector(env, &goals, tc.num_lanes,
                                             Rng::mix(opt.seed, 0xbe), /*autocurriculum=*/true);

  const int G = goal_count;
  const std::vector<int> widths(static_cast<size_t>(tc.net_layers), tc.net_width);
  NetParams uvfa;
  NetParams leo;
  AdamState adam_state;
  if (method == "leo") {
    leo = make_mlp(env.obs_dim(), widths, {G, gridcraft::kNumActions}, true, Rng::mix(opt.seed, 1));
    adam_state = make_adam_state(leo);
  } else {
    uvfa = make_mlp(algos::uvfa_input_dim(env.obs_dim(), G), widths, {1, gridcraft::kNumActions},
                    true, Rng::mix(opt.seed, 2));
    adam_state = make_adam_state(uvfa);
  }
  Rng update_rng(Rng::mix(opt.seed, 3));
  const float eps = tc.eps_start;

  const int64_t steps_per_iter = static_cast<int64_t>(tc.num_lanes) * tc.num_steps;
  const int64_t iters = std::max<int64_t>(1, (opt.steps + steps_per_iter - 1) / steps_per_iter);

  auto run_iter = [&](bool timed, double* update_seconds) {
    SegmentBatch batch;
    if (method == "leo") {
      batch = collector.collect(policies::eps_greedy_leo(&leo, eps), tc.num_steps);
    } else {
      batch = collector.collect(policies::eps_greedy_uvfa(&uvfa, G, eps), tc.num_steps);
    }
    const auto t0 = std::chrono::steady_clock::now();
    if (method == "leo") {
      const algos::LeoRows rows = algos::build_leo_rows(batch, leo, tc);
      algos::leo_sgd(leo, adam_state, rows, tc, update_rng);
    } else if (method == "naive_relabel") {
      const algos::PqnRows rows =
          algos::build_pqn_rows(batch, uvfa, tc, G, algos::RelabelMode::Naive);
      algos::uvfa_sgd(uvfa, adam_state, rows, tc, update_rng);
    } else if (method == "single_goal") {
      const algos::PqnRows rows = algos::build_pqn_rows(batch, uvfa, tc, G);
      algos::uvfa_sgd(uvfa, adam_state, rows, tc, update_rng);
    } else {
      throw ConfigError("bench: unknown method '" + method + "'");
    }
    if (timed && update_seconds) {
      *update_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  run_iter(false, nullptr);  // warmup
  double update_seconds = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int64_t i = 0; i < iters; ++i) run_iter(true, &update_seconds);
  const double full_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double measured = opt.update_only ? update_seconds : full_seconds;
  return static_cast<double>(iters * steps_per_iter) / measured;
}

}  // namespace

std::vector<BenchResult> run_bench(const BenchOptions& opt) {
  const std::set<std::string> known{"single_goal", "leo", "naive_relabel"};
  for (const auto& m : opt.methods) {
    if (!known.count(m)) throw ConfigError("bench: unknown method '" + m + "'");
  }
  for (int g : opt.goal_counts) {
    if (g < 1) throw ConfigError("bench: goal counts must be >= 1");
  }
  std::vector<BenchResult> results;
  for (int g : opt.goal_counts) {
    for (const auto& m : opt.methods) {
      BenchResult r;
      r.goal_count = g;
      r.method = m;
      r.sps = measure_method(m, g, opt);
      results.push_back(std::move(r));
    }
  }
  return results;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::ostringstream os;
  os << "goal_count,method,sps\n";
  for (const BenchResult& r : results) {
    os << r.goal_count << "," << r.method << "," << static_cast<int64_t>(r.sps) << "\n";
  }
  return os.str();
}

}  // namespace agrl::bench
