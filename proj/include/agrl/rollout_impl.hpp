#pragma once

// Template bodies for rollout.hpp; not a public include.

#include <cstring>

#include "agrl/errors.hpp"

namespace agrl::rollout {

template <typename Env>
template <typename Policy>
SegmentBatch Collector<Env>::collect(const Policy& policy, int num_steps,
                                     std::vector<int64_t>* commanded_hits) {
  const int L = static_cast<int>(lanes_.size());
  const int obs_dim = env_.obs_dim();
  SegmentBatch batch(static_cast<size_t>(L));
  for (Segment& seg : batch) seg.transitions.reserve(static_cast<size_t>(num_steps));

  // Goal sampling during the collect reads this snapshot; the live tracker
  // is updated once at the end.
  const SeenGoalTracker snapshot = tracker_;

  Tensor obs = Tensor::zeros({L, obs_dim});
  std::vector<GoalId> commanded(static_cast<size_t>(L));
  std::vector<Rng> policy_rngs;  // lane rngs are used in-place below
  std::vector<int> actions(static_cast<size_t>(L), 0);
  std::vector<float> logp(static_cast<size_t>(L), 0.0f);
  std::vector<typename Env::Action> cont_actions;
  if constexpr (!std::is_same_v<typename Env::Action, int>) {
    cont_actions.resize(static_cast<size_t>(L));
  }
  std::vector<ReturnBoundStats> lane_stats(static_cast<size_t>(L));
  std::vector<Rng> lane_rngs;
  lane_rngs.reserve(static_cast<size_t>(L));
  for (Lane& lane : lanes_) lane_rngs.push_back(lane.rng);

  for (int t = 0; t < num_steps; ++t) {
#pragma omp parallel for schedule(static)
    for (int l = 0; l < L; ++l) {
      env_.write_obs(lanes_[static_cast<size_t>(l)].state, obs.row(l));
      commanded[static_cast<size_t>(l)] = lanes_[static_cast<size_t>(l)].commanded;
    }
    if constexpr (std::is_same_v<typename Env::Action, int>) {
      policy(obs, commanded, lane_rngs, actions, logp);
    } else {
      policy(obs, commanded, lane_rngs, cont_actions);
    }

#pragma omp parallel for schedule(static)
    for (int l = 0; l < L; ++l) {
      Lane& lane = lanes_[static_cast<size_t>(l)];
      typename Env::State next = [&] {
        if constexpr (std::is_same_v<typename Env::Action, int>) {
          return env_.step(lane.state, actions[static_cast<size_t>(l)]);
        } else {
          return env_.step(lane.state, cont_actions[static_cast<size_t>(l)]);
        }
      }();
      const GoalMask achieved = env_.achieved(next);
      const bool episode_done = env_.terminal(next);

      Transition tr;
      tr.obs.assign(obs.row(l), obs.row(l) + obs_dim);
      tr.next_obs.resize(static_cast<size_t>(obs_dim));
      env_.write_obs(next, tr.next_obs.data());
      if constexpr (std::is_same_v<typename Env::Action, int>) {
        tr.action = actions[static_cast<size_t>(l)];
        tr.logp = logp[static_cast<size_t>(l)];
      } else {
        tr.cont_action.assign(cont_actions[static_cast<size_t>(l)].begin(),
                              cont_actions[static_cast<size_t>(l)].end());
      }
      tr.commanded = lane.commanded;
      tr.achieved = achieved;
      tr.episode_done = episode_done;
      tr.reward_vec = reward_term_vector(achieved, episode_done);
      lane.episode_return += tr.reward_vec.rewards[static_cast<size_t>(lane.commanded)];
      const bool commanded_achieved = achieved[static_cast<size_t>(lane.commanded)] != 0;
      batch[static_cast<size_t>(l)].transitions.push_back(std::move(tr));

      if (episode_done) {
        lane_stats[static_cast<size_t>(l)].record(lane.episode_return);
        lane.resets += 1;
        lane.state = env_.reset(Rng::mix(lane.seed, static_cast<uint64_t>(lane.resets)));
        lane.commanded = sample_command_goal(snapshot, *goal_set_, lane_rngs[static_cast<size_t>(l)],
                                             fallback_, autocurriculum_);
        lane.episode_return = 0.0f;
      } else if (commanded_achieved) {
        // First return, then explore: pseudo-terminate the commanded episode
        // and continue from the same environment state.
        lane_stats[static_cast<size_t>(l)].record(lane.episode_return);
        lane.state = next;
        lane.commanded = sample_command_goal(snapshot, *goal_set_, lane_rngs[static_cast<size_t>(l)],
                                             fallback_, autocurriculum_);
        lane.episode_return = 0.0f;
      } else {
        lane.state = next;
      }
    }
  }

  for (int l = 0; l < L; ++l) {
    lanes_[static_cast<size_t>(l)].rng = lane_rngs[static_cast<size_t>(l)];
    return_stats_.merge(lane_stats[static_cast<size_t>(l)]);
    batch[static_cast<size_t>(l)].bootstrap_obs =
        batch[static_cast<size_t>(l)].transitions.back().next_obs;
  }
  // Single tracker serialization point.
  for (const Segment& seg : batch) {
    for (const Transition& tr : seg.transitions) {
      tracker_update(tracker_, tr.achieved);
      if (commanded_hits &&
          tr.reward_vec.rewards[static_cast<size_t>(tr.commanded)] == 1.0f) {
        (*commanded_hits)[static_cast<size_t>(tr.commanded)] += 1;
      }
    }
  }
  return batch;
}

template <typename Env, typename Policy>
EvalReport evaluate(const Env& env, const Policy& policy, int num_goals, int episodes_per_goal,
                    uint64_t seed) {
  if (episodes_per_goal < 1) throw ConfigError("evaluate: episodes_per_goal must be >= 1");
  const int total = num_goals * episodes_per_goal;
  const int obs_dim = env.obs_dim();

  struct EvalLane {
    typename Env::State state;
    GoalId goal;
    bool success = false;
    bool done = false;
  };
  std::vector<EvalLane> lanes(static_cast<size_t>(total));
  for (int g = 0; g < num_goals; ++g) {
    for (int e = 0; e < episodes_per_goal; ++e) {
      EvalLane& lane = lanes[static_cast<size_t>(g * episodes_per_goal + e)];
      lane.goal = static_cast<GoalId>(g);
      lane.state = env.reset(Rng::mix(seed, static_cast<uint64_t>(g) * 100003ULL +
                                                static_cast<uint64_t>(e)));
      // A goal can hold in the very first state.
      if (env.achieved(lane.state)[static_cast<size_t>(g)]) {
        lane.success = true;
        lane.done = true;
      }
    }
  }

  std::vector<int> active;
  active.reserve(static_cast<size_t>(total));
  std::vector<Rng> dummy_rngs(static_cast<size_t>(total), Rng(0));
  std::vector<GoalId> goals_buf;
  std::vector<int> actions;
  std::vector<float> logp;
  std::vector<typename Env::Action> cont_actions;

  for (;;) {
    active.clear();
    for (int i = 0; i < total; ++i) {
      if (!lanes[static_cast<size_t>(i)].done) active.push_back(i);
    }
    if (active.empty()) break;
    const int n = static_cast<int>(active.size());
    Tensor obs = Tensor::zeros({n, obs_dim});
    goals_buf.resize(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const EvalLane& lane = lanes[static_cast<size_t>(active[static_cast<size_t>(i)])];
      env.write_obs(lane.state, obs.row(i));
      goals_buf[static_cast<size_t>(i)] = lane.goal;
    }
    if constexpr (std::is_same_v<typename Env::Action, int>) {
      actions.assign(static_cast<size_t>(n), 0);
      logp.assign(static_cast<size_t>(n), 0.0f);
      policy(obs, goals_buf, dummy_rngs, actions, logp);
    } else {
      cont_actions.assign(static_cast<size_t>(n), typename Env::Action{});
      policy(obs, goals_buf, dummy_rngs, cont_actions);
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      EvalLane& lane = lanes[static_cast<size_t>(active[static_cast<size_t>(i)])];
      if constexpr (std::is_same_v<typename Env::Action, int>) {
        lane.state = env.step(lane.state, actions[static_cast<size_t>(i)]);
      } else {
        lane.state = env.step(lane.state, cont_actions[static_cast<size_t>(i)]);
      }
      if (env.achieved(lane.state)[static_cast<size_t>(lane.goal)]) {
        lane.success = true;
        lane.done = true;
      } else if (env.terminal(lane.state)) {
        lane.done = true;
      }
    }
  }

  EvalReport report;
  report.episodes_per_goal = episodes_per_goal;
  report.per_goal_success.assign(static_cast<size_t>(num_goals), 0.0);
  for (int g = 0; g < num_goals; ++g) {
    int hits = 0;
    for (int e = 0; e < episodes_per_goal; ++e) {
      hits += lanes[static_cast<size_t>(g * episodes_per_goal + e)].success ? 1 : 0;
    }
    report.per_goal_success[static_cast<size_t>(g)] =
        static_cast<double>(hits) / episodes_per_goal;
  }
  double mean = 0.0;
  for (double s : report.per_goal_success) mean += s;
  report.mean_success = num_goals > 0 ? mean / num_goals : 0.0;
  return report;
}

}  // namespace agrl::rollout
