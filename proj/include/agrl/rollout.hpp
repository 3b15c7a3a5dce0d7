#pragma once

#include <array>
#include <functional>
#include <vector>

#include "agrl/goalspace.hpp"
#include "agrl/gridcraft.hpp"
#include "agrl/gridcraft_goals.hpp"
#include "agrl/pointmaze.hpp"
#include "agrl/rng.hpp"
#include "agrl/tensor.hpp"
#include "agrl/transition.hpp"

namespace agrl::rollout {
using agrl::Tensor;
}

namespace agrl::rollout {

// Commanded-episode return accounting. Every per-commanded-episode return
// must land in {0, 1}; violations are counted instead of silently dropped so
// the acceptance suite can assert zero across all runs.
struct ReturnBoundStats {
  int64_t episodes = 0;
  int64_t violations = 0;
  void record(float episode_return) {
    episodes += 1;
    if (!(episode_return == 0.0f || episode_return == 1.0f)) violations += 1;
  }
  void merge(const ReturnBoundStats& other) {
    episodes += other.episodes;
    violations += other.violations;
  }
};

// Batched action selection: the policy fills one action per lane from the
// observation matrix [lanes, obs_dim], using the per-lane rngs for any
// exploration draws. logp may be ignored by value-based policies.
using DiscretePolicy =
    std::function<void(const Tensor& obs, const std::vector<GoalId>& commanded,
                       std::vector<Rng>& lane_rngs, std::vector<int>& actions,
                       std::vector<float>& logp)>;
using ContinuousPolicy =
    std::function<void(const Tensor& obs, const std::vector<GoalId>& commanded,
                       std::vector<Rng>& lane_rngs, std::vector<std::array<float, 2>>& actions)>;

// Environment adapters. Both expose value-typed states, pure steps, and
// observation/goal evaluation; lanes advance independently and in parallel.
struct GridcraftEnv {
  using State = gridcraft::WorldState;
  using Action = int;

  int world_size = 10;
  const GoalSet* goals = nullptr;
  int t_max = gridcraft::kDefaultTMax;

  int obs_dim() const { return gridcraft::observation_size(); }
  State reset(uint64_t seed) const { return gridcraft::generate_world(seed, world_size); }
  State step(const State& s, int action) const {
    return gridcraft::step(s, static_cast<gridcraft::Action>(action));
  }
  void write_obs(const State& s, float* out) const { gridcraft::write_observation(s, out); }
  GoalMask achieved(const State& s) const { return gridcraft::achieved_goals(s, *goals); }
  bool terminal(const State& s) const { return s.step_count >= t_max; }
};

struct PointmazeEnv {
  using State = pointmaze::PointState;
  using Action = std::array<float, 2>;

  const pointmaze::MazeSpec* spec = nullptr;
  const QuantGrid* grid = nullptr;
  double eps_reach = 0.14;

  int obs_dim() const { return pointmaze::observation_size(); }
  State reset(uint64_t seed) const {
    Rng rng(Rng::mix(seed, 0x9a2eULL));
    return pointmaze::reset(*spec, rng).first;
  }
  State step(const State& s, const Action& a) const {
    return pointmaze::step(*spec, s, a[0], a[1]);
  }
  void write_obs(const State& s, float* out) const {
    pointmaze::write_observation(*spec, s, out);
  }
  GoalMask achieved(const State& s) const {
    return pointmaze::achieved_goals(s, *grid, eps_reach);
  }
  bool terminal(const State& s) const { return s.step_count >= spec->t_max; }
};

// Vectorized driver: fixed lanes, commanded-goal bookkeeping, first-return-
// then-explore pseudo-termination, per-goal reward/done channels on every
// transition. The seen-goal tracker is read from a snapshot taken at the
// start of each collect() and updated exactly once at the end, which is the
// single serialization point.
template <typename Env>
class Collector {
 public:
  struct Lane {
    typename Env::State state;
    GoalId commanded = 0;
    float episode_return = 0.0f;
    int64_t resets = 0;
    uint64_t seed = 0;
    Rng rng{0};
  };

  Collector(Env env, const GoalSet* goal_set, int num_lanes, uint64_t seed, bool autocurriculum,
            GoalId fallback_goal = 0)
      : env_(std::move(env)),
        goal_set_(goal_set),
        tracker_(goal_set->size()),
        autocurriculum_(autocurriculum),
        fallback_(fallback_goal),
        seed_(seed) {
    lanes_.resize(static_cast<size_t>(num_lanes));
    for (int i = 0; i < num_lanes; ++i) {
      Lane& lane = lanes_[static_cast<size_t>(i)];
      lane.seed = Rng::mix(seed, static_cast<uint64_t>(i));
      lane.rng = Rng(Rng::mix(lane.seed, 0xac7ULL));
      lane.state = env_.reset(Rng::mix(lane.seed, static_cast<uint64_t>(lane.resets)));
      lane.commanded = fallback_;
    }
  }

  // Steps every lane num_steps times with the policy and returns one segment
  // per lane. Counts commanded-channel achievements per goal into
  // commanded_hits (when non-null), used by the hard-goal bookkeeping.
  template <typename Policy>
  SegmentBatch collect(const Policy& policy, int num_steps,
                       std::vector<int64_t>* commanded_hits = nullptr);

  const SeenGoalTracker& tracker() const { return tracker_; }
  const ReturnBoundStats& return_stats() const { return return_stats_; }
  const std::vector<Lane>& lanes() const { return lanes_; }
  int num_goals() const { return tracker_.size(); }

 private:
  Env env_;
  const GoalSet* goal_set_;
  std::vector<Lane> lanes_;
  SeenGoalTracker tracker_;
  ReturnBoundStats return_stats_;
  bool autocurriculum_;
  GoalId fallback_;
  uint64_t seed_;
};

struct EvalReport {
  std::vector<double> per_goal_success;
  double mean_success = 0.0;
  int episodes_per_goal = 0;
};

// Greedy evaluation: every goal is commanded for whole episodes (no
// resampling); success means the goal's bit held at any step before the
// cap. Lanes for all (goal, episode) pairs advance together so the policy
// batches its forward passes. Never touches trackers or parameters.
template <typename Env, typename Policy>
EvalReport evaluate(const Env& env, const Policy& policy, int num_goals, int episodes_per_goal,
                    uint64_t seed);

// Continuous-goal evaluation protocol: goals are sampled from free space,
// internally snapped to the grid for the policy, but success is judged on
// the true continuous goal. One record per episode.
struct ContEvalEpisode {
  pointmaze::ContGoal goal;
  GoalId quantized = 0;
  bool quantized_success = false;  // reached within eps_reach of the cell center
  bool continuous_success = false;  // reached within success_eps of the true goal
};
std::vector<ContEvalEpisode> evaluate_continuous(const pointmaze::MazeSpec& spec,
                                                 const QuantGrid& grid, double eps_reach,
                                                 const ContinuousPolicy& policy, int episodes,
                                                 uint64_t seed);

}  // namespace agrl::rollout

#include "agrl/rollout_impl.hpp"
