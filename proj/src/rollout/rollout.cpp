#include "agrl/rollout.hpp"

#include "agrl/errors.hpp"

namespace agrl::rollout {

std::vector<ContEvalEpisode> evaluate_continuous(const pointmaze::MazeSpec& spec,
                                                 const QuantGrid& grid, double eps_reach,
                                                 const ContinuousPolicy& policy, int episodes,
                                                 uint64_t seed) {
  if (episodes < 1) throw ConfigError("evaluate_continuous: episodes must be >= 1");
  struct Lane {
    pointmaze::PointState state;
    ContEvalEpisode record;
    bool done = false;
  };
  std::vector<Lane> lanes(static_cast<size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    Rng rng(Rng::mix(seed, static_cast<uint64_t>(e)));
    auto [state, goal] = pointmaze::reset(spec, rng);
    Lane& lane = lanes[static_cast<size_t>(e)];
    lane.state = state;
    lane.record.goal = goal;
    lane.record.quantized = quantize_goal(goal.x, goal.y, grid);
  }

  std::vector<int> active;
  std::vector<Rng> dummy_rngs(static_cast<size_t>(episodes), Rng(0));
  std::vector<GoalId> goals;
  std::vector<std::array<float, 2>> actions;
  const double r2 = eps_reach * eps_reach;

  for (;;) {
    active.clear();
    for (int e = 0; e < episodes; ++e) {
      if (!lanes[static_cast<size_t>(e)].done) active.push_back(e);
    }
    if (active.empty()) break;
    const int n = static_cast<int>(active.size());
    Tensor obs = Tensor::zeros({n, pointmaze::observation_size()});
    goals.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Lane& lane = lanes[static_cast<size_t>(active[static_cast<size_t>(i)])];
      pointmaze::write_observation(spec, lane.state, obs.row(i));
      goals[static_cast<size_t>(i)] = lane.record.quantized;
    }
    actions.assign(static_cast<size_t>(n), {0.0f, 0.0f});
    policy(obs, goals, dummy_rngs, actions);
    for (int i = 0; i < n; ++i) {
      Lane& lane = lanes[static_cast<size_t>(active[static_cast<size_t>(i)])];
      lane.state = pointmaze::step(spec, lane.state, actions[static_cast<size_t>(i)][0],
                                   actions[static_cast<size_t>(i)][1]);
      double cx, cy;
      grid.center(grid.cells[static_cast<size_t>(lane.record.quantized)], &cx, &cy);
      const double dx = lane.state.x - cx;
      const double dy = lane.state.y - cy;
      if (dx * dx + dy * dy <= r2) lane.record.quantized_success = true;
      if (pointmaze::success(lane.state, lane.record.goal, spec.success_eps)) {
        lane.record.continuous_success = true;
      }
      // The quantization guarantee is judged on full episodes; run to the
      // step cap rather than stopping at first success.
      if (lane.state.step_count >= spec.t_max) lane.done = true;
    }
  }

  std::vector<ContEvalEpisode> out;
  out.reserve(static_cast<size_t>(episodes));
  for (const Lane& lane : lanes) out.push_back(lane.record);
  return out;
}

}  // namespace agrl::rollout
