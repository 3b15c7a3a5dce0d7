#include "agrl/algos/tabular.hpp"

#include <string>
#include <unordered_map>

#include "agrl/errors.hpp"
#include "agrl/gridcraft_goals.hpp"

namespace agrl::algos {

float tabular_q_update(float q, float reward, bool done, float max_next, float gamma, float lr) {
  const float target = reward + gamma * (done ? 0.0f : 1.0f) * max_next;
  return q + lr * (target - q);
}

namespace {

// Exact state key; step_count and rng_state excluded so the space stays
// finite over an episode-bounded run.
std::string state_key(const gridcraft::WorldState& w) {
  std::string key;
  key.reserve(w.grid.size() + 8);
  for (gridcraft::Block b : w.grid) key.push_back(static_cast<char>(b));
  key.push_back(static_cast<char>(w.agent_row));
  key.push_back(static_cast<char>(w.agent_col));
  key.push_back(static_cast<char>(w.facing));
  key.push_back(static_cast<char>(w.inventory.wood));
  key.push_back(static_cast<char>(w.inventory.stone));
  key.push_back(static_cast<char>(w.inventory.coal));
  key.push_back(static_cast<char>((w.tools.wood_pickaxe ? 1 : 0) | (w.tools.stone_pickaxe ? 2 : 0)));
  return key;
}

}  // namespace

TabularResult tabular_leo_q_learn(uint64_t world_seed, int world_size, const GoalSet& goals,
                                  int64_t num_transitions, const TabularConfig& cfg,
                                  uint64_t rng_seed) {
  TabularResult res;
  res.num_goals = goals.size();
  res.num_actions = gridcraft::kNumActions;

  std::unordered_map<std::string, int> index;
  auto state_index = [&](const gridcraft::WorldState& w) {
    const auto [it, inserted] = index.try_emplace(state_key(w), static_cast<int>(index.size()));
    if (inserted) {
      if (static_cast<int64_t>(index.size()) > cfg.max_states) {
        throw NumericError("tabular_leo_q_learn: state space exceeded max_states");
      }
      res.q.resize(index.size() * static_cast<size_t>(res.num_goals) * res.num_actions, 0.0f);
    }
    return it->second;
  };

  Rng rng(Rng::mix(rng_seed, 0x7ab1eULL));
  gridcraft::WorldState world = gridcraft::generate_world(world_seed, world_size);
  int s = state_index(world);
  GoalId commanded = static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(goals.size())));
  int episode_step = 0;

  for (int64_t i = 0; i < num_transitions; ++i) {
    // Epsilon-greedy on the commanded slice, ties to the lowest action.
    int a;
    if (rng.uniform() < cfg.eps) {
      a = static_cast<int>(rng.uniform_int(gridcraft::kNumActions));
    } else {
      a = 0;
      for (int cand = 1; cand < res.num_actions; ++cand) {
        if (res.at(s, commanded, cand) > res.at(s, commanded, a)) a = cand;
      }
    }

    const gridcraft::WorldState next_world = gridcraft::step(world, static_cast<gridcraft::Action>(a));
    const int s2 = state_index(next_world);
    episode_step += 1;
    const bool episode_done = episode_step >= cfg.t_max;
    const GoalMask achieved = gridcraft::achieved_goals(next_world, goals);

    TabularStep rec;
    rec.s = s;
    rec.a = a;
    rec.s2 = s2;
    rec.achieved = achieved;
    rec.episode_done = episode_done;
    res.stream.push_back(rec);

    // The all-goals update: every goal slice learns from this transition.
    for (int g = 0; g < res.num_goals; ++g) {
      const float reward = achieved[static_cast<size_t>(g)] ? 1.0f : 0.0f;
      const bool done = achieved[static_cast<size_t>(g)] || episode_done;
      float max_next = res.at(s2, g, 0);
      for (int cand = 1; cand < res.num_actions; ++cand) {
        max_next = std::max(max_next, res.at(s2, g, cand));
      }
      res.at(s, g, a) = tabular_q_update(res.at(s, g, a), reward, done, max_next, cfg.gamma, cfg.lr);
    }

    if (episode_done) {
      world = gridcraft::generate_world(world_seed, world_size);
      s = state_index(world);
      commanded = static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(goals.size())));
      episode_step = 0;
    } else {
      world = next_world;
      s = s2;
      if (achieved[static_cast<size_t>(commanded)]) {
        commanded = static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(goals.size())));
      }
    }
  }

  res.num_states = static_cast<int>(index.size());
  return res;
}

}  // namespace agrl::algos
