#pragma once

#include <cstdint>
#include <vector>

#include "agrl/goalspace.hpp"
#include "agrl/gridcraft.hpp"

namespace agrl::algos {

struct TabularConfig {
  float gamma = 0.95f;
  float lr = 0.1f;
  float eps = 1.0f;  // behavior epsilon (1.0 = uniform random actions)
  int t_max = 48;
  int64_t max_states = 1 << 20;  // enumeration overflow guard
};

// The elementary scalar update, shared with the equivalence oracles so both
// code paths round identically:
//   q + lr * (r + gamma * (1 - done) * max_next - q)
float tabular_q_update(float q, float reward, bool done, float max_next, float gamma, float lr);

struct TabularStep {
  int s = 0;       // state index at time t
  int a = 0;       // action taken
  int s2 = 0;      // state index after the step
  GoalMask achieved;
  bool episode_done = false;
};

struct TabularResult {
  int num_states = 0;
  int num_goals = 0;
  int num_actions = 0;
  // Row-major [num_states, num_goals, num_actions].
  std::vector<float> q;
  // The exact experience stream the table was trained on, for replay oracles.
  std::vector<TabularStep> stream;

  float& at(int s, int g, int a) {
    return q[(static_cast<size_t>(s) * num_goals + g) * num_actions + a];
  }
  float at(int s, int g, int a) const {
    return q[(static_cast<size_t>(s) * num_goals + g) * num_actions + a];
  }
};

// Online tabular learner that applies the one-step update to every goal
// slice on each transition. Behavior is epsilon-greedy on the commanded
// goal's slice (commanded goal resampled uniformly per episode), the world
// regenerates from the same seed each episode, and states are discovered
// lazily by exact serialization (step_count excluded). Deterministic in
// (world_seed, rng_seed).
TabularResult tabular_leo_q_learn(uint64_t world_seed, int world_size, const GoalSet& goals,
                                  int64_t num_transitions, const TabularConfig& cfg,
                                  uint64_t rng_seed);

}  // namespace agrl::algos
