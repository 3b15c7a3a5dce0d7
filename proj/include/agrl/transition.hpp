#pragma once

#include <vector>

#include "agrl/goalspace.hpp"

namespace agrl {

// One environment transition with the full per-goal channels. `achieved` and
// `reward_vec` describe the state entered (next_obs); rewards[g] equals the
// achieved bit by construction.
struct Transition {
  std::vector<float> obs;
  std::vector<float> next_obs;
  int action = 0;                  // discrete index
  std::vector<float> cont_action;  // continuous controls (empty for discrete)
  float logp = 0.0f;               // behavior log-prob where the algorithm needs it
  GoalId commanded = 0;
  GoalMask achieved;               // bit g: goal g holds at the next state
  RewardTermVector reward_vec;
  bool episode_done = false;       // true termination (episode step cap)
};

// Fixed-length, time-contiguous slice of one environment lane.
// bootstrap_obs = the observation after the final transition.
struct Segment {
  std::vector<Transition> transitions;
  std::vector<float> bootstrap_obs;

  int length() const { return static_cast<int>(transitions.size()); }
};

using SegmentBatch = std::vector<Segment>;

}  // namespace agrl
