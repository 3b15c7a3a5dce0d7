#pragma once

#include "agrl/net.hpp"
#include "agrl/rollout.hpp"
#include "agrl/train_config.hpp"

namespace agrl::policies {

// All policies batch one forward pass over the lane observations per step.
// Exploration draws come from the per-lane rngs, so lane streams stay
// deterministic under any thread count. Greedy ties break to the lowest
// action index. eps = 0 gives the evaluation-time greedy policy.

rollout::DiscretePolicy eps_greedy_uvfa(const NetParams* net, int num_goals, float eps);
rollout::DiscretePolicy eps_greedy_leo(const NetParams* net, float eps);
rollout::DiscretePolicy eps_greedy_dual(const NetParams* leo, const NetParams* uvfa,
                                        const TrainConfig* cfg, float eps);

// Samples from the softmax and records the behavior log-prob.
rollout::DiscretePolicy categorical_actor(const NetParams* actor, int num_goals);
// Deterministic argmax over logits.
rollout::DiscretePolicy greedy_actor(const NetParams* actor, int num_goals);

// Commanded-head action of the all-goals deterministic policy plus Gaussian
// exploration noise, clipped to the unit box. noise_sigma = 0 is greedy.
rollout::ContinuousPolicy dpg_actor(const NetParams* pi, float noise_sigma);

}  // namespace agrl::policies
