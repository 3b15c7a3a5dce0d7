#pragma once

#include <vector>

#include "agrl/adam.hpp"
#include "agrl/algos/qlearn.hpp"
#include "agrl/net.hpp"
#include "agrl/train_config.hpp"
#include "agrl/transition.hpp"

namespace agrl::algos {

// Deterministic all-goals actor-critic for continuous control.
//   pi: obs -> tanh-squashed actions, one action vector per goal
//       (head [num_goals, action_dim])
//   q:  (obs, action) -> one value per goal (head [num_goals, 1])
struct DpgParams {
  NetParams q;
  NetParams pi;
  int action_dim() const { return pi.head.num_actions; }
  int num_goals() const { return pi.head.num_goals; }
};

// Per-goal squashed actions for each observation row: [rows, G, action_dim].
Tensor dpg_policy_actions(const NetParams& pi, const Tensor& obs);

// Critic targets, gradient-free: y[n,g] = r + gamma*(1-d)*sigma(Q(s', pi_g(s')))_g.
// The G next-state evaluations are batched as one [rows*G] forward pass.
Tensor dpg_critic_targets(const DpgParams& params, const std::vector<const Transition*>& rows,
                          const TrainConfig& cfg);

// (sigma(Q(s, a_behavior)) - y)^2 averaged over rows and goals; the behavior
// action is shared across goals so this is a single forward and backward.
LossResult dpg_critic_loss(const NetParams& q, const Tensor& obs_actions, const Tensor& targets);
double dpg_critic_loss_f64(const NetParams& q, const Tensor& obs_actions, const Tensor& targets);

// Actor loss -mean_g sigma(Q(s, pi_g(s)))_g. The gradient needs a backward
// pass through the critic per goal head; they are batched as one inflated
// [rows*G] pass, but the cost stays O(G). Returns gradients for pi only.
LossResult dpg_actor_loss(const DpgParams& params, const Tensor& obs);
double dpg_actor_loss_f64(const DpgParams& params, const Tensor& obs);

struct DpgUpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

// One critic + one actor Adam step over the given transition rows. The
// per-goal inflation makes the cost O(rows * G), so callers minibatch.
DpgUpdateStats leo_dpg_update(DpgParams& params, AdamState& q_state, AdamState& pi_state,
                              const std::vector<const Transition*>& rows, const TrainConfig& cfg);

// Convenience: flat pointers over a segment batch.
std::vector<const Transition*> flatten_transitions(const SegmentBatch& batch);

}  // namespace agrl::algos
