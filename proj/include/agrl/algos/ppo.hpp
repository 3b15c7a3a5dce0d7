#pragma once

#include <vector>

#include "agrl/adam.hpp"
#include "agrl/algos/qlearn.hpp"
#include "agrl/net.hpp"
#include "agrl/train_config.hpp"
#include "agrl/transition.hpp"

namespace agrl::algos {

// Separate actor and critic MLPs, both goal-as-input shaped. The critic's
// value head is sigmoid-bounded like every other value estimate here.
struct PpoParams {
  NetParams actor;
  NetParams critic;
};

// GAE(lambda) along one channel:
//   delta_t = r_t + gamma*(1-d_t)*V_{t+1} - V_t
//   A_t     = delta_t + gamma*lambda*(1-d_t)*A_{t+1}
// values has one entry per step; v_bootstrap stands in for V_T.
struct GaeOut {
  std::vector<float> advantages;
  std::vector<float> returns;  // advantage + value
};
GaeOut gae(const std::vector<float>& rewards, const std::vector<uint8_t>& dones,
           const std::vector<float>& values, float v_bootstrap, float gamma, float lambda);

// Flattened training rows for one update phase.
struct PpoRows {
  Tensor input;     // [N, obs+G] actor/critic input
  Tensor raw_obs;   // [N, obs] for the all-goals teacher
  std::vector<GoalId> goals;
  std::vector<int> actions;
  std::vector<float> logp_old;
  std::vector<float> advantages;
  std::vector<float> returns;
};

// Computes values with the current critic, runs GAE per segment on the
// commanded channel, and flattens the batch.
PpoRows build_ppo_rows(const SegmentBatch& batch, const NetParams& critic,
                       const TrainConfig& cfg, int num_goals);

// Clipped surrogate with entropy bonus. Advantages are normalized by the
// caller. Throws NumericError when a ratio goes non-finite.
LossResult ppo_policy_loss(const NetParams& actor, const Tensor& input,
                           const std::vector<int>& actions, const std::vector<float>& logp_old,
                           const std::vector<float>& advantages, const TrainConfig& cfg);
double ppo_policy_loss_f64(const NetParams& actor, const Tensor& input,
                           const std::vector<int>& actions, const std::vector<float>& logp_old,
                           const std::vector<float>& advantages, const TrainConfig& cfg);

// vf_coef * mse(sigmoid(V), returns).
LossResult ppo_value_loss(const NetParams& critic, const Tensor& input,
                          const std::vector<float>& returns, const TrainConfig& cfg);
double ppo_value_loss_f64(const NetParams& critic, const Tensor& input,
                          const std::vector<float>& returns, const TrainConfig& cfg);

// Cloning losses pushing the actor toward the teacher's greedy action and
// the critic toward the teacher's value estimate. The teacher is frozen: no
// gradient flows into it. Both terms carry their coefficient and the anneal
// factor (1 at the start of training, linearly to 0 when anneal_clone).
struct AuxLossResult {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  NetGrads actor_grads;
  NetGrads critic_grads;
};
AuxLossResult dual_leo_ppo_losses(const PpoParams& params, const NetParams& leo,
                                  const Tensor& input, const Tensor& raw_obs,
                                  const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                  float anneal_factor);
double dual_leo_ppo_policy_loss_f64(const NetParams& actor, const NetParams& leo,
                                    const Tensor& input, const Tensor& raw_obs,
                                    const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                    float anneal_factor);
double dual_leo_ppo_value_loss_f64(const NetParams& critic, const NetParams& leo,
                                   const Tensor& input, const Tensor& raw_obs,
                                   const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                   float anneal_factor);

struct PpoUpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double aux_policy_loss = 0.0;
  double aux_value_loss = 0.0;
};

// num_epochs x minibatch passes with per-minibatch advantage normalization.
// When leo_teacher is set the cloning losses are added with anneal_factor.
PpoUpdateStats ppo_update(PpoParams& params, AdamState& actor_state, AdamState& critic_state,
                          const PpoRows& rows, const TrainConfig& cfg, Rng& rng,
                          const NetParams* leo_teacher = nullptr, float anneal_factor = 1.0f);

// Greedy action of the all-goals teacher for one (obs, goal).
int leo_greedy_action(const NetParams& leo, const float* obs, int obs_dim, GoalId goal);

}  // namespace agrl::algos
