#pragma once

#include <cstdint>
#include <vector>

#include "agrl/net.hpp"
#include "agrl/train_config.hpp"
#include "agrl/transition.hpp"

namespace agrl::algos {

// Linear decay from eps_start to eps_final over the first eps_decay_frac of
// training, then constant.
float epsilon_schedule(int64_t step, int64_t total_steps, const TrainConfig& cfg);

// Goal-as-input encoding: observation with the goal one-hot appended.
int uvfa_input_dim(int obs_dim, int num_goals);
void write_uvfa_input(const std::vector<float>& obs, GoalId goal, int num_goals, float* out);

// Per-goal bootstrap values: max over actions of the sigmoid-bounded head,
// for each row of next-state inputs. Output [rows, num_goals].
Tensor max_q_next(const NetParams& params, const Tensor& next_inputs);

// Q(lambda) backward recursion along one trajectory channel:
//   y_t = r_t + gamma*(1 - d_t)*((1-lambda)*maxq_next_t + lambda*y_{t+1})
// anchored at the end on maxq_next alone (the bootstrap row equals the final
// next-state value, so the lambda mixture collapses there).
std::vector<float> qlambda_recursion(const std::vector<float>& rewards,
                                     const std::vector<uint8_t>& dones,
                                     const std::vector<float>& maxq_next, float gamma,
                                     float lambda);

// Targets for the commanded channel of one segment (the goal can change at
// pseudo-termination boundaries; the done bit is set there, which anchors the
// recursion and keeps goals from leaking across the switch).
std::vector<float> uvfa_q_targets(const Segment& segment, const NetParams& params,
                                  const TrainConfig& cfg, int num_goals);

// Targets for every goal channel of each segment, stacked over the batch.
// Output [sum of segment lengths, num_goals], rows in (segment, t) order.
Tensor leo_q_targets(const SegmentBatch& batch, const NetParams& params, const TrainConfig& cfg);

struct LossResult {
  double loss = 0.0;
  NetGrads grads;
};

// Mean squared error between the sigmoid-bounded Q at the taken action and
// the (gradient-stopped) target. input [N, obs+G], one scalar target per row.
LossResult uvfa_q_loss(const NetParams& params, const Tensor& input,
                       const std::vector<int>& actions, const std::vector<float>& targets);
double uvfa_q_loss_f64(const NetParams& params, const Tensor& input,
                       const std::vector<int>& actions, const std::vector<float>& targets);

// All-goals loss: squared error between sigma(Q(s)[g, a_t]) and target[t, g],
// summed over kept heads and normalized by rows * |G| (so the masked
// gradient's expectation is keep_prob times the full gradient). One forward
// and one backward regardless of |G|. head_mask, when present, has one byte
// per goal; zero drops that head from the loss.
LossResult leo_q_loss(const NetParams& params, const Tensor& obs, const std::vector<int>& actions,
                      const Tensor& targets, const std::vector<uint8_t>* head_mask = nullptr);
double leo_q_loss_f64(const NetParams& params, const Tensor& obs, const std::vector<int>& actions,
                      const Tensor& targets, const std::vector<uint8_t>* head_mask = nullptr);

// Per-head Bernoulli(keep_prob) mask, one draw per minibatch.
std::vector<uint8_t> sample_head_mask(int num_goals, float keep_prob, Rng& rng);

// Mixed action-value estimates for acting: sigmoid-bounded slices of both
// networks combined per cfg.acting_mode (alpha*LEO + (1-alpha)*UVFA for
// Linear, elementwise max/min otherwise).
std::vector<float> dual_leo_q(const std::vector<float>& obs, GoalId goal,
                              const NetParams& leo_params, const NetParams& uvfa_params,
                              const TrainConfig& cfg);

}  // namespace agrl::algos
