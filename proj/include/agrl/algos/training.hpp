#pragma once

#include <vector>

#include "agrl/adam.hpp"
#include "agrl/algos/qlearn.hpp"
#include "agrl/algos/relabel.hpp"
#include "agrl/train_config.hpp"
#include "agrl/transition.hpp"

namespace agrl::algos {

// Row-structured training data and the shuffled minibatch Adam passes over
// it, shared by the trainer and the throughput benchmark.

enum class RelabelMode { None, Her, Naive };

struct PqnRows {
  Tensor input;  // [N, obs + G]
  std::vector<int> actions;
  std::vector<float> targets;
};

// Commanded-channel rows for every segment plus relabelled extras:
//   Her   - synthesized groups from her_relabel (params + rng required)
//   Naive - the full goal cross product per segment
// Targets run the Q(lambda) recursion along each group's channel with one
// batched bootstrap forward for all rows.
PqnRows build_pqn_rows(const SegmentBatch& batch, const NetParams& net, const TrainConfig& cfg,
                       int num_goals, RelabelMode mode = RelabelMode::None,
                       const HerParams* her = nullptr, Rng* her_rng = nullptr);

double uvfa_sgd(NetParams& net, AdamState& adam, const PqnRows& rows, const TrainConfig& cfg,
                Rng& rng);

struct LeoRows {
  Tensor obs;  // [N, obs]
  std::vector<int> actions;
  Tensor targets;  // [N, G]
};

LeoRows build_leo_rows(const SegmentBatch& batch, const NetParams& net, const TrainConfig& cfg);

// Applies the per-minibatch head mask when cfg.mask_keep_prob < 1.
double leo_sgd(NetParams& net, AdamState& adam, const LeoRows& rows, const TrainConfig& cfg,
               Rng& rng);

// Shuffled minibatch driver: step(order, start, count) per minibatch,
// cfg.num_epochs passes.
template <typename StepFn>
void sgd_passes(int total_rows, const TrainConfig& cfg, Rng& rng, const StepFn& step) {
  std::vector<int> order(static_cast<size_t>(total_rows));
  for (int i = 0; i < total_rows; ++i) order[static_cast<size_t>(i)] = i;
  for (int epoch = 0; epoch < cfg.num_epochs; ++epoch) {
    for (int i = total_rows - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i + 1)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    for (int start = 0; start < total_rows; start += cfg.minibatch_size) {
      step(order, start, std::min(cfg.minibatch_size, total_rows - start));
    }
  }
}

}  // namespace agrl::algos
