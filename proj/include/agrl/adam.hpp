#pragma once

#include <cstdint>

#include "agrl/net.hpp"
#include "agrl/tensor.hpp"

namespace agrl {

// Flat first/second-moment buffers over all parameters in layer order
// (weight then bias per layer).
struct AdamState {
  Tensor m;
  Tensor v;
  int64_t t = 0;
};

struct AdamHyper {
  float lr = 2e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

AdamState make_adam_state(const NetParams& params);

// Bias-corrected Adam, updating params in place (single-writer contract).
// Throws NumericError naming the parameter block on non-finite gradients.
void adam_step(NetParams& params, const NetGrads& grads, AdamState& state, const AdamHyper& hyper);

}  // namespace agrl
