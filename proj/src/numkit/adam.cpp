#include "agrl/adam.hpp"

#include <cmath>
#include <string>

#include "agrl/errors.hpp"

namespace agrl {

AdamState make_adam_state(const NetParams& params) {
  AdamState s;
  s.m = Tensor::zeros({static_cast<int>(params.param_count())});
  s.v = Tensor::zeros({static_cast<int>(params.param_count())});
  s.t = 0;
  return s;
}

void adam_step(NetParams& params, const NetGrads& grads, AdamState& state, const AdamHyper& hyper) {
  if (grads.layers.size() != params.layers.size()) {
    throw ShapeError("adam_step: gradient layer count mismatch");
  }
  if (state.m.numel() != params.param_count()) {
    throw ShapeError("adam_step: optimizer state sized for a different net");
  }
  for (size_t li = 0; li < grads.layers.size(); ++li) {
    for (float g : grads.layers[li].weight.data) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in layer " + std::to_string(li) + " weight");
      }
    }
    for (float g : grads.layers[li].bias.data) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in layer " + std::to_string(li) + " bias");
      }
    }
  }

  state.t += 1;
  const double bc1 = 1.0 - std::pow(static_cast<double>(hyper.beta1), static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(static_cast<double>(hyper.beta2), static_cast<double>(state.t));

  int64_t k = 0;
  auto update_block = [&](Tensor& p, const Tensor& g) {
    for (int64_t i = 0; i < p.numel(); ++i, ++k) {
      const float gi = g.at(i);
      float& m = state.m.at(k);
      float& v = state.v.at(k);
      m = hyper.beta1 * m + (1.0f - hyper.beta1) * gi;
      v = hyper.beta2 * v + (1.0f - hyper.beta2) * gi * gi;
      const float m_hat = static_cast<float>(m / bc1);
      const float v_hat = static_cast<float>(v / bc2);
      p.at(i) -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  };
  for (size_t li = 0; li < params.layers.size(); ++li) {
    update_block(params.layers[li].weight, grads.layers[li].weight);
    update_block(params.layers[li].bias, grads.layers[li].bias);
  }
}

}  // namespace agrl
