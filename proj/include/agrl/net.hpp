#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agrl/tensor.hpp"

namespace agrl {

// Output head layout: the final affine layer emits num_goals * num_actions
// values, viewed as [batch, num_goals, num_actions]. A goal-as-input network
// uses num_goals == 1.
struct HeadShape {
  int num_goals = 1;
  int num_actions = 1;
  int flat() const { return num_goals * num_actions; }
  bool operator==(const HeadShape&) const = default;
};

struct LayerParams {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]
  bool layer_norm = false;
  int in() const { return weight.dim(0); }
  int out() const { return weight.dim(1); }
};

struct NetParams {
  std::vector<LayerParams> layers;
  HeadShape head;

  int input_dim() const { return layers.front().in(); }
  int output_dim() const { return layers.back().out(); }
  int64_t param_count() const;

  // Checks dimension chaining and that the final layer matches the head.
  void validate() const;
};

struct LayerGrads {
  Tensor weight;
  Tensor bias;
};

struct NetGrads {
  std::vector<LayerGrads> layers;
};

// Intermediate tensors from mlp_forward, consumed by mlp_backward.
struct Activations {
  Tensor input;                  // [B, in]
  std::vector<Tensor> affine;    // per layer, pre-normalization [B, out_l]
  std::vector<Tensor> normed;    // post layer-norm (alias of affine values when off)
  std::vector<Tensor> hidden;    // post nonlinearity; final layer stays linear
  const Tensor& output() const { return hidden.back(); }
  int batch() const { return input.dim(0); }
};

// MLP with ReLU hidden units; layer norm (no learned affine) after each
// hidden affine where flagged, applied before the nonlinearity. The final
// layer is always plain affine. Weights uniform in +-1/sqrt(fan_in), zero
// bias, deterministic in seed.
NetParams make_mlp(int input_dim, const std::vector<int>& hidden_widths, HeadShape head,
                   bool hidden_layer_norm, uint64_t seed);

// Output tensor shape is [batch, num_goals, num_actions].
Activations mlp_forward(const NetParams& params, const Tensor& input);

// grad_output must match the forward output shape. Returns d loss / d theta;
// optionally also fills the gradient w.r.t. the network input.
NetGrads mlp_backward(const NetParams& params, const Activations& acts,
                      const Tensor& grad_output, Tensor* grad_input = nullptr);

NetGrads zero_grads_like(const NetParams& params);

// Standalone ops (same math the forward pass uses internally).
Tensor layer_norm(const Tensor& x, float eps);
Tensor sigmoid_bound(const Tensor& logits);

float sigmoid(float x);

// Gradient entries below ~1e-30 are numerically zero but keep x86 backward
// kernels in the denormal slow path; losses flush them when assembling
// output gradients.
inline float flush_tiny(float v) { return (v > -1e-30f && v < 1e-30f) ? 0.0f : v; }

// Serial forward in double arithmetic over the float32 parameters. Only used
// by gradient checking, where float32 forward rounding would drown the
// central differences. Returns the flat [batch * output_dim] outputs.
std::vector<double> mlp_forward_f64(const NetParams& params, const Tensor& input);

double sigmoid_f64(double x);

}  // namespace agrl
