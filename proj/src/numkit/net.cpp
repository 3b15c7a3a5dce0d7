#include "agrl/net.hpp"

#include <cmath>
#include <sstream>

#include "agrl/errors.hpp"
#include "agrl/kernels.hpp"
#include "agrl/rng.hpp"

namespace agrl {

int64_t NetParams::param_count() const {
  int64_t n = 0;
  for (const auto& l : layers) n += l.weight.numel() + l.bias.numel();
  return n;
}

void NetParams::validate() const {
  if (layers.empty()) throw ShapeError("net has no layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weight.ndim() != 2) throw ShapeError("layer " + std::to_string(i) + ": weight must be 2D");
    if (l.bias.ndim() != 1 || l.bias.dim(0) != l.out()) {
      throw ShapeError("layer " + std::to_string(i) + ": bias length must equal fan-out");
    }
    if (i + 1 < layers.size() && l.out() != layers[i + 1].in()) {
      std::ostringstream os;
      os << "layer " << i << " fan-out " << l.out() << " does not chain into layer " << i + 1
         << " fan-in " << layers[i + 1].in();
      throw ShapeError(os.str());
    }
  }
  if (layers.back().layer_norm) throw ShapeError("final layer must not carry layer norm");
  if (layers.back().out() != head.flat()) {
    std::ostringstream os;
    os << "final layer fan-out " << layers.back().out() << " != head " << head.num_goals << "x"
       << head.num_actions;
    throw ShapeError(os.str());
  }
}

NetParams make_mlp(int input_dim, const std::vector<int>& hidden_widths, HeadShape head,
                   bool hidden_layer_norm, uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x6e65740aULL));
  NetParams net;
  net.head = head;
  int in = input_dim;
  auto add_layer = [&](int out, bool ln) {
    LayerParams l;
    l.weight = Tensor::zeros({in, out});
    l.bias = Tensor::zeros({out});
    l.layer_norm = ln;
    const float bound = 1.0f / std::sqrt(static_cast<float>(in));
    for (float& w : l.weight.data) w = static_cast<float>(rng.uniform_range(-bound, bound));
    net.layers.push_back(std::move(l));
    in = out;
  };
  for (int width : hidden_widths) add_layer(width, hidden_layer_norm);
  add_layer(head.flat(), false);
  net.validate();
  return net;
}

Activations mlp_forward(const NetParams& params, const Tensor& input) {
  expect_2d(input, -1, params.input_dim(), "mlp_forward input");
  const int batch = input.dim(0);
  Activations acts;
  acts.input = input;
  const size_t n_layers = params.layers.size();
  acts.affine.reserve(n_layers);
  acts.normed.reserve(n_layers);
  acts.hidden.reserve(n_layers);

  const Tensor* cur = &acts.input;
  for (size_t li = 0; li < n_layers; ++li) {
    const auto& l = params.layers[li];
    if (cur->dim(1) != l.in()) {
      throw ShapeError("mlp_forward: layer " + std::to_string(li) + " expects fan-in " +
                       std::to_string(l.in()) + ", got " + std::to_string(cur->dim(1)));
    }
    Tensor z = Tensor::zeros({batch, l.out()});
    kernels::affine_fwd(cur->data.data(), l.weight.data.data(), l.bias.data.data(),
                        z.data.data(), batch, l.in(), l.out(), /*skip_zero_inputs=*/li == 0);
    acts.affine.push_back(std::move(z));

    const bool is_last = (li + 1 == n_layers);
    if (l.layer_norm) {
      Tensor nz = Tensor::zeros({batch, l.out()});
      kernels::layer_norm_fwd(acts.affine.back().data.data(), nz.data.data(), batch, l.out(), 1e-5f);
      acts.normed.push_back(std::move(nz));
    } else {
      acts.normed.push_back(acts.affine.back());
    }

    if (is_last) {
      acts.hidden.push_back(acts.normed.back());
    } else {
      Tensor h = Tensor::zeros({batch, l.out()});
      kernels::relu_fwd(acts.normed.back().data.data(), h.data.data(), h.numel());
      acts.hidden.push_back(std::move(h));
    }
    cur = &acts.hidden.back();
  }
  // Expose the head layout on the output tensor.
  acts.hidden.back().shape = {batch, params.head.num_goals, params.head.num_actions};
  return acts;
}

NetGrads zero_grads_like(const NetParams& params) {
  NetGrads g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.layers.push_back({Tensor::zeros(l.weight.shape), Tensor::zeros(l.bias.shape)});
  }
  return g;
}

NetGrads mlp_backward(const NetParams& params, const Activations& acts,
                      const Tensor& grad_output, Tensor* grad_input) {
  const int batch = acts.batch();
  if (grad_output.numel() != static_cast<int64_t>(batch) * params.output_dim()) {
    throw ShapeError("mlp_backward: grad_output " + grad_output.shape_str() +
                     " does not match output [" + std::to_string(batch) + ", " +
                     std::to_string(params.output_dim()) + "]");
  }
  NetGrads grads = zero_grads_like(params);
  const int n_layers = static_cast<int>(params.layers.size());

  Tensor g = grad_output;  // gradient flowing into the current layer's output
  g.shape = {batch, params.output_dim()};
  for (int li = n_layers - 1; li >= 0; --li) {
    const auto& l = params.layers[li];
    const bool is_last = (li == n_layers - 1);

    if (!is_last) {
      // Through the ReLU applied to the normalized activations.
      Tensor gz = Tensor::zeros({batch, l.out()});
      kernels::relu_bwd(acts.normed[static_cast<size_t>(li)].data.data(), g.data.data(),
                        gz.data.data(), g.numel());
      g = std::move(gz);
    }
    if (l.layer_norm) {
      Tensor gz = Tensor::zeros({batch, l.out()});
      kernels::layer_norm_bwd(acts.affine[static_cast<size_t>(li)].data.data(), g.data.data(),
                              gz.data.data(), batch, l.out(), 1e-5f);
      g = std::move(gz);
    }

    const Tensor& layer_in = (li == 0) ? acts.input : acts.hidden[static_cast<size_t>(li - 1)];
    kernels::affine_bwd_params(layer_in.data.data(), g.data.data(),
                               grads.layers[static_cast<size_t>(li)].weight.data.data(),
                               grads.layers[static_cast<size_t>(li)].bias.data.data(),
                               batch, l.in(), l.out(), /*skip_zero_inputs=*/li == 0);
    if (li > 0 || grad_input) {
      Tensor gx = Tensor::zeros({batch, l.in()});
      kernels::affine_bwd_input(g.data.data(), l.weight.data.data(), gx.data.data(),
                                batch, l.in(), l.out());
      if (li == 0 && grad_input) {
        *grad_input = std::move(gx);
      } else {
        g = std::move(gx);
      }
    }
  }
  return grads;
}

Tensor layer_norm(const Tensor& x, float eps) {
  if (x.ndim() != 2) throw ShapeError("layer_norm expects a 2D tensor, got " + x.shape_str());
  if (eps <= 0.0f) throw NumericError("layer_norm eps must be > 0");
  Tensor y = Tensor::zeros(x.shape);
  kernels::layer_norm_fwd(x.data.data(), y.data.data(), x.dim(0), x.dim(1), eps);
  return y;
}

Tensor sigmoid_bound(const Tensor& logits) {
  Tensor y = Tensor::zeros(logits.shape);
  kernels::sigmoid_fwd(logits.data.data(), y.data.data(), logits.numel());
  return y;
}

float sigmoid(float x) { return kernels::sigmoid_scalar(x); }

double sigmoid_f64(double x) {
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  constexpr double lo = 1e-300;
  constexpr double hi = 1.0 - 1e-16;
  return y < lo ? lo : (y > hi ? hi : y);
}

std::vector<double> mlp_forward_f64(const NetParams& params, const Tensor& input) {
  expect_2d(input, -1, params.input_dim(), "mlp_forward_f64 input");
  const int batch = input.dim(0);
  std::vector<double> cur(input.data.begin(), input.data.end());
  int cur_dim = params.input_dim();
  for (size_t li = 0; li < params.layers.size(); ++li) {
    const auto& l = params.layers[li];
    std::vector<double> z(static_cast<size_t>(batch) * l.out());
    for (int r = 0; r < batch; ++r) {
      for (int o = 0; o < l.out(); ++o) {
        double acc = l.bias.at(o);
        for (int i = 0; i < l.in(); ++i) {
          acc += cur[static_cast<size_t>(r) * cur_dim + i] *
                 static_cast<double>(l.weight.at(static_cast<int64_t>(i) * l.out() + o));
        }
        z[static_cast<size_t>(r) * l.out() + o] = acc;
      }
    }
    if (l.layer_norm) {
      for (int r = 0; r < batch; ++r) {
        double* zr = z.data() + static_cast<size_t>(r) * l.out();
        double mean = 0.0;
        for (int i = 0; i < l.out(); ++i) mean += zr[i];
        mean /= l.out();
        double var = 0.0;
        for (int i = 0; i < l.out(); ++i) var += (zr[i] - mean) * (zr[i] - mean);
        var /= l.out();
        const double inv = 1.0 / std::sqrt(var + 1e-5);
        for (int i = 0; i < l.out(); ++i) zr[i] = (zr[i] - mean) * inv;
      }
    }
    if (li + 1 < params.layers.size()) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
    cur = std::move(z);
    cur_dim = l.out();
  }
  return cur;
}

}  // namespace agrl
