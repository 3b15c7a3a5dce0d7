#include <cmath>

#include "agrl/kernels.hpp"

// Straightforward scalar loops, one output element at a time. Kept serial on
// purpose: unit tests and the acceptance oracles compare the OpenMP kernels
// against these, and tools/kernel_bench measures the speedup.

namespace agrl::ref {

void affine_fwd(const float* x, const float* w, const float* bias, float* y,
                int rows, int in, int out) {
  for (int r = 0; r < rows; ++r) {
    for (int o = 0; o < out; ++o) {
      float acc = bias ? bias[o] : 0.0f;
      for (int i = 0; i < in; ++i) {
        acc += x[static_cast<int64_t>(r) * in + i] * w[static_cast<int64_t>(i) * out + o];
      }
      y[static_cast<int64_t>(r) * out + o] = acc;
    }
  }
}

void affine_bwd_input(const float* gy, const float* w, float* gx,
                      int rows, int in, int out) {
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < in; ++i) {
      float acc = 0.0f;
      for (int o = 0; o < out; ++o) {
        acc += gy[static_cast<int64_t>(r) * out + o] * w[static_cast<int64_t>(i) * out + o];
      }
      gx[static_cast<int64_t>(r) * in + i] = acc;
    }
  }
}

void affine_bwd_params(const float* x, const float* gy, float* gw, float* gb,
                       int rows, int in, int out) {
  for (int i = 0; i < in; ++i) {
    for (int o = 0; o < out; ++o) {
      float acc = 0.0f;
      for (int r = 0; r < rows; ++r) {
        acc += x[static_cast<int64_t>(r) * in + i] * gy[static_cast<int64_t>(r) * out + o];
      }
      gw[static_cast<int64_t>(i) * out + o] += acc;
    }
  }
  if (gb) {
    for (int o = 0; o < out; ++o) {
      float acc = 0.0f;
      for (int r = 0; r < rows; ++r) acc += gy[static_cast<int64_t>(r) * out + o];
      gb[o] += acc;
    }
  }
}

void layer_norm_fwd(const float* x, float* y, int rows, int dim, float eps) {
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + static_cast<int64_t>(r) * dim;
    float* yr = y + static_cast<int64_t>(r) * dim;
    float mean = 0.0f;
    for (int i = 0; i < dim; ++i) mean += xr[i];
    mean /= static_cast<float>(dim);
    float var = 0.0f;
    for (int i = 0; i < dim; ++i) var += (xr[i] - mean) * (xr[i] - mean);
    var /= static_cast<float>(dim);
    const float inv = 1.0f / std::sqrt(var + eps);
    for (int i = 0; i < dim; ++i) yr[i] = (xr[i] - mean) * inv;
  }
}

void layer_norm_bwd(const float* x, const float* gy, float* gx,
                    int rows, int dim, float eps) {
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + static_cast<int64_t>(r) * dim;
    const float* gr = gy + static_cast<int64_t>(r) * dim;
    float* gxr = gx + static_cast<int64_t>(r) * dim;
    float mean = 0.0f;
    for (int i = 0; i < dim; ++i) mean += xr[i];
    mean /= static_cast<float>(dim);
    float var = 0.0f;
    for (int i = 0; i < dim; ++i) var += (xr[i] - mean) * (xr[i] - mean);
    var /= static_cast<float>(dim);
    const float inv = 1.0f / std::sqrt(var + eps);
    float g_mean = 0.0f;
    float gy_dot = 0.0f;
    for (int i = 0; i < dim; ++i) {
      g_mean += gr[i];
      gy_dot += gr[i] * (xr[i] - mean) * inv;
    }
    g_mean /= static_cast<float>(dim);
    gy_dot /= static_cast<float>(dim);
    for (int i = 0; i < dim; ++i) {
      gxr[i] = inv * (gr[i] - g_mean - (xr[i] - mean) * inv * gy_dot);
    }
  }
}

void relu_fwd(const float* x, float* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd(const float* x, const float* gy, float* gx, int64_t n) {
  for (int64_t i = 0; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : 0.0f;
}

void sigmoid_fwd(const float* x, float* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = agrl::kernels::sigmoid_scalar(x[i]);
}

}  // namespace agrl::ref
