#include "agrl/kernels.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace agrl::kernels {

namespace {
// Work sizes below this skip the parallel-for; arithmetic is identical either
// way so the cutoff cannot change results.
constexpr int64_t kOmpMinWork = 16 * 1024;
}  // namespace

void affine_fwd(const float* x, const float* w, const float* bias, float* y,
                int rows, int in, int out, bool skip_zero_inputs) {
  const int64_t work = static_cast<int64_t>(rows) * in * out;
#pragma omp parallel for schedule(static) if (work >= kOmpMinWork)
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + static_cast<int64_t>(r) * in;
    float* yr = y + static_cast<int64_t>(r) * out;
    if (bias) {
      std::memcpy(yr, bias, sizeof(float) * static_cast<size_t>(out));
    } else {
      std::memset(yr, 0, sizeof(float) * static_cast<size_t>(out));
    }
    for (int i = 0; i < in; ++i) {
      const float xi = xr[i];
      if (skip_zero_inputs && xi == 0.0f) continue;
      const float* wi = w + static_cast<int64_t>(i) * out;
      for (int o = 0; o < out; ++o) yr[o] += xi * wi[o];
    }
  }
}

void affine_bwd_input(const float* gy, const float* w, float* gx,
                      int rows, int in, int out) {
  const int64_t work = static_cast<int64_t>(rows) * in * out;
#pragma omp parallel for schedule(static) if (work >= kOmpMinWork)
  for (int r = 0; r < rows; ++r) {
    const float* gr = gy + static_cast<int64_t>(r) * out;
    float* gxr = gx + static_cast<int64_t>(r) * in;
    for (int i = 0; i < in; ++i) {
      const float* wi = w + static_cast<int64_t>(i) * out;
      float acc = 0.0f;
      for (int o = 0; o < out; ++o) acc += gr[o] * wi[o];
      gxr[i] = acc;
    }
  }
}

void affine_bwd_params(const float* x, const float* gy, float* gw, float* gb,
                       int rows, int in, int out, bool skip_zero_inputs) {
  const int64_t work = static_cast<int64_t>(rows) * in * out;
  // Threads own disjoint rows of gw (input-index slices); the batch loop
  // stays innermost and ordered for determinism.
#pragma omp parallel for schedule(static) if (work >= kOmpMinWork)
  for (int i = 0; i < in; ++i) {
    float* gwi = gw + static_cast<int64_t>(i) * out;
    for (int r = 0; r < rows; ++r) {
      const float xi = x[static_cast<int64_t>(r) * in + i];
      if (skip_zero_inputs && xi == 0.0f) continue;
      const float* gr = gy + static_cast<int64_t>(r) * out;
      for (int o = 0; o < out; ++o) gwi[o] += xi * gr[o];
    }
  }
  if (gb) {
    for (int r = 0; r < rows; ++r) {
      const float* gr = gy + static_cast<int64_t>(r) * out;
      for (int o = 0; o < out; ++o) gb[o] += gr[o];
    }
  }
}

void layer_norm_fwd(const float* x, float* y, int rows, int dim, float eps) {
  const int64_t work = static_cast<int64_t>(rows) * dim;
#pragma omp parallel for schedule(static) if (work >= kOmpMinWork)
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + static_cast<int64_t>(r) * dim;
    float* yr = y + static_cast<int64_t>(r) * dim;
    float mean = 0.0f;
    for (int i = 0; i < dim; ++i) mean += xr[i];
    mean /= static_cast<float>(dim);
    float var = 0.0f;
    for (int i = 0; i < dim; ++i) {
      const float d = xr[i] - mean;
      var += d * d;
    }
    var /= static_cast<float>(dim);
    const float inv = 1.0f / std::sqrt(var + eps);
    for (int i = 0; i < dim; ++i) yr[i] = (xr[i] - mean) * inv;
  }
}

void layer_norm_bwd(const float* x, const float* gy, float* gx,
                    int rows, int dim, float eps) {
  const int64_t work = static_cast<int64_t>(rows) * dim;
#pragma omp parallel for schedule(static) if (work >= kOmpMinWork)
  for (int r = 0; r < rows; ++r) {
    const float* xr = x + static_cast<int64_t>(r) * dim;
    const float* gr = gy + static_cast<int64_t>(r) * dim;
    float* gxr = gx + static_cast<int64_t>(r) * dim;
    float mean = 0.0f;
    for (int i = 0; i < dim; ++i) mean += xr[i];
    mean /= static_cast<float>(dim);
    float var = 0.0f;
    for (int i = 0; i < dim; ++i) {
      const float d = xr[i] - mean;
      var += d * d;
    }
    var /= static_cast<float>(dim);
    const float inv = 1.0f / std::sqrt(var + eps);
    // y_i = (x_i - mean) * inv; gx = inv * (g - mean(g) - y * mean(g*y))
    float g_mean = 0.0f;
    float gy_dot = 0.0f;
    for (int i = 0; i < dim; ++i) {
      const float yi = (xr[i] - mean) * inv;
      g_mean += gr[i];
      gy_dot += gr[i] * yi;
    }
    g_mean /= static_cast<float>(dim);
    gy_dot /= static_cast<float>(dim);
    for (int i = 0; i < dim; ++i) {
      const float yi = (xr[i] - mean) * inv;
      gxr[i] = inv * (gr[i] - g_mean - yi * gy_dot);
    }
  }
}

void relu_fwd(const float* x, float* y, int64_t n) {
#pragma omp parallel for schedule(static) if (n >= kOmpMinWork)
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd(const float* x, const float* gy, float* gx, int64_t n) {
#pragma omp parallel for schedule(static) if (n >= kOmpMinWork)
  for (int64_t i = 0; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : 0.0f;
}

float sigmoid_scalar(float x) {
  float y;
  if (x >= 0.0f) {
    y = 1.0f / (1.0f + std::exp(-x));
  } else {
    const float e = std::exp(x);
    y = e / (1.0f + e);
  }
  // Keep the output strictly inside (0,1); float32 saturates to exactly 0 or
  // 1 around |x| ~ 17 otherwise.
  constexpr float lo = std::numeric_limits<float>::min();
  constexpr float hi = 1.0f - std::numeric_limits<float>::epsilon() / 2.0f;
  return y < lo ? lo : (y > hi ? hi : y);
}

void sigmoid_fwd(const float* x, float* y, int64_t n) {
#pragma omp parallel for schedule(static) if (n >= kOmpMinWork)
  for (int64_t i = 0; i < n; ++i) y[i] = sigmoid_scalar(x[i]);
}

}  // namespace agrl::kernels
