#pragma once

#include <cstdint>

// Dense kernels behind all network math. agrl::kernels is the production
// path (OpenMP over rows/output blocks); agrl::ref is a plain scalar-loop
// implementation kept as the testing reference and as the serial side of
// tools/kernel_bench.
//
// Determinism contract: every output element is written by exactly one
// thread and its inner accumulation order is fixed, so results are bitwise
// identical for any thread count within one build. Reductions that would
// reorder float sums are not used here.

namespace agrl::kernels {

// y[r,o] = sum_i x[r,i] * w[i,o] + bias[o]; bias may be null.
// skip_zero_inputs: branch past zero x entries; worth it for one-hot
// observation layers, counterproductive (and throughput-destabilizing) for
// dense hidden activations.
void affine_fwd(const float* x, const float* w, const float* bias, float* y,
                int rows, int in, int out, bool skip_zero_inputs = false);

// gx[r,i] = sum_o gy[r,o] * w[i,o]
void affine_bwd_input(const float* gy, const float* w, float* gx,
                      int rows, int in, int out);

// gw[i,o] += sum_r x[r,i] * gy[r,o];  gb[o] += sum_r gy[r,o] (gb may be null)
void affine_bwd_params(const float* x, const float* gy, float* gw, float* gb,
                       int rows, int in, int out, bool skip_zero_inputs = false);

// Per-row normalization to zero mean / unit variance, no learned affine.
void layer_norm_fwd(const float* x, float* y, int rows, int dim, float eps);

// gx for layer_norm_fwd; recomputes row statistics from x.
void layer_norm_bwd(const float* x, const float* gy, float* gx,
                    int rows, int dim, float eps);

void relu_fwd(const float* x, float* y, int64_t n);

// gx[i] = x[i] > 0 ? gy[i] : 0
void relu_bwd(const float* x, const float* gy, float* gx, int64_t n);

// Numerically stable logistic; never overflows for any finite input.
void sigmoid_fwd(const float* x, float* y, int64_t n);

float sigmoid_scalar(float x);

}  // namespace agrl::kernels

namespace agrl::ref {

void affine_fwd(const float* x, const float* w, const float* bias, float* y,
                int rows, int in, int out);
void affine_bwd_input(const float* gy, const float* w, float* gx,
                      int rows, int in, int out);
void affine_bwd_params(const float* x, const float* gy, float* gw, float* gb,
                       int rows, int in, int out);
void layer_norm_fwd(const float* x, float* y, int rows, int dim, float eps);
void layer_norm_bwd(const float* x, const float* gy, float* gx,
                    int rows, int dim, float eps);
void relu_fwd(const float* x, float* y, int64_t n);
void relu_bwd(const float* x, const float* gy, float* gx, int64_t n);
void sigmoid_fwd(const float* x, float* y, int64_t n);

}  // namespace agrl::ref
