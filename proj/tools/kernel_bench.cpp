// Compares the OpenMP kernels against the serial reference on the shapes the
// training loop actually uses. Prints one CSV row per (kernel, shape).

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "agrl/kernels.hpp"
#include "agrl/rng.hpp"
#include "agrl/tensor.hpp"

using namespace agrl;

namespace {

double time_loop(const std::function<void()>& fn, int reps) {
  fn();  // warmup
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 50;
  if (argc > 1) reps = std::stoi(argv[1]);

  std::printf("kernel,rows,in,out,serial_s,omp_s,speedup\n");
  Rng rng(7);

  const std::vector<std::array<int, 3>> shapes = {
      {64, 425, 256}, {256, 256, 256}, {256, 256, 294}, {1024, 256, 256}, {4096, 64, 64}};

  for (const auto& [rows, in, out] : shapes) {
    Tensor x = Tensor::zeros({rows, in});
    Tensor w = Tensor::zeros({in, out});
    Tensor b = Tensor::zeros({out});
    for (float& v : x.data) v = rng.uniform_f() - 0.5f;
    for (float& v : w.data) v = rng.uniform_f() - 0.5f;
    Tensor y = Tensor::zeros({rows, out});

    const double ts = time_loop(
        [&] { ref::affine_fwd(x.data.data(), w.data.data(), b.data.data(), y.data.data(), rows, in, out); },
        reps);
    const double tp = time_loop(
        [&] { kernels::affine_fwd(x.data.data(), w.data.data(), b.data.data(), y.data.data(), rows, in, out); },
        reps);
    std::printf("affine_fwd,%d,%d,%d,%.6f,%.6f,%.2f\n", rows, in, out, ts, tp, ts / tp);

    Tensor gy = Tensor::zeros({rows, out});
    for (float& v : gy.data) v = rng.uniform_f() - 0.5f;
    Tensor gw = Tensor::zeros({in, out});
    Tensor gb = Tensor::zeros({out});
    const double ts2 = time_loop(
        [&] {
          std::fill(gw.data.begin(), gw.data.end(), 0.0f);
          std::fill(gb.data.begin(), gb.data.end(), 0.0f);
          ref::affine_bwd_params(x.data.data(), gy.data.data(), gw.data.data(), gb.data.data(),
                                 rows, in, out);
        },
        reps);
    const double tp2 = time_loop(
        [&] {
          std::fill(gw.data.begin(), gw.data.end(), 0.0f);
          std::fill(gb.data.begin(), gb.data.end(), 0.0f);
          kernels::affine_bwd_params(x.data.data(), gy.data.data(), gw.data.data(), gb.data.data(),
                                     rows, in, out);
        },
        reps);
    std::printf("affine_bwd_params,%d,%d,%d,%.6f,%.6f,%.2f\n", rows, in, out, ts2, tp2, ts2 / tp2);

    Tensor ln = Tensor::zeros({rows, in});
    const double ts3 = time_loop(
        [&] { ref::layer_norm_fwd(x.data.data(), ln.data.data(), rows, in, 1e-5f); }, reps);
    const double tp3 = time_loop(
        [&] { kernels::layer_norm_fwd(x.data.data(), ln.data.data(), rows, in, 1e-5f); }, reps);
    std::printf("layer_norm_fwd,%d,%d,,%.6f,%.6f,%.2f\n", rows, in, ts3, tp3, ts3 / tp3);
  }
  std::fprintf(stderr, "threads: %d\n", omp_get_max_threads());
  return 0;
}
