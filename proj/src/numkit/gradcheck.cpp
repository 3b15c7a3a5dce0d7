#include "agrl/gradcheck.hpp"

#include <cmath>
#include <cstdlib>

#include "agrl/errors.hpp"

namespace agrl {

namespace {

struct Coord {
  size_t layer;
  bool in_weight;
  int64_t idx;
};

Coord locate(const NetParams& params, int64_t flat) {
  Coord c{0, true, flat};
  for (;; ++c.layer) {
    const int64_t wn = params.layers[c.layer].weight.numel();
    const int64_t bn = params.layers[c.layer].bias.numel();
    if (c.idx < wn) {
      c.in_weight = true;
      return c;
    }
    c.idx -= wn;
    if (c.idx < bn) {
      c.in_weight = false;
      return c;
    }
    c.idx -= bn;
  }
}

}  // namespace

double finite_diff_check(const NetParams& params, const LossGradFn& fn, double eps, int probes,
                         Rng& rng) {
  if (eps <= 0.0) throw NumericError("finite_diff_check: eps must be > 0");
  if (probes == 0) return 0.0;

  NetGrads analytic = zero_grads_like(params);
  (void)fn(params, &analytic);

  const int64_t total = params.param_count();
  NetParams probe = params;
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Coord c = locate(params, static_cast<int64_t>(rng.uniform_int(static_cast<uint64_t>(total))));
    Tensor& t = c.in_weight ? probe.layers[c.layer].weight : probe.layers[c.layer].bias;
    const float base = t.at(c.idx);

    auto central = [&](double h) {
      const float hi = base + static_cast<float>(h);
      const float lo = base - static_cast<float>(h);
      const double denom = static_cast<double>(hi) - static_cast<double>(lo);
      if (denom == 0.0) return std::pair<double, bool>{0.0, false};
      t.at(c.idx) = hi;
      const double f_hi = fn(probe, nullptr);
      t.at(c.idx) = lo;
      const double f_lo = fn(probe, nullptr);
      t.at(c.idx) = base;
      return std::pair<double, bool>{(f_hi - f_lo) / denom, true};
    };

    const auto [fd, ok] = central(eps);
    if (!ok) continue;
    // Probe again at twice the step. If the two estimates disagree the loss
    // is not locally smooth here (a ReLU pre-activation sits within eps of
    // zero), and central differences say nothing about the gradient.
    const auto [fd2, ok2] = central(2.0 * eps);
    if (!ok2) continue;
    const double agree_scale = std::max({std::abs(fd), std::abs(fd2), 1e-6});
    if (std::abs(fd - fd2) > 0.05 * agree_scale) continue;

    const double an = static_cast<double>(
        c.in_weight ? analytic.layers[c.layer].weight.at(c.idx)
                    : analytic.layers[c.layer].bias.at(c.idx));

    const double scale = std::max(std::abs(fd), std::abs(an));
    if (scale < 1e-5) continue;
    const double rel = std::abs(fd - an) / scale;
    if (rel > worst) worst = rel;
  }
  return worst;
}

}  // namespace agrl
