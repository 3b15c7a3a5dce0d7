#pragma once

#include <functional>

#include "agrl/net.hpp"
#include "agrl/rng.hpp"

namespace agrl {

// Loss evaluated at the given parameters; when grads != nullptr also fill the
// analytic gradient (float32 production path). When grads == nullptr the
// caller is probing for central differences and the value should be computed
// in double (mlp_forward_f64), otherwise float32 forward rounding divided by
// 2*eps drowns the estimate.
using LossGradFn = std::function<double(const NetParams& params, NetGrads* grads)>;

// Central differences on `probes` randomly chosen parameter coordinates,
// compared against the analytic gradient. Returns the worst relative error
// |fd - an| / max(|fd|, |an|). Probes are skipped when
//   - both magnitudes are below 1e-5 (float32 parameters make the quotient
//     meaningless there), or
//   - estimates at step eps and 2*eps disagree by more than 5%, which marks a
//     non-differentiable neighborhood (a ReLU pre-activation within eps of
//     zero); central differences carry no information at such points.
// probes == 0 returns 0, a documented vacuous pass.
double finite_diff_check(const NetParams& params, const LossGradFn& fn, double eps, int probes,
                         Rng& rng);

}  // namespace agrl
