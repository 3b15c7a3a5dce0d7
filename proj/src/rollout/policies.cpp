#include "agrl/policies.hpp"

#include <cmath>
#include <cstring>

#include "agrl/algos/qlearn.hpp"
#include "agrl/errors.hpp"

namespace agrl::policies {

namespace {

int argmax_lowest(const float* v, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

int eps_or(int greedy, int num_actions, float eps, Rng& rng) {
  if (eps > 0.0f && rng.uniform() < eps) {
    return static_cast<int>(rng.uniform_int(static_cast<uint64_t>(num_actions)));
  }
  return greedy;
}

Tensor uvfa_inputs(const Tensor& obs, const std::vector<GoalId>& goals, int num_goals) {
  const int L = obs.dim(0);
  const int obs_dim = obs.dim(1);
  Tensor in = Tensor::zeros({L, algos::uvfa_input_dim(obs_dim, num_goals)});
  for (int l = 0; l < L; ++l) {
    std::memcpy(in.row(l), obs.row(l), static_cast<size_t>(obs_dim) * sizeof(float));
    in.row(l)[obs_dim + goals[static_cast<size_t>(l)]] = 1.0f;
  }
  return in;
}

}  // namespace

rollout::DiscretePolicy eps_greedy_uvfa(const NetParams* net, int num_goals, float eps) {
  return [net, num_goals, eps](const Tensor& obs, const std::vector<GoalId>& goals,
                               std::vector<Rng>& rngs, std::vector<int>& actions,
                               std::vector<float>& logp) {
    const int A = net->head.num_actions;
    const Activations acts = mlp_forward(*net, uvfa_inputs(obs, goals, num_goals));
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* q = acts.output().data.data() + static_cast<int64_t>(l) * A;
      actions[static_cast<size_t>(l)] =
          eps_or(argmax_lowest(q, A), A, eps, rngs[static_cast<size_t>(l)]);
      logp[static_cast<size_t>(l)] = 0.0f;
    }
  };
}

rollout::DiscretePolicy eps_greedy_leo(const NetParams* net, float eps) {
  return [net, eps](const Tensor& obs, const std::vector<GoalId>& goals, std::vector<Rng>& rngs,
                    std::vector<int>& actions, std::vector<float>& logp) {
    const int A = net->head.num_actions;
    const int G = net->head.num_goals;
    const Activations acts = mlp_forward(*net, obs);
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* q = acts.output().data.data() +
                       (static_cast<int64_t>(l) * G + goals[static_cast<size_t>(l)]) * A;
      actions[static_cast<size_t>(l)] =
          eps_or(argmax_lowest(q, A), A, eps, rngs[static_cast<size_t>(l)]);
      logp[static_cast<size_t>(l)] = 0.0f;
    }
  };
}

rollout::DiscretePolicy eps_greedy_dual(const NetParams* leo, const NetParams* uvfa,
                                        const TrainConfig* cfg, float eps) {
  return [leo, uvfa, cfg, eps](const Tensor& obs, const std::vector<GoalId>& goals,
                               std::vector<Rng>& rngs, std::vector<int>& actions,
                               std::vector<float>& logp) {
    const int A = leo->head.num_actions;
    const int G = leo->head.num_goals;
    const Activations leo_acts = mlp_forward(*leo, obs);
    const Activations uvfa_acts = mlp_forward(*uvfa, uvfa_inputs(obs, goals, G));
    std::vector<float> mixed(static_cast<size_t>(A));
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* ql = leo_acts.output().data.data() +
                        (static_cast<int64_t>(l) * G + goals[static_cast<size_t>(l)]) * A;
      const float* qu = uvfa_acts.output().data.data() + static_cast<int64_t>(l) * A;
      for (int a = 0; a < A; ++a) {
        const float sl = sigmoid(ql[a]);
        const float su = sigmoid(qu[a]);
        switch (cfg->acting_mode) {
          case ActingMode::Linear:
            mixed[static_cast<size_t>(a)] = cfg->alpha * sl + (1.0f - cfg->alpha) * su;
            break;
          case ActingMode::Max:
            mixed[static_cast<size_t>(a)] = std::max(sl, su);
            break;
          case ActingMode::Min:
            mixed[static_cast<size_t>(a)] = std::min(sl, su);
            break;
        }
      }
      actions[static_cast<size_t>(l)] =
          eps_or(argmax_lowest(mixed.data(), A), A, eps, rngs[static_cast<size_t>(l)]);
      logp[static_cast<size_t>(l)] = 0.0f;
    }
  };
}

rollout::DiscretePolicy categorical_actor(const NetParams* actor, int num_goals) {
  return [actor, num_goals](const Tensor& obs, const std::vector<GoalId>& goals,
                            std::vector<Rng>& rngs, std::vector<int>& actions,
                            std::vector<float>& logp) {
    const int A = actor->head.num_actions;
    const Activations acts = mlp_forward(*actor, uvfa_inputs(obs, goals, num_goals));
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* logits = acts.output().data.data() + static_cast<int64_t>(l) * A;
      double mx = logits[0];
      for (int a = 1; a < A; ++a) mx = std::max(mx, static_cast<double>(logits[a]));
      double sum = 0.0;
      for (int a = 0; a < A; ++a) sum += std::exp(static_cast<double>(logits[a]) - mx);
      const double lse = mx + std::log(sum);
      // Inverse-CDF draw in probability space.
      const double u = rngs[static_cast<size_t>(l)].uniform();
      double acc = 0.0;
      int pick = A - 1;
      for (int a = 0; a < A; ++a) {
        acc += std::exp(static_cast<double>(logits[a]) - lse);
        if (u < acc) {
          pick = a;
          break;
        }
      }
      actions[static_cast<size_t>(l)] = pick;
      logp[static_cast<size_t>(l)] = static_cast<float>(static_cast<double>(logits[pick]) - lse);
    }
  };
}

rollout::DiscretePolicy greedy_actor(const NetParams* actor, int num_goals) {
  return [actor, num_goals](const Tensor& obs, const std::vector<GoalId>& goals,
                            std::vector<Rng>& rngs, std::vector<int>& actions,
                            std::vector<float>& logp) {
    (void)rngs;
    const int A = actor->head.num_actions;
    const Activations acts = mlp_forward(*actor, uvfa_inputs(obs, goals, num_goals));
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* logits = acts.output().data.data() + static_cast<int64_t>(l) * A;
      actions[static_cast<size_t>(l)] = argmax_lowest(logits, A);
      logp[static_cast<size_t>(l)] = 0.0f;
    }
  };
}

rollout::ContinuousPolicy dpg_actor(const NetParams* pi, float noise_sigma) {
  return [pi, noise_sigma](const Tensor& obs, const std::vector<GoalId>& goals,
                           std::vector<Rng>& rngs, std::vector<std::array<float, 2>>& actions) {
    const int G = pi->head.num_goals;
    const int act_dim = pi->head.num_actions;
    if (act_dim != 2) throw ShapeError("dpg_actor: expected 2D actions");
    const Activations acts = mlp_forward(*pi, obs);
    for (int l = 0; l < obs.dim(0); ++l) {
      const float* raw = acts.output().data.data() +
                         (static_cast<int64_t>(l) * G + goals[static_cast<size_t>(l)]) * act_dim;
      for (int k = 0; k < 2; ++k) {
        float a = std::tanh(raw[k]);
        if (noise_sigma > 0.0f) {
          a += noise_sigma * static_cast<float>(rngs[static_cast<size_t>(l)].normal());
        }
        actions[static_cast<size_t>(l)][static_cast<size_t>(k)] =
            std::clamp(a, -1.0f, 1.0f);
      }
    }
  };
}

}  // namespace agrl::policies
