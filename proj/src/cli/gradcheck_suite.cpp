#include "agrl/gradcheck_suite.hpp"

#include <cmath>

#include "agrl/algos/dpg.hpp"
#include "agrl/algos/ppo.hpp"
#include "agrl/algos/qlearn.hpp"
#include "agrl/errors.hpp"
#include "agrl/gradcheck.hpp"

namespace agrl {

namespace {

using algos::LossResult;

Tensor random_tensor(Rng& rng, std::vector<int> shape, float lo = -1.0f, float hi = 1.0f) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (float& v : t.data) v = static_cast<float>(rng.uniform_range(lo, hi));
  return t;
}

constexpr int kProbes = 80;

GradCheckEntry quadratic_entry(uint64_t seed) {
  NetParams net = make_mlp(4, {6}, {1, 3}, false, Rng::mix(seed, 1));
  auto quad = [](const NetParams& p, NetGrads* g) {
    double loss = 0.0;
    if (g) *g = zero_grads_like(p);
    for (size_t li = 0; li < p.layers.size(); ++li) {
      for (int64_t i = 0; i < p.layers[li].weight.numel(); ++i) {
        const double w = p.layers[li].weight.at(i);
        loss += 0.5 * w * w;
        if (g) g->layers[li].weight.at(i) = static_cast<float>(w);
      }
      for (int64_t i = 0; i < p.layers[li].bias.numel(); ++i) {
        const double b = p.layers[li].bias.at(i);
        loss += 0.5 * b * b;
        if (g) g->layers[li].bias.at(i) = static_cast<float>(b);
      }
    }
    return loss;
  };
  Rng rng(Rng::mix(seed, 2));
  return {"quadratic", finite_diff_check(net, quad, 1e-4, kProbes, rng), 1e-6};
}

GradCheckEntry uvfa_entry(uint64_t seed) {
  const int G = 5, obs = 6, A = 4, N = 10;
  Rng rng(Rng::mix(seed, 3));
  NetParams net = make_mlp(algos::uvfa_input_dim(obs, G), {16, 16}, {1, A}, true, Rng::mix(seed, 4));
  Tensor input = random_tensor(rng, {N, algos::uvfa_input_dim(obs, G)});
  std::vector<int> actions(N);
  for (auto& a : actions) a = static_cast<int>(rng.uniform_int(A));
  std::vector<float> targets(N);
  for (auto& t : targets) t = rng.uniform_f();
  Rng prng(Rng::mix(seed, 5));
  const double err = finite_diff_check(
      net,
      [&](const NetParams& p, NetGrads* g) {
        if (g) {
          LossResult r = algos::uvfa_q_loss(p, input, actions, targets);
          *g = std::move(r.grads);
          return r.loss;
        }
        return algos::uvfa_q_loss_f64(p, input, actions, targets);
      },
      1e-4, kProbes, prng);
  return {"uvfa_q", err, 1e-3};
}

GradCheckEntry leo_entry(uint64_t seed) {
  const int G = 7, obs = 6, A = 4, N = 10;
  Rng rng(Rng::mix(seed, 6));
  NetParams net = make_mlp(obs, {16, 16}, {G, A}, true, Rng::mix(seed, 7));
  Tensor input = random_tensor(rng, {N, obs});
  std::vector<int> actions(N);
  for (auto& a : actions) a = static_cast<int>(rng.uniform_int(A));
  Tensor targets = random_tensor(rng, {N, G}, 0.0f, 1.0f);
  Rng prng(Rng::mix(seed, 8));
  const double err = finite_diff_check(
      net,
      [&](const NetParams& p, NetGrads* g) {
        if (g) {
          LossResult r = algos::leo_q_loss(p, input, actions, targets);
          *g = std::move(r.grads);
          return r.loss;
        }
        return algos::leo_q_loss_f64(p, input, actions, targets);
      },
      1e-4, kProbes, prng);
  return {"leo_q", err, 1e-3};
}

void ppo_entries(uint64_t seed, std::vector<GradCheckEntry>& out) {
  const int G = 4, obs = 5, A = 6, N = 12;
  Rng rng(Rng::mix(seed, 9));
  TrainConfig cfg;
  NetParams actor = make_mlp(algos::uvfa_input_dim(obs, G), {16}, {1, A}, true, Rng::mix(seed, 10));
  NetParams critic = make_mlp(algos::uvfa_input_dim(obs, G), {16}, {1, 1}, true, Rng::mix(seed, 11));
  Tensor input = random_tensor(rng, {N, algos::uvfa_input_dim(obs, G)});
  std::vector<int> actions(N);
  for (auto& a : actions) a = static_cast<int>(rng.uniform_int(A));
  std::vector<float> logp_old(N), adv(N), ret(N);
  for (auto& v : logp_old) v = static_cast<float>(-std::log(A) + rng.uniform_range(-0.1, 0.1));
  for (auto& v : adv) v = static_cast<float>(rng.uniform_range(-1.0, 1.0));
  for (auto& v : ret) v = rng.uniform_f();

  Rng prng(Rng::mix(seed, 12));
  out.push_back({"ppo_policy",
                 finite_diff_check(
                     actor,
                     [&](const NetParams& p, NetGrads* g) {
                       if (g) {
                         LossResult r = algos::ppo_policy_loss(p, input, actions, logp_old, adv, cfg);
                         *g = std::move(r.grads);
                         return r.loss;
                       }
                       return algos::ppo_policy_loss_f64(p, input, actions, logp_old, adv, cfg);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
  out.push_back({"ppo_value",
                 finite_diff_check(
                     critic,
                     [&](const NetParams& p, NetGrads* g) {
                       if (g) {
                         LossResult r = algos::ppo_value_loss(p, input, ret, cfg);
                         *g = std::move(r.grads);
                         return r.loss;
                       }
                       return algos::ppo_value_loss_f64(p, input, ret, cfg);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
}

void dual_ppo_entries(uint64_t seed, std::vector<GradCheckEntry>& out) {
  const int G = 4, obs = 5, A = 6, N = 12;
  Rng rng(Rng::mix(seed, 13));
  TrainConfig cfg;
  cfg.vc_coef = 0.3f;
  algos::PpoParams ppo{make_mlp(algos::uvfa_input_dim(obs, G), {16}, {1, A}, true, Rng::mix(seed, 14)),
                       make_mlp(algos::uvfa_input_dim(obs, G), {16}, {1, 1}, true, Rng::mix(seed, 15))};
  NetParams leo = make_mlp(obs, {16}, {G, A}, true, Rng::mix(seed, 16));
  Tensor raw_obs = random_tensor(rng, {N, obs});
  Tensor input = Tensor::zeros({N, algos::uvfa_input_dim(obs, G)});
  std::vector<GoalId> goals(N);
  for (int r = 0; r < N; ++r) {
    goals[static_cast<size_t>(r)] = static_cast<GoalId>(rng.uniform_int(G));
    std::vector<float> o(raw_obs.row(r), raw_obs.row(r) + obs);
    algos::write_uvfa_input(o, goals[static_cast<size_t>(r)], G, input.row(r));
  }
  Rng prng(Rng::mix(seed, 17));
  out.push_back({"dual_leo_ppo_policy_clone",
                 finite_diff_check(
                     ppo.actor,
                     [&](const NetParams& p, NetGrads* g) {
                       if (g) {
                         algos::AuxLossResult r = algos::dual_leo_ppo_losses(
                             {p, ppo.critic}, leo, input, raw_obs, goals, cfg, 1.0f);
                         *g = std::move(r.actor_grads);
                         return r.policy_loss;
                       }
                       return algos::dual_leo_ppo_policy_loss_f64(p, leo, input, raw_obs, goals,
                                                                  cfg, 1.0f);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
  out.push_back({"dual_leo_ppo_value_clone",
                 finite_diff_check(
                     ppo.critic,
                     [&](const NetParams& p, NetGrads* g) {
                       if (g) {
                         algos::AuxLossResult r = algos::dual_leo_ppo_losses(
                             {ppo.actor, p}, leo, input, raw_obs, goals, cfg, 1.0f);
                         *g = std::move(r.critic_grads);
                         return r.value_loss;
                       }
                       return algos::dual_leo_ppo_value_loss_f64(p, leo, input, raw_obs, goals,
                                                                 cfg, 1.0f);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
}

void dpg_entries(uint64_t seed, std::vector<GradCheckEntry>& out) {
  const int G = 4, obs = 4, act = 2, N = 8;
  Rng rng(Rng::mix(seed, 18));
  algos::DpgParams params{make_mlp(obs + act, {12}, {G, 1}, true, Rng::mix(seed, 19)),
                          make_mlp(obs, {12}, {G, act}, true, Rng::mix(seed, 20))};
  Tensor obs_actions = random_tensor(rng, {N, obs + act});
  Tensor targets = random_tensor(rng, {N, G}, 0.0f, 1.0f);
  Tensor obs_only = random_tensor(rng, {N, obs});

  Rng prng(Rng::mix(seed, 21));
  out.push_back({"leo_dpg_critic",
                 finite_diff_check(
                     params.q,
                     [&](const NetParams& p, NetGrads* g) {
                       if (g) {
                         LossResult r = algos::dpg_critic_loss(p, obs_actions, targets);
                         *g = std::move(r.grads);
                         return r.loss;
                       }
                       return algos::dpg_critic_loss_f64(p, obs_actions, targets);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
  out.push_back({"leo_dpg_actor",
                 finite_diff_check(
                     params.pi,
                     [&](const NetParams& p, NetGrads* g) {
                       algos::DpgParams probe{params.q, p};
                       if (g) {
                         LossResult r = algos::dpg_actor_loss(probe, obs_only);
                         *g = std::move(r.grads);
                         return r.loss;
                       }
                       return algos::dpg_actor_loss_f64(probe, obs_only);
                     },
                     1e-4, kProbes, prng),
                 1e-3});
}

}  // namespace

std::vector<GradCheckEntry> run_gradcheck_suite(uint64_t seed, const std::string& method) {
  std::vector<GradCheckEntry> out;
  const bool all = method.empty();
  if (all || method == "quadratic") out.push_back(quadratic_entry(seed));
  if (all || method == "uvfa_q" || method == "uvfa_pqn" || method == "uvfa_pqn_her") {
    out.push_back(uvfa_entry(seed));
  }
  if (all || method == "leo_q" || method == "leo" || method == "dual_leo_pqn") {
    out.push_back(leo_entry(seed));
  }
  if (all || method == "ppo") ppo_entries(seed, out);
  if (all || method == "dual_leo_ppo") dual_ppo_entries(seed, out);
  if (all || method == "leo_dpg") dpg_entries(seed, out);
  if (out.empty()) throw ConfigError("gradcheck: unknown method filter '" + method + "'");
  return out;
}

}  // namespace agrl
