#include "agrl/algos/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "agrl/errors.hpp"

namespace agrl::algos {

namespace {

// Row-wise log-softmax in double, written into out (len actions).
void log_softmax_row(const float* logits, int n, double* out) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, static_cast<double>(logits[i]));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(static_cast<double>(logits[i]) - mx);
  const double lse = mx + std::log(sum);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(logits[i]) - lse;
}

}  // namespace

GaeOut gae(const std::vector<float>& rewards, const std::vector<uint8_t>& dones,
           const std::vector<float>& values, float v_bootstrap, float gamma, float lambda) {
  const size_t n = rewards.size();
  if (dones.size() != n || values.size() != n) throw ShapeError("gae: channel lengths differ");
  GaeOut out;
  out.advantages.resize(n);
  out.returns.resize(n);
  float adv_next = 0.0f;
  for (size_t i = n; i-- > 0;) {
    const float v_next = (i + 1 == n) ? v_bootstrap : values[i + 1];
    const float not_done = 1.0f - static_cast<float>(dones[i]);
    const float delta = rewards[i] + gamma * not_done * v_next - values[i];
    adv_next = delta + gamma * lambda * not_done * adv_next;
    out.advantages[i] = adv_next;
    out.returns[i] = adv_next + values[i];
  }
  return out;
}

PpoRows build_ppo_rows(const SegmentBatch& batch, const NetParams& critic,
                       const TrainConfig& cfg, int num_goals) {
  int total = 0;
  for (const Segment& seg : batch) total += seg.length();
  const int obs_dim = static_cast<int>(batch.front().transitions.front().obs.size());
  const int in_dim = uvfa_input_dim(obs_dim, num_goals);

  PpoRows rows;
  rows.input = Tensor::zeros({total, in_dim});
  rows.raw_obs = Tensor::zeros({total, obs_dim});
  rows.goals.resize(static_cast<size_t>(total));
  rows.actions.resize(static_cast<size_t>(total));
  rows.logp_old.resize(static_cast<size_t>(total));
  rows.advantages.resize(static_cast<size_t>(total));
  rows.returns.resize(static_cast<size_t>(total));

  int row = 0;
  for (const Segment& seg : batch) {
    const int T = seg.length();
    // Values for s_0..s_{T-1} plus the bootstrap observation, each with the
    // goal commanded at that step.
    Tensor vin = Tensor::zeros({T + 1, in_dim});
    for (int t = 0; t < T; ++t) {
      const Transition& tr = seg.transitions[static_cast<size_t>(t)];
      write_uvfa_input(tr.obs, tr.commanded, num_goals, vin.row(t));
    }
    write_uvfa_input(seg.bootstrap_obs, seg.transitions.back().commanded, num_goals, vin.row(T));
    const Activations vacts = mlp_forward(critic, vin);

    std::vector<float> rewards(static_cast<size_t>(T)), values(static_cast<size_t>(T));
    std::vector<uint8_t> dones(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      const Transition& tr = seg.transitions[static_cast<size_t>(t)];
      rewards[static_cast<size_t>(t)] = tr.reward_vec.rewards[static_cast<size_t>(tr.commanded)];
      dones[static_cast<size_t>(t)] = tr.reward_vec.dones[static_cast<size_t>(tr.commanded)];
      values[static_cast<size_t>(t)] = sigmoid(vacts.output().data[static_cast<size_t>(t)]);
    }
    const float v_boot = sigmoid(vacts.output().data[static_cast<size_t>(T)]);
    const GaeOut g = gae(rewards, dones, values, v_boot, cfg.gamma, cfg.gae_lambda);

    for (int t = 0; t < T; ++t) {
      const Transition& tr = seg.transitions[static_cast<size_t>(t)];
      std::memcpy(rows.input.row(row), vin.row(t), static_cast<size_t>(in_dim) * sizeof(float));
      std::memcpy(rows.raw_obs.row(row), tr.obs.data(), tr.obs.size() * sizeof(float));
      rows.goals[static_cast<size_t>(row)] = tr.commanded;
      rows.actions[static_cast<size_t>(row)] = tr.action;
      rows.logp_old[static_cast<size_t>(row)] = tr.logp;
      rows.advantages[static_cast<size_t>(row)] = g.advantages[static_cast<size_t>(t)];
      rows.returns[static_cast<size_t>(row)] = g.returns[static_cast<size_t>(t)];
      ++row;
    }
  }
  return rows;
}

LossResult ppo_policy_loss(const NetParams& actor, const Tensor& input,
                           const std::vector<int>& actions, const std::vector<float>& logp_old,
                           const std::vector<float>& advantages, const TrainConfig& cfg) {
  const int rows = input.dim(0);
  const int num_actions = actor.head.num_actions;
  const Activations acts = mlp_forward(actor, input);
  Tensor gout = Tensor::zeros({rows, actor.output_dim()});
  std::vector<double> lsm(static_cast<size_t>(num_actions));
  double policy = 0.0;
  double entropy = 0.0;
  for (int r = 0; r < rows; ++r) {
    const float* logits = acts.output().data.data() + static_cast<int64_t>(r) * num_actions;
    log_softmax_row(logits, num_actions, lsm.data());
    const int a = actions[static_cast<size_t>(r)];
    const double ratio = std::exp(lsm[static_cast<size_t>(a)] -
                                  static_cast<double>(logp_old[static_cast<size_t>(r)]));
    if (!std::isfinite(ratio)) {
      throw NumericError("ppo_policy_loss: non-finite ratio at row " + std::to_string(r) +
                         " (logp_new=" + std::to_string(lsm[static_cast<size_t>(a)]) +
                         ", logp_old=" + std::to_string(logp_old[static_cast<size_t>(r)]) + ")");
    }
    const double adv = advantages[static_cast<size_t>(r)];
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - static_cast<double>(cfg.clip_eps),
                                      1.0 + static_cast<double>(cfg.clip_eps)) *
                           adv;
    policy += -std::min(unclipped, clipped);

    // Gradient flows only while the unclipped branch is the minimum.
    const bool selected = unclipped <= clipped;
    double h = 0.0;
    for (int k = 0; k < num_actions; ++k) h -= std::exp(lsm[static_cast<size_t>(k)]) * lsm[static_cast<size_t>(k)];
    entropy += h;

    float* grow = gout.data.data() + static_cast<int64_t>(r) * num_actions;
    for (int k = 0; k < num_actions; ++k) {
      const double p_k = std::exp(lsm[static_cast<size_t>(k)]);
      double grad = 0.0;
      if (selected) {
        const double dlp = (k == a ? 1.0 : 0.0) - p_k;
        grad += -ratio * adv * dlp / rows;
      }
      grad += cfg.ent_coef * p_k * (lsm[static_cast<size_t>(k)] + h) / rows;
      grow[k] = static_cast<float>(grad);
    }
  }
  LossResult res;
  res.loss = policy / rows - cfg.ent_coef * entropy / rows;
  res.grads = mlp_backward(actor, acts, gout);
  return res;
}

double ppo_policy_loss_f64(const NetParams& actor, const Tensor& input,
                           const std::vector<int>& actions, const std::vector<float>& logp_old,
                           const std::vector<float>& advantages, const TrainConfig& cfg) {
  const std::vector<double> out = mlp_forward_f64(actor, input);
  const int rows = input.dim(0);
  const int num_actions = actor.head.num_actions;
  double policy = 0.0, entropy = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double* logits = out.data() + static_cast<size_t>(r) * num_actions;
    double mx = logits[0];
    for (int i = 1; i < num_actions; ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (int i = 0; i < num_actions; ++i) sum += std::exp(logits[i] - mx);
    const double lse = mx + std::log(sum);
    const double lp = logits[actions[static_cast<size_t>(r)]] - lse;
    const double ratio = std::exp(lp - static_cast<double>(logp_old[static_cast<size_t>(r)]));
    const double adv = advantages[static_cast<size_t>(r)];
    const double clipped = std::clamp(ratio, 1.0 - static_cast<double>(cfg.clip_eps),
                                      1.0 + static_cast<double>(cfg.clip_eps)) *
                           adv;
    policy += -std::min(ratio * adv, clipped);
    for (int k = 0; k < num_actions; ++k) {
      const double lpk = logits[k] - lse;
      entropy -= std::exp(lpk) * lpk;
    }
  }
  return policy / rows - cfg.ent_coef * entropy / rows;
}

LossResult ppo_value_loss(const NetParams& critic, const Tensor& input,
                          const std::vector<float>& returns, const TrainConfig& cfg) {
  const int rows = input.dim(0);
  const Activations acts = mlp_forward(critic, input);
  Tensor gout = Tensor::zeros({rows, 1});
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    const float v = sigmoid(acts.output().data[static_cast<size_t>(r)]);
    const double d = static_cast<double>(v) - static_cast<double>(returns[static_cast<size_t>(r)]);
    loss += d * d;
    gout.data[static_cast<size_t>(r)] =
        flush_tiny(static_cast<float>(cfg.vf_coef * 2.0 * d / rows) * v * (1.0f - v));
  }
  LossResult res;
  res.loss = cfg.vf_coef * loss / rows;
  res.grads = mlp_backward(critic, acts, gout);
  return res;
}

double ppo_value_loss_f64(const NetParams& critic, const Tensor& input,
                          const std::vector<float>& returns, const TrainConfig& cfg) {
  const std::vector<double> out = mlp_forward_f64(critic, input);
  double loss = 0.0;
  for (size_t r = 0; r < out.size(); ++r) {
    const double d = sigmoid_f64(out[r]) - static_cast<double>(returns[r]);
    loss += d * d;
  }
  return cfg.vf_coef * loss / static_cast<double>(out.size());
}

int leo_greedy_action(const NetParams& leo, const float* obs, int obs_dim, GoalId goal) {
  Tensor in = Tensor::zeros({1, obs_dim});
  std::memcpy(in.row(0), obs, static_cast<size_t>(obs_dim) * sizeof(float));
  const Activations acts = mlp_forward(leo, in);
  const int num_actions = leo.head.num_actions;
  const float* row = acts.output().data.data() + static_cast<int64_t>(goal) * num_actions;
  int best = 0;
  for (int a = 1; a < num_actions; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

namespace {

// Teacher quantities per row: greedy action and max-Q value, both frozen.
struct TeacherTargets {
  std::vector<int> greedy;
  std::vector<float> maxq;
};

TeacherTargets teacher_targets(const NetParams& leo, const Tensor& raw_obs,
                               const std::vector<GoalId>& goals) {
  const Activations acts = mlp_forward(leo, raw_obs);
  const int rows = raw_obs.dim(0);
  const int num_actions = leo.head.num_actions;
  TeacherTargets t;
  t.greedy.resize(static_cast<size_t>(rows));
  t.maxq.resize(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const float* row = acts.output().data.data() +
                       (static_cast<int64_t>(r) * leo.head.num_goals +
                        goals[static_cast<size_t>(r)]) * num_actions;
    int best = 0;
    for (int a = 1; a < num_actions; ++a) {
      if (row[a] > row[best]) best = a;
    }
    t.greedy[static_cast<size_t>(r)] = best;
    t.maxq[static_cast<size_t>(r)] = sigmoid(row[best]);
  }
  return t;
}

}  // namespace

AuxLossResult dual_leo_ppo_losses(const PpoParams& params, const NetParams& leo,
                                  const Tensor& input, const Tensor& raw_obs,
                                  const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                  float anneal_factor) {
  const TeacherTargets teacher = teacher_targets(leo, raw_obs, goals);
  const int rows = input.dim(0);
  const int num_actions = params.actor.head.num_actions;
  AuxLossResult res;

  {
    const Activations acts = mlp_forward(params.actor, input);
    Tensor gout = Tensor::zeros({rows, params.actor.output_dim()});
    std::vector<double> lsm(static_cast<size_t>(num_actions));
    double ce = 0.0;
    const double scale = static_cast<double>(cfg.pc_coef) * anneal_factor;
    for (int r = 0; r < rows; ++r) {
      const float* logits = acts.output().data.data() + static_cast<int64_t>(r) * num_actions;
      log_softmax_row(logits, num_actions, lsm.data());
      const int target = teacher.greedy[static_cast<size_t>(r)];
      ce += -lsm[static_cast<size_t>(target)];
      float* grow = gout.data.data() + static_cast<int64_t>(r) * num_actions;
      for (int k = 0; k < num_actions; ++k) {
        const double p_k = std::exp(lsm[static_cast<size_t>(k)]);
        grow[k] = static_cast<float>(scale * (p_k - (k == target ? 1.0 : 0.0)) / rows);
      }
    }
    res.policy_loss = scale * ce / rows;
    res.actor_grads = mlp_backward(params.actor, acts, gout);
  }

  {
    const Activations acts = mlp_forward(params.critic, input);
    Tensor gout = Tensor::zeros({rows, 1});
    double mse = 0.0;
    const double scale = static_cast<double>(cfg.vc_coef) * anneal_factor;
    for (int r = 0; r < rows; ++r) {
      const float v = sigmoid(acts.output().data[static_cast<size_t>(r)]);
      const double d = static_cast<double>(v) - static_cast<double>(teacher.maxq[static_cast<size_t>(r)]);
      mse += d * d;
      gout.data[static_cast<size_t>(r)] =
          flush_tiny(static_cast<float>(scale * 2.0 * d / rows) * v * (1.0f - v));
    }
    res.value_loss = scale * mse / rows;
    res.critic_grads = mlp_backward(params.critic, acts, gout);
  }
  return res;
}

double dual_leo_ppo_policy_loss_f64(const NetParams& actor, const NetParams& leo,
                                    const Tensor& input, const Tensor& raw_obs,
                                    const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                    float anneal_factor) {
  const TeacherTargets teacher = teacher_targets(leo, raw_obs, goals);
  const std::vector<double> out = mlp_forward_f64(actor, input);
  const int rows = input.dim(0);
  const int num_actions = actor.head.num_actions;
  double ce = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double* logits = out.data() + static_cast<size_t>(r) * num_actions;
    double mx = logits[0];
    for (int i = 1; i < num_actions; ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (int i = 0; i < num_actions; ++i) sum += std::exp(logits[i] - mx);
    const double lse = mx + std::log(sum);
    ce += -(logits[teacher.greedy[static_cast<size_t>(r)]] - lse);
  }
  return static_cast<double>(cfg.pc_coef) * anneal_factor * ce / rows;
}

double dual_leo_ppo_value_loss_f64(const NetParams& critic, const NetParams& leo,
                                   const Tensor& input, const Tensor& raw_obs,
                                   const std::vector<GoalId>& goals, const TrainConfig& cfg,
                                   float anneal_factor) {
  const TeacherTargets teacher = teacher_targets(leo, raw_obs, goals);
  const std::vector<double> out = mlp_forward_f64(critic, input);
  double mse = 0.0;
  for (size_t r = 0; r < out.size(); ++r) {
    const double d = sigmoid_f64(out[r]) - static_cast<double>(teacher.maxq[r]);
    mse += d * d;
  }
  return static_cast<double>(cfg.vc_coef) * anneal_factor * mse / static_cast<double>(out.size());
}

PpoUpdateStats ppo_update(PpoParams& params, AdamState& actor_state, AdamState& critic_state,
                          const PpoRows& rows, const TrainConfig& cfg, Rng& rng,
                          const NetParams* leo_teacher, float anneal_factor) {
  const int total = rows.input.dim(0);
  const int in_dim = rows.input.dim(1);
  const int obs_dim = rows.raw_obs.dim(1);
  std::vector<int> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  const AdamHyper hyper{cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};

  PpoUpdateStats stats;
  int n_minibatches = 0;
  for (int epoch = 0; epoch < cfg.num_epochs; ++epoch) {
    // Fisher-Yates with the shared rng keeps runs reproducible.
    for (int i = total - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i + 1)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    for (int start = 0; start < total; start += cfg.minibatch_size) {
      const int count = std::min(cfg.minibatch_size, total - start);
      Tensor mb_input = Tensor::zeros({count, in_dim});
      Tensor mb_obs = Tensor::zeros({count, obs_dim});
      std::vector<GoalId> mb_goals(static_cast<size_t>(count));
      std::vector<int> mb_actions(static_cast<size_t>(count));
      std::vector<float> mb_logp(static_cast<size_t>(count));
      std::vector<float> mb_adv(static_cast<size_t>(count));
      std::vector<float> mb_ret(static_cast<size_t>(count));
      for (int i = 0; i < count; ++i) {
        const int src = order[static_cast<size_t>(start + i)];
        std::memcpy(mb_input.row(i), rows.input.row(src), static_cast<size_t>(in_dim) * sizeof(float));
        std::memcpy(mb_obs.row(i), rows.raw_obs.row(src), static_cast<size_t>(obs_dim) * sizeof(float));
        mb_goals[static_cast<size_t>(i)] = rows.goals[static_cast<size_t>(src)];
        mb_actions[static_cast<size_t>(i)] = rows.actions[static_cast<size_t>(src)];
        mb_logp[static_cast<size_t>(i)] = rows.logp_old[static_cast<size_t>(src)];
        mb_adv[static_cast<size_t>(i)] = rows.advantages[static_cast<size_t>(src)];
        mb_ret[static_cast<size_t>(i)] = rows.returns[static_cast<size_t>(src)];
      }
      // Per-minibatch advantage normalization.
      double mean = 0.0;
      for (float a : mb_adv) mean += a;
      mean /= count;
      double var = 0.0;
      for (float a : mb_adv) var += (a - mean) * (a - mean);
      var /= count;
      const double inv = 1.0 / (std::sqrt(var) + 1e-8);
      for (float& a : mb_adv) a = static_cast<float>((a - mean) * inv);

      LossResult pol = ppo_policy_loss(params.actor, mb_input, mb_actions, mb_logp, mb_adv, cfg);
      LossResult val = ppo_value_loss(params.critic, mb_input, mb_ret, cfg);
      stats.policy_loss += pol.loss;
      stats.value_loss += val.loss;

      if (leo_teacher) {
        const AuxLossResult aux = dual_leo_ppo_losses({params.actor, params.critic}, *leo_teacher,
                                                      mb_input, mb_obs, mb_goals, cfg, anneal_factor);
        stats.aux_policy_loss += aux.policy_loss;
        stats.aux_value_loss += aux.value_loss;
        for (size_t li = 0; li < pol.grads.layers.size(); ++li) {
          for (size_t k = 0; k < pol.grads.layers[li].weight.data.size(); ++k) {
            pol.grads.layers[li].weight.data[k] += aux.actor_grads.layers[li].weight.data[k];
          }
          for (size_t k = 0; k < pol.grads.layers[li].bias.data.size(); ++k) {
            pol.grads.layers[li].bias.data[k] += aux.actor_grads.layers[li].bias.data[k];
          }
        }
        for (size_t li = 0; li < val.grads.layers.size(); ++li) {
          for (size_t k = 0; k < val.grads.layers[li].weight.data.size(); ++k) {
            val.grads.layers[li].weight.data[k] += aux.critic_grads.layers[li].weight.data[k];
          }
          for (size_t k = 0; k < val.grads.layers[li].bias.data.size(); ++k) {
            val.grads.layers[li].bias.data[k] += aux.critic_grads.layers[li].bias.data[k];
          }
        }
      }
      adam_step(params.actor, pol.grads, actor_state, hyper);
      adam_step(params.critic, val.grads, critic_state, hyper);
      ++n_minibatches;
    }
  }
  if (n_minibatches > 0) {
    stats.policy_loss /= n_minibatches;
    stats.value_loss /= n_minibatches;
    stats.aux_policy_loss /= n_minibatches;
    stats.aux_value_loss /= n_minibatches;
  }
  return stats;
}

}  // namespace agrl::algos
