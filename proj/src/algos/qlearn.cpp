#include "agrl/algos/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "agrl/errors.hpp"

namespace agrl::algos {

float epsilon_schedule(int64_t step, int64_t total_steps, const TrainConfig& cfg) {
  if (total_steps <= 0) return cfg.eps_final;
  const double decay_steps = cfg.eps_decay_frac * static_cast<double>(total_steps);
  if (decay_steps <= 0.0 || static_cast<double>(step) >= decay_steps) return cfg.eps_final;
  const double frac = static_cast<double>(step) / decay_steps;
  return static_cast<float>(cfg.eps_start + (cfg.eps_final - cfg.eps_start) * frac);
}

int uvfa_input_dim(int obs_dim, int num_goals) { return obs_dim + num_goals; }

void write_uvfa_input(const std::vector<float>& obs, GoalId goal, int num_goals, float* out) {
  std::memcpy(out, obs.data(), obs.size() * sizeof(float));
  float* onehot = out + obs.size();
  std::memset(onehot, 0, static_cast<size_t>(num_goals) * sizeof(float));
  onehot[goal] = 1.0f;
}

Tensor max_q_next(const NetParams& params, const Tensor& next_inputs) {
  const Activations acts = mlp_forward(params, next_inputs);
  const int rows = next_inputs.dim(0);
  const int goals = params.head.num_goals;
  const int actions = params.head.num_actions;
  Tensor out = Tensor::zeros({rows, goals});
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(rows) * goals * actions > 8192)
  for (int r = 0; r < rows; ++r) {
    const float* row = acts.output().data.data() + static_cast<int64_t>(r) * goals * actions;
    for (int g = 0; g < goals; ++g) {
      float best = row[g * actions];
      for (int a = 1; a < actions; ++a) best = std::max(best, row[g * actions + a]);
      out.row(r)[g] = sigmoid(best);
    }
  }
  return out;
}

std::vector<float> qlambda_recursion(const std::vector<float>& rewards,
                                     const std::vector<uint8_t>& dones,
                                     const std::vector<float>& maxq_next, float gamma,
                                     float lambda) {
  const size_t n = rewards.size();
  if (dones.size() != n || maxq_next.size() != n) {
    throw ShapeError("qlambda_recursion: channel lengths differ");
  }
  std::vector<float> y(n);
  float next_y = 0.0f;
  for (size_t i = n; i-- > 0;) {
    const float boot = (i + 1 == n)
                           ? maxq_next[i]
                           : (1.0f - lambda) * maxq_next[i] + lambda * next_y;
    y[i] = rewards[i] + gamma * (1.0f - static_cast<float>(dones[i])) * boot;
    next_y = y[i];
  }
  return y;
}

std::vector<float> uvfa_q_targets(const Segment& segment, const NetParams& params,
                                  const TrainConfig& cfg, int num_goals) {
  const int T = segment.length();
  const int obs_dim = static_cast<int>(segment.transitions.front().obs.size());
  Tensor next_inputs = Tensor::zeros({T, uvfa_input_dim(obs_dim, num_goals)});
  for (int t = 0; t < T; ++t) {
    const Transition& tr = segment.transitions[static_cast<size_t>(t)];
    write_uvfa_input(tr.next_obs, tr.commanded, num_goals, next_inputs.row(t));
  }
  const Tensor maxq = max_q_next(params, next_inputs);  // [T, 1]
  std::vector<float> rewards(static_cast<size_t>(T));
  std::vector<uint8_t> dones(static_cast<size_t>(T));
  std::vector<float> boots(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    const Transition& tr = segment.transitions[static_cast<size_t>(t)];
    rewards[static_cast<size_t>(t)] = tr.reward_vec.rewards[static_cast<size_t>(tr.commanded)];
    dones[static_cast<size_t>(t)] = tr.reward_vec.dones[static_cast<size_t>(tr.commanded)];
    boots[static_cast<size_t>(t)] = maxq.row(t)[0];
  }
  return qlambda_recursion(rewards, dones, boots, cfg.gamma, cfg.lambda_q);
}

Tensor leo_q_targets(const SegmentBatch& batch, const NetParams& params, const TrainConfig& cfg) {
  if (batch.empty()) throw ShapeError("leo_q_targets: empty batch");
  const int goals = params.head.num_goals;
  int total_rows = 0;
  for (const Segment& seg : batch) total_rows += seg.length();
  const int obs_dim = static_cast<int>(batch.front().transitions.front().obs.size());

  Tensor next_obs = Tensor::zeros({total_rows, obs_dim});
  int row = 0;
  for (const Segment& seg : batch) {
    for (const Transition& tr : seg.transitions) {
      std::memcpy(next_obs.row(row), tr.next_obs.data(), tr.next_obs.size() * sizeof(float));
      ++row;
    }
  }
  const Tensor maxq = max_q_next(params, next_obs);  // [total_rows, G]

  Tensor targets = Tensor::zeros({total_rows, goals});
  row = 0;
  for (const Segment& seg : batch) {
    const int T = seg.length();
    if (static_cast<int>(seg.transitions.front().reward_vec.rewards.size()) != goals) {
      throw ShapeError("leo_q_targets: reward vector length does not match the net head");
    }
#pragma omp parallel for schedule(static) if (goals * T > 2048)
    for (int g = 0; g < goals; ++g) {
      std::vector<float> r_ch(static_cast<size_t>(T)), b_ch(static_cast<size_t>(T));
      std::vector<uint8_t> d_ch(static_cast<size_t>(T));
      for (int t = 0; t < T; ++t) {
        const Transition& tr = seg.transitions[static_cast<size_t>(t)];
        r_ch[static_cast<size_t>(t)] = tr.reward_vec.rewards[static_cast<size_t>(g)];
        d_ch[static_cast<size_t>(t)] = tr.reward_vec.dones[static_cast<size_t>(g)];
        b_ch[static_cast<size_t>(t)] = maxq.row(row + t)[g];
      }
      const std::vector<float> y = qlambda_recursion(r_ch, d_ch, b_ch, cfg.gamma, cfg.lambda_q);
      for (int t = 0; t < T; ++t) targets.row(row + t)[g] = y[static_cast<size_t>(t)];
    }
    row += T;
  }
  return targets;
}

LossResult uvfa_q_loss(const NetParams& params, const Tensor& input,
                       const std::vector<int>& actions, const std::vector<float>& targets) {
  const int rows = input.dim(0);
  if (static_cast<int>(actions.size()) != rows || static_cast<int>(targets.size()) != rows) {
    throw ShapeError("uvfa_q_loss: row count mismatch");
  }
  const int actions_dim = params.head.num_actions;
  const Activations acts = mlp_forward(params, input);
  Tensor gout = Tensor::zeros({rows, params.output_dim()});
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int a = actions[static_cast<size_t>(r)];
    const float logit = acts.output().data[static_cast<size_t>(r) * actions_dim + a];
    const float q = sigmoid(logit);
    const double d = static_cast<double>(q) - static_cast<double>(targets[static_cast<size_t>(r)]);
    loss += d * d;
    gout.data[static_cast<size_t>(r) * actions_dim + a] =
        flush_tiny(static_cast<float>(2.0 * d / rows) * q * (1.0f - q));
  }
  loss /= rows;
  if (!std::isfinite(loss)) throw NumericError("uvfa_q_loss: non-finite loss");
  LossResult res;
  res.loss = loss;
  res.grads = mlp_backward(params, acts, gout);
  return res;
}

double uvfa_q_loss_f64(const NetParams& params, const Tensor& input,
                       const std::vector<int>& actions, const std::vector<float>& targets) {
  const std::vector<double> out = mlp_forward_f64(params, input);
  const int rows = input.dim(0);
  const int actions_dim = params.head.num_actions;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double q = sigmoid_f64(out[static_cast<size_t>(r) * actions_dim +
                                     actions[static_cast<size_t>(r)]]);
    const double d = q - static_cast<double>(targets[static_cast<size_t>(r)]);
    loss += d * d;
  }
  return loss / rows;
}

LossResult leo_q_loss(const NetParams& params, const Tensor& obs, const std::vector<int>& actions,
                      const Tensor& targets, const std::vector<uint8_t>* head_mask) {
  const int rows = obs.dim(0);
  const int goals = params.head.num_goals;
  const int actions_dim = params.head.num_actions;
  if (targets.ndim() != 2 || targets.dim(0) != rows || targets.dim(1) != goals) {
    throw ShapeError("leo_q_loss: targets must be [rows, num_goals]");
  }
  if (head_mask && static_cast<int>(head_mask->size()) != goals) {
    throw ShapeError("leo_q_loss: head mask length does not match the goal set");
  }
  const Activations acts = mlp_forward(params, obs);
  Tensor gout = Tensor::zeros({rows, params.output_dim()});
  const double norm = static_cast<double>(rows) * goals;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int a = actions[static_cast<size_t>(r)];
    const float* out_row = acts.output().data.data() + static_cast<int64_t>(r) * goals * actions_dim;
    float* g_row = gout.data.data() + static_cast<int64_t>(r) * goals * actions_dim;
    for (int g = 0; g < goals; ++g) {
      if (head_mask && !(*head_mask)[static_cast<size_t>(g)]) continue;
      const float q = sigmoid(out_row[g * actions_dim + a]);
      const double d = static_cast<double>(q) - static_cast<double>(targets.row(r)[g]);
      loss += d * d;
      g_row[g * actions_dim + a] = flush_tiny(static_cast<float>(2.0 * d / norm) * q * (1.0f - q));
    }
  }
  loss /= norm;
  if (!std::isfinite(loss)) throw NumericError("leo_q_loss: non-finite loss");
  LossResult res;
  res.loss = loss;
  res.grads = mlp_backward(params, acts, gout);
  return res;
}

double leo_q_loss_f64(const NetParams& params, const Tensor& obs, const std::vector<int>& actions,
                      const Tensor& targets, const std::vector<uint8_t>* head_mask) {
  const std::vector<double> out = mlp_forward_f64(params, obs);
  const int rows = obs.dim(0);
  const int goals = params.head.num_goals;
  const int actions_dim = params.head.num_actions;
  const double norm = static_cast<double>(rows) * goals;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int a = actions[static_cast<size_t>(r)];
    for (int g = 0; g < goals; ++g) {
      if (head_mask && !(*head_mask)[static_cast<size_t>(g)]) continue;
      const double q =
          sigmoid_f64(out[(static_cast<size_t>(r) * goals + g) * actions_dim + a]);
      const double d = q - static_cast<double>(targets.row(r)[g]);
      loss += d * d;
    }
  }
  return loss / norm;
}

std::vector<uint8_t> sample_head_mask(int num_goals, float keep_prob, Rng& rng) {
  std::vector<uint8_t> mask(static_cast<size_t>(num_goals));
  for (auto& m : mask) m = rng.bernoulli(keep_prob) ? 1 : 0;
  return mask;
}

std::vector<float> dual_leo_q(const std::vector<float>& obs, GoalId goal,
                              const NetParams& leo_params, const NetParams& uvfa_params,
                              const TrainConfig& cfg) {
  const int actions = leo_params.head.num_actions;
  const int goals = leo_params.head.num_goals;
  if (uvfa_params.head.num_actions != actions) {
    throw ShapeError("dual_leo_q: nets disagree on the action count");
  }
  Tensor leo_in({1, static_cast<int>(obs.size())}, obs);
  const Activations leo_acts = mlp_forward(leo_params, leo_in);

  Tensor uvfa_in = Tensor::zeros({1, uvfa_input_dim(static_cast<int>(obs.size()), goals)});
  write_uvfa_input(obs, goal, goals, uvfa_in.row(0));
  const Activations uvfa_acts = mlp_forward(uvfa_params, uvfa_in);

  std::vector<float> mixed(static_cast<size_t>(actions));
  for (int a = 0; a < actions; ++a) {
    const float ql = sigmoid(leo_acts.output().data[static_cast<size_t>(goal) * actions + a]);
    const float qu = sigmoid(uvfa_acts.output().data[static_cast<size_t>(a)]);
    switch (cfg.acting_mode) {
      case ActingMode::Linear:
        mixed[static_cast<size_t>(a)] = cfg.alpha * ql + (1.0f - cfg.alpha) * qu;
        break;
      case ActingMode::Max:
        mixed[static_cast<size_t>(a)] = std::max(ql, qu);
        break;
      case ActingMode::Min:
        mixed[static_cast<size_t>(a)] = std::min(ql, qu);
        break;
    }
  }
  return mixed;
}

}  // namespace agrl::algos
