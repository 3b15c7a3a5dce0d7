#include "agrl/algos/dpg.hpp"

#include <cmath>
#include <cstring>

#include "agrl/errors.hpp"

namespace agrl::algos {

namespace {

void check_shapes(const DpgParams& params, int obs_dim) {
  if (params.q.head.num_actions != 1) throw ShapeError("dpg: critic head must be [goals, 1]");
  if (params.q.head.num_goals != params.pi.head.num_goals) {
    throw ShapeError("dpg: actor and critic disagree on the goal count");
  }
  if (params.q.input_dim() != obs_dim + params.action_dim()) {
    throw ShapeError("dpg: critic input must be observation + action, got " +
                     std::to_string(params.q.input_dim()) + " for obs " + std::to_string(obs_dim) +
                     " and action_dim " + std::to_string(params.action_dim()));
  }
}

Tensor flatten_obs(const std::vector<const Transition*>& rows, bool next) {
  const int total = static_cast<int>(rows.size());
  const int obs_dim = static_cast<int>(rows.front()->obs.size());
  Tensor out = Tensor::zeros({total, obs_dim});
  for (int r = 0; r < total; ++r) {
    const std::vector<float>& o = next ? rows[static_cast<size_t>(r)]->next_obs
                                       : rows[static_cast<size_t>(r)]->obs;
    std::memcpy(out.row(r), o.data(), o.size() * sizeof(float));
  }
  return out;
}

}  // namespace

Tensor dpg_policy_actions(const NetParams& pi, const Tensor& obs) {
  const Activations acts = mlp_forward(pi, obs);
  Tensor actions = acts.output();  // [rows, G, action_dim]
  for (float& v : actions.data) v = std::tanh(v);
  return actions;
}

Tensor dpg_critic_targets(const DpgParams& params, const std::vector<const Transition*>& batch,
                          const TrainConfig& cfg) {
  const int obs_dim = static_cast<int>(batch.front()->obs.size());
  check_shapes(params, obs_dim);
  const int G = params.num_goals();
  const int act_dim = params.action_dim();

  const Tensor next_obs = flatten_obs(batch, /*next=*/true);
  const int rows = next_obs.dim(0);
  const Tensor next_actions = dpg_policy_actions(params.pi, next_obs);

  // One inflated batch with rows (s'_n, pi_g(s'_n)) for every goal.
  Tensor qin = Tensor::zeros({rows * G, obs_dim + act_dim});
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      float* dst = qin.row(n * G + g);
      std::memcpy(dst, next_obs.row(n), static_cast<size_t>(obs_dim) * sizeof(float));
      std::memcpy(dst + obs_dim,
                  next_actions.data.data() + (static_cast<int64_t>(n) * G + g) * act_dim,
                  static_cast<size_t>(act_dim) * sizeof(float));
    }
  }
  const Activations qacts = mlp_forward(params.q, qin);

  Tensor targets = Tensor::zeros({rows, G});
  for (int row = 0; row < rows; ++row) {
    const Transition& tr = *batch[static_cast<size_t>(row)];
    for (int g = 0; g < G; ++g) {
      const float qv = sigmoid(
          qacts.output().data[(static_cast<size_t>(row) * G + static_cast<size_t>(g)) * G + static_cast<size_t>(g)]);
      const float r = tr.reward_vec.rewards[static_cast<size_t>(g)];
      const float nd = 1.0f - static_cast<float>(tr.reward_vec.dones[static_cast<size_t>(g)]);
      targets.row(row)[g] = r + cfg.gamma * nd * qv;
    }
  }
  return targets;
}

LossResult dpg_critic_loss(const NetParams& q, const Tensor& obs_actions, const Tensor& targets) {
  const int rows = obs_actions.dim(0);
  const int G = q.head.num_goals;
  const Activations acts = mlp_forward(q, obs_actions);
  Tensor gout = Tensor::zeros({rows, G});
  const double norm = static_cast<double>(rows) * G;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int g = 0; g < G; ++g) {
      const float qv = sigmoid(acts.output().data[static_cast<size_t>(r) * G + static_cast<size_t>(g)]);
      const double d = static_cast<double>(qv) - static_cast<double>(targets.row(r)[g]);
      loss += d * d;
      gout.row(r)[g] = flush_tiny(static_cast<float>(2.0 * d / norm) * qv * (1.0f - qv));
    }
  }
  if (!std::isfinite(loss)) throw NumericError("dpg_critic_loss: non-finite loss");
  LossResult res;
  res.loss = loss / norm;
  res.grads = mlp_backward(q, acts, gout);
  return res;
}

double dpg_critic_loss_f64(const NetParams& q, const Tensor& obs_actions, const Tensor& targets) {
  const std::vector<double> out = mlp_forward_f64(q, obs_actions);
  const int rows = obs_actions.dim(0);
  const int G = q.head.num_goals;
  const double norm = static_cast<double>(rows) * G;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int g = 0; g < G; ++g) {
      const double d = sigmoid_f64(out[static_cast<size_t>(r) * G + static_cast<size_t>(g)]) -
                       static_cast<double>(targets.row(r)[g]);
      loss += d * d;
    }
  }
  return loss / norm;
}

LossResult dpg_actor_loss(const DpgParams& params, const Tensor& obs) {
  const int obs_dim = obs.dim(1);
  check_shapes(params, obs_dim);
  const int rows = obs.dim(0);
  const int G = params.num_goals();
  const int act_dim = params.action_dim();

  const Activations pi_acts = mlp_forward(params.pi, obs);
  Tensor squashed = pi_acts.output();  // raw
  for (float& v : squashed.data) v = std::tanh(v);

  Tensor qin = Tensor::zeros({rows * G, obs_dim + act_dim});
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      float* dst = qin.row(n * G + g);
      std::memcpy(dst, obs.row(n), static_cast<size_t>(obs_dim) * sizeof(float));
      std::memcpy(dst + obs_dim,
                  squashed.data.data() + (static_cast<int64_t>(n) * G + g) * act_dim,
                  static_cast<size_t>(act_dim) * sizeof(float));
    }
  }
  const Activations q_acts = mlp_forward(params.q, qin);

  const double norm = static_cast<double>(rows) * G;
  double loss = 0.0;
  Tensor q_gout = Tensor::zeros({rows * G, G});
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      const size_t flat = (static_cast<size_t>(n) * G + static_cast<size_t>(g)) * G + static_cast<size_t>(g);
      const float qv = sigmoid(q_acts.output().data[flat]);
      loss += -static_cast<double>(qv);
      q_gout.data[flat] = flush_tiny(static_cast<float>(-1.0 / norm) * qv * (1.0f - qv));
    }
  }
  if (!std::isfinite(loss)) throw NumericError("dpg_actor_loss: non-finite loss");

  // Per-goal gradient paths through the critic, then one actor backward.
  Tensor q_gin;
  (void)mlp_backward(params.q, q_acts, q_gout, &q_gin);  // critic param grads unused here
  Tensor pi_gout = Tensor::zeros({rows, G * act_dim});
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      for (int k = 0; k < act_dim; ++k) {
        const float da = q_gin.row(n * G + g)[obs_dim + k];
        const float a = squashed.data[(static_cast<int64_t>(n) * G + g) * act_dim + k];
        pi_gout.row(n)[g * act_dim + k] = da * (1.0f - a * a);
      }
    }
  }
  LossResult res;
  res.loss = loss / norm;
  res.grads = mlp_backward(params.pi, pi_acts, pi_gout);
  return res;
}

double dpg_actor_loss_f64(const DpgParams& params, const Tensor& obs) {
  const int obs_dim = obs.dim(1);
  const int rows = obs.dim(0);
  const int G = params.num_goals();
  const int act_dim = params.action_dim();

  const std::vector<double> raw = mlp_forward_f64(params.pi, obs);
  Tensor qin = Tensor::zeros({rows * G, obs_dim + act_dim});
  std::vector<double> qin_f64(static_cast<size_t>(rows) * G * (obs_dim + act_dim));
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      double* dst = qin_f64.data() + (static_cast<size_t>(n) * G + g) * (obs_dim + act_dim);
      for (int i = 0; i < obs_dim; ++i) dst[i] = obs.row(n)[i];
      for (int k = 0; k < act_dim; ++k) {
        dst[obs_dim + k] = std::tanh(raw[(static_cast<size_t>(n) * G + g) * act_dim + k]);
      }
    }
  }
  // Evaluate the critic in double over the double inputs.
  // Reuse mlp_forward_f64 by viewing the inputs as a float tensor is lossy;
  // instead run the dense math inline here.
  const NetParams& q = params.q;
  std::vector<double> cur = qin_f64;
  int cur_dim = obs_dim + act_dim;
  const int total_rows = rows * G;
  for (size_t li = 0; li < q.layers.size(); ++li) {
    const auto& l = q.layers[li];
    std::vector<double> z(static_cast<size_t>(total_rows) * l.out());
    for (int r = 0; r < total_rows; ++r) {
      for (int o = 0; o < l.out(); ++o) {
        double acc = l.bias.at(o);
        for (int i = 0; i < l.in(); ++i) {
          acc += cur[static_cast<size_t>(r) * cur_dim + i] *
                 static_cast<double>(l.weight.at(static_cast<int64_t>(i) * l.out() + o));
        }
        z[static_cast<size_t>(r) * l.out() + o] = acc;
      }
    }
    if (l.layer_norm) {
      for (int r = 0; r < total_rows; ++r) {
        double* zr = z.data() + static_cast<size_t>(r) * l.out();
        double mean = 0.0;
        for (int i = 0; i < l.out(); ++i) mean += zr[i];
        mean /= l.out();
        double var = 0.0;
        for (int i = 0; i < l.out(); ++i) var += (zr[i] - mean) * (zr[i] - mean);
        var /= l.out();
        const double inv = 1.0 / std::sqrt(var + 1e-5);
        for (int i = 0; i < l.out(); ++i) zr[i] = (zr[i] - mean) * inv;
      }
    }
    if (li + 1 < q.layers.size()) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
    cur = std::move(z);
    cur_dim = l.out();
  }

  const double norm = static_cast<double>(rows) * G;
  double loss = 0.0;
  for (int n = 0; n < rows; ++n) {
    for (int g = 0; g < G; ++g) {
      loss += -sigmoid_f64(cur[(static_cast<size_t>(n) * G + g) * G + g]);
    }
  }
  return loss / norm;
}

std::vector<const Transition*> flatten_transitions(const SegmentBatch& batch) {
  std::vector<const Transition*> rows;
  for (const Segment& seg : batch) {
    for (const Transition& tr : seg.transitions) rows.push_back(&tr);
  }
  return rows;
}

DpgUpdateStats leo_dpg_update(DpgParams& params, AdamState& q_state, AdamState& pi_state,
                              const std::vector<const Transition*>& batch, const TrainConfig& cfg) {
  const int obs_dim = static_cast<int>(batch.front()->obs.size());
  check_shapes(params, obs_dim);
  const int act_dim = params.action_dim();

  const Tensor targets = dpg_critic_targets(params, batch, cfg);

  const Tensor obs = flatten_obs(batch, /*next=*/false);
  const int rows = obs.dim(0);
  Tensor obs_actions = Tensor::zeros({rows, obs_dim + act_dim});
  for (int row = 0; row < rows; ++row) {
    const Transition& tr = *batch[static_cast<size_t>(row)];
    float* dst = obs_actions.row(row);
    std::memcpy(dst, tr.obs.data(), tr.obs.size() * sizeof(float));
    if (static_cast<int>(tr.cont_action.size()) != act_dim) {
      throw ShapeError("leo_dpg_update: transition action_dim mismatch");
    }
    std::memcpy(dst + obs_dim, tr.cont_action.data(), static_cast<size_t>(act_dim) * sizeof(float));
  }

  const AdamHyper hyper{cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};
  DpgUpdateStats stats;
  const LossResult critic = dpg_critic_loss(params.q, obs_actions, targets);
  adam_step(params.q, critic.grads, q_state, hyper);
  stats.critic_loss = critic.loss;

  const LossResult actor = dpg_actor_loss(params, obs);
  adam_step(params.pi, actor.grads, pi_state, hyper);
  stats.actor_loss = actor.loss;
  return stats;
}

}  // namespace agrl::algos
