#include "agrl/algos/training.hpp"

#include <algorithm>
#include <cstring>

#include "agrl/errors.hpp"

namespace agrl::algos {

PqnRows build_pqn_rows(const SegmentBatch& batch, const NetParams& net, const TrainConfig& cfg,
                       int num_goals, RelabelMode mode, const HerParams* her, Rng* her_rng) {
  if (mode == RelabelMode::Her && (!her || !her_rng)) {
    throw ConfigError("build_pqn_rows: hindsight mode needs params and rng");
  }
  const int obs_dim = static_cast<int>(batch.front().transitions.front().obs.size());
  const int in_dim = uvfa_input_dim(obs_dim, num_goals);

  // Contiguous target groups: the commanded channel of each segment, then
  // one group per relabel slot.
  struct GroupRef {
    int seg;
    int len;
    GoalId goal;  // -1 = per-step commanded goals
    const std::vector<RelabelEntry>* entries;
    size_t entry0;
  };
  std::vector<GroupRef> groups;
  std::vector<std::vector<RelabelEntry>> extra(batch.size());
  int total_rows = 0;
  for (size_t s = 0; s < batch.size(); ++s) {
    const int T = batch[s].length();
    if (mode != RelabelMode::Naive) {
      // The naive cross product already contains the commanded channel.
      groups.push_back({static_cast<int>(s), T, -1, nullptr, 0});
      total_rows += T;
    }
    if (mode == RelabelMode::Her) {
      extra[s] = her_relabel(batch[s], *her, num_goals, *her_rng);
    } else if (mode == RelabelMode::Naive) {
      extra[s] = naive_all_goals_relabel(batch[s], num_goals);
    }
    const auto& entries = extra[s];
    size_t i = 0;
    while (i < entries.size()) {
      size_t j = i;
      while (j + 1 < entries.size() && entries[j + 1].group == entries[i].group) ++j;
      groups.push_back({static_cast<int>(s), static_cast<int>(j - i + 1), entries[i].goal,
                        &extra[s], i});
      total_rows += static_cast<int>(j - i + 1);
      i = j + 1;
    }
  }

  // One batched bootstrap forward over every next-state (obs, goal) row.
  Tensor next_in = Tensor::zeros({total_rows, in_dim});
  int row = 0;
  for (const GroupRef& g : groups) {
    const Segment& seg = batch[static_cast<size_t>(g.seg)];
    for (int k = 0; k < g.len; ++k) {
      const int t = (g.goal < 0) ? k : (*g.entries)[g.entry0 + static_cast<size_t>(k)].t;
      const Transition& tr = seg.transitions[static_cast<size_t>(t)];
      const GoalId goal = (g.goal < 0) ? tr.commanded : g.goal;
      write_uvfa_input(tr.next_obs, goal, num_goals, next_in.row(row));
      ++row;
    }
  }
  const Tensor maxq = max_q_next(net, next_in);

  PqnRows rows;
  rows.input = Tensor::zeros({total_rows, in_dim});
  rows.actions.resize(static_cast<size_t>(total_rows));
  rows.targets.resize(static_cast<size_t>(total_rows));
  row = 0;
  std::vector<float> r_chan, mq_chan;
  std::vector<uint8_t> d_chan;
  for (const GroupRef& g : groups) {
    const Segment& seg = batch[static_cast<size_t>(g.seg)];
    r_chan.resize(static_cast<size_t>(g.len));
    d_chan.resize(static_cast<size_t>(g.len));
    mq_chan.resize(static_cast<size_t>(g.len));
    for (int k = 0; k < g.len; ++k) {
      if (g.goal < 0) {
        const Transition& tr = seg.transitions[static_cast<size_t>(k)];
        r_chan[static_cast<size_t>(k)] = tr.reward_vec.rewards[static_cast<size_t>(tr.commanded)];
        d_chan[static_cast<size_t>(k)] = tr.reward_vec.dones[static_cast<size_t>(tr.commanded)];
      } else {
        const auto& e = (*g.entries)[g.entry0 + static_cast<size_t>(k)];
        r_chan[static_cast<size_t>(k)] = e.reward;
        d_chan[static_cast<size_t>(k)] = e.done;
      }
      mq_chan[static_cast<size_t>(k)] = maxq.row(row + k)[0];
    }
    const std::vector<float> y = qlambda_recursion(r_chan, d_chan, mq_chan, cfg.gamma, cfg.lambda_q);
    for (int k = 0; k < g.len; ++k) {
      const int t = (g.goal < 0) ? k : (*g.entries)[g.entry0 + static_cast<size_t>(k)].t;
      const Transition& tr = seg.transitions[static_cast<size_t>(t)];
      const GoalId goal = (g.goal < 0) ? tr.commanded : g.goal;
      write_uvfa_input(tr.obs, goal, num_goals, rows.input.row(row));
      rows.actions[static_cast<size_t>(row)] = tr.action;
      rows.targets[static_cast<size_t>(row)] = y[static_cast<size_t>(k)];
      ++row;
    }
  }
  return rows;
}

double uvfa_sgd(NetParams& net, AdamState& adam, const PqnRows& rows, const TrainConfig& cfg,
                Rng& rng) {
  const AdamHyper hyper{cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};
  const int in_dim = rows.input.dim(1);
  double last_loss = 0.0;
  sgd_passes(rows.input.dim(0), cfg, rng, [&](const std::vector<int>& order, int start, int count) {
    Tensor mb = Tensor::zeros({count, in_dim});
    std::vector<int> actions(static_cast<size_t>(count));
    std::vector<float> targets(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      const int src = order[static_cast<size_t>(start + i)];
      std::memcpy(mb.row(i), rows.input.row(src), static_cast<size_t>(in_dim) * sizeof(float));
      actions[static_cast<size_t>(i)] = rows.actions[static_cast<size_t>(src)];
      targets[static_cast<size_t>(i)] = rows.targets[static_cast<size_t>(src)];
    }
    LossResult res = uvfa_q_loss(net, mb, actions, targets);
    adam_step(net, res.grads, adam, hyper);
    last_loss = res.loss;
  });
  return last_loss;
}

LeoRows build_leo_rows(const SegmentBatch& batch, const NetParams& net, const TrainConfig& cfg) {
  LeoRows rows;
  rows.targets = leo_q_targets(batch, net, cfg);
  const int total = rows.targets.dim(0);
  const int obs_dim = static_cast<int>(batch.front().transitions.front().obs.size());
  rows.obs = Tensor::zeros({total, obs_dim});
  rows.actions.resize(static_cast<size_t>(total));
  int row = 0;
  for (const Segment& seg : batch) {
    for (const Transition& tr : seg.transitions) {
      std::memcpy(rows.obs.row(row), tr.obs.data(), tr.obs.size() * sizeof(float));
      rows.actions[static_cast<size_t>(row)] = tr.action;
      ++row;
    }
  }
  return rows;
}

double leo_sgd(NetParams& net, AdamState& adam, const LeoRows& rows, const TrainConfig& cfg,
               Rng& rng) {
  const AdamHyper hyper{cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};
  const int obs_dim = rows.obs.dim(1);
  const int G = net.head.num_goals;
  double last_loss = 0.0;
  sgd_passes(rows.obs.dim(0), cfg, rng, [&](const std::vector<int>& order, int start, int count) {
    Tensor mb = Tensor::zeros({count, obs_dim});
    Tensor mt = Tensor::zeros({count, G});
    std::vector<int> actions(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      const int src = order[static_cast<size_t>(start + i)];
      std::memcpy(mb.row(i), rows.obs.row(src), static_cast<size_t>(obs_dim) * sizeof(float));
      std::memcpy(mt.row(i), rows.targets.row(src), static_cast<size_t>(G) * sizeof(float));
      actions[static_cast<size_t>(i)] = rows.actions[static_cast<size_t>(src)];
    }
    LossResult res;
    if (cfg.mask_keep_prob < 1.0f) {
      const std::vector<uint8_t> mask = sample_head_mask(G, cfg.mask_keep_prob, rng);
      res = leo_q_loss(net, mb, actions, mt, &mask);
    } else {
      res = leo_q_loss(net, mb, actions, mt);
    }
    adam_step(net, res.grads, adam, hyper);
    last_loss = res.loss;
  });
  return last_loss;
}

}  // namespace agrl::algos
