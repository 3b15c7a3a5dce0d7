#include "agrl/algos/relabel.hpp"

#include "agrl/errors.hpp"

namespace agrl::algos {

HerStrategy her_strategy_from_string(const std::string& s) {
  if (s == "none") return HerStrategy::None;
  if (s == "random") return HerStrategy::Random;
  if (s == "positive") return HerStrategy::Positive;
  if (s == "mixed") return HerStrategy::Mixed;
  throw ConfigError("unknown HER strategy: " + s);
}

namespace {

RelabelEntry make_entry(const Transition& tr, int t, GoalId goal, int group) {
  RelabelEntry e;
  e.t = t;
  e.goal = goal;
  e.reward = tr.achieved[static_cast<size_t>(goal)] ? 1.0f : 0.0f;
  e.done = (tr.achieved[static_cast<size_t>(goal)] || tr.episode_done) ? 1 : 0;
  e.group = group;
  return e;
}

// Uniform draw over the set bits of a mask; -1 when empty.
GoalId sample_achieved(const GoalMask& mask, Rng& rng) {
  int n = 0;
  for (uint8_t b : mask) n += b ? 1 : 0;
  if (n == 0) return -1;
  int pick = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n)));
  for (size_t g = 0; g < mask.size(); ++g) {
    if (mask[g] && pick-- == 0) return static_cast<GoalId>(g);
  }
  return -1;
}

}  // namespace

std::vector<RelabelEntry> her_relabel(const Segment& segment, const HerParams& params,
                                      int num_goals, Rng& rng) {
  std::vector<RelabelEntry> out;
  if (params.strategy == HerStrategy::None) return out;
  const int n_random =
      (params.strategy == HerStrategy::Random || params.strategy == HerStrategy::Mixed)
          ? params.n_random
          : 0;
  const int m_positive =
      (params.strategy == HerStrategy::Positive || params.strategy == HerStrategy::Mixed)
          ? params.m_positive
          : 0;
  const int T = segment.length();
  int group = 0;

  if (params.per_trajectory) {
    for (int slot = 0; slot < n_random; ++slot) {
      const GoalId g = static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(num_goals)));
      for (int t = 0; t < T; ++t) {
        out.push_back(make_entry(segment.transitions[static_cast<size_t>(t)], t, g, group));
      }
      ++group;
    }
    const GoalMask& final_mask = segment.transitions.back().achieved;
    for (int slot = 0; slot < m_positive; ++slot) {
      const GoalId g = sample_achieved(final_mask, rng);
      if (g < 0) continue;  // nothing achieved at the anchor: skip the slot
      for (int t = 0; t < T; ++t) {
        out.push_back(make_entry(segment.transitions[static_cast<size_t>(t)], t, g, group));
      }
      ++group;
    }
    return out;
  }

  for (int t = 0; t < T; ++t) {
    const Transition& tr = segment.transitions[static_cast<size_t>(t)];
    for (int slot = 0; slot < n_random; ++slot) {
      const GoalId g = static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(num_goals)));
      out.push_back(make_entry(tr, t, g, group++));
    }
    for (int slot = 0; slot < m_positive; ++slot) {
      const GoalId g = sample_achieved(tr.achieved, rng);
      if (g < 0) continue;
      out.push_back(make_entry(tr, t, g, group++));
    }
  }
  return out;
}

std::vector<RelabelEntry> naive_all_goals_relabel(const Segment& segment, int num_goals) {
  std::vector<RelabelEntry> out;
  out.reserve(static_cast<size_t>(num_goals) * segment.length());
  for (GoalId g = 0; g < num_goals; ++g) {
    for (int t = 0; t < segment.length(); ++t) {
      out.push_back(make_entry(segment.transitions[static_cast<size_t>(t)], t, g, g));
    }
  }
  return out;
}

}  // namespace agrl::algos
