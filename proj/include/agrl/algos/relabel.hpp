#pragma once

#include <string>
#include <vector>

#include "agrl/rng.hpp"
#include "agrl/transition.hpp"

namespace agrl::algos {

enum class HerStrategy { None, Random, Positive, Mixed };

HerStrategy her_strategy_from_string(const std::string& s);

struct HerParams {
  HerStrategy strategy = HerStrategy::Mixed;
  int n_random = 1;    // Random(n) / the n of Mixed(n + m)
  int m_positive = 1;  // Positive(m) / the m of Mixed(n + m)
  bool per_trajectory = true;
};

// One synthesized (transition, goal) pair. reward/done are re-derived from
// the stored achieved mask for the relabel goal, never copied from the
// commanded channel. Entries sharing `group` were relabelled together: a
// per-trajectory group spans the whole segment with one goal, so Q(lambda)
// targets may run along it; per-transition entries get singleton groups.
struct RelabelEntry {
  int t = 0;
  GoalId goal = 0;
  float reward = 0.0f;
  uint8_t done = 0;
  int group = 0;
};

// Hindsight relabelling. Per transition: Random draws fresh goals uniformly
// per timestep; Positive draws among the goals achieved at that timestep
// (slot skipped when nothing was achieved). Per trajectory: goals are drawn
// once, Random uniformly and Positive among the goals achieved at the final
// transition, and the whole segment is relabelled the same.
std::vector<RelabelEntry> her_relabel(const Segment& segment, const HerParams& params,
                                      int num_goals, Rng& rng);

// The full cross product: every goal relabels every transition
// (|G| * segment length entries, grouped per goal).
std::vector<RelabelEntry> naive_all_goals_relabel(const Segment& segment, int num_goals);

}  // namespace agrl::algos
