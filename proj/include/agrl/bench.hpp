#pragma once

#include <string>
#include <vector>

#include "agrl/train_config.hpp"

namespace agrl::bench {

// Update-loop throughput comparison across goal-set sizes. All methods in
// one invocation share the net width, minibatch size, segment length, lane
// count, and goal set, so the only variable is how each method consumes the
// stream:
//   single_goal   - goal-as-input net updated on the commanded channel only
//   leo           - all-goals head updated once per transition
//   naive_relabel - goal-as-input net updated on the full |G| cross product
// Goal counts beyond the concrete environment set are synthesized by tiling
// the achieved masks; update cost depends only on |G| and the net shapes.
struct BenchResult {
  int goal_count = 0;
  std::string method;
  double sps = 0.0;  // environment steps per second through the chosen loop
};

struct BenchOptions {
  std::vector<std::string> methods{"single_goal", "leo", "naive_relabel"};
  std::vector<int> goal_counts{4, 16, 64};
  int64_t steps = 4096;     // measured environment steps per point
  bool update_only = false; // exclude collection when true (default: full loop)
  uint64_t seed = 0;
  TrainConfig train;        // width/minibatch/segment sizing shared by all methods
};

std::vector<BenchResult> run_bench(const BenchOptions& options);

std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace agrl::bench
