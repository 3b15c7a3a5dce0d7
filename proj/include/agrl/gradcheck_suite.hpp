#pragma once

#include <string>
#include <vector>

namespace agrl {

// Finite-difference sweep over every loss the algorithms use, on tiny seeded
// nets and synthetic batches. Backs the gradcheck command and acceptance
// criterion coverage. threshold: quadratic sanity must land under 1e-6, the
// network losses under 1e-3.
struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  double threshold = 1e-3;
  bool passed() const { return max_rel_err < threshold; }
};

// method filter: empty = everything; otherwise one of quadratic, uvfa_q,
// leo_q, ppo, dual_leo_ppo, leo_dpg.
std::vector<GradCheckEntry> run_gradcheck_suite(uint64_t seed, const std::string& method = "");

}  // namespace agrl
