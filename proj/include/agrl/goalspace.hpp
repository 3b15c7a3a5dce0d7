#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agrl/rng.hpp"

namespace agrl {

using GoalId = int32_t;
// One byte per goal; avoids vector<bool> proxy semantics in hot loops.
using GoalMask = std::vector<uint8_t>;

// Declarative predicate parameters. The environments interpret the kinds
// they support; evaluating an unsupported kind is an error.
struct GoalSpec {
  enum class Kind : uint8_t {
    InventoryCount,  // a = item index, b = exact count
    Tool,            // a = tool index
    BlockAdjacent,   // a = block index, b = direction index
    GridCell,        // a = quantization cell index
  };
  std::string name;
  std::string category;
  Kind kind = Kind::InventoryCount;
  int a = 0;
  int b = 0;
};

// Finite ordered goal universe. Ids are dense 0..size-1 and names unique.
struct GoalSet {
  std::vector<GoalSpec> goals;

  int size() const { return static_cast<int>(goals.size()); }
  const GoalSpec& spec(GoalId g) const { return goals[static_cast<size_t>(g)]; }
  // -1 when absent.
  GoalId find(const std::string& name) const;
  void validate() const;

  // Text table (id, name, category) for the list-goals command.
  std::string table() const;
};

// JSON goal-set definition file round trip.
GoalSet load_goal_set(const std::string& path);
void save_goal_set(const std::string& path, const GoalSet& gs);

struct RewardTermVector {
  std::vector<float> rewards;  // each 0 or 1
  std::vector<uint8_t> dones;  // bootstrapping stops where set

  int size() const { return static_cast<int>(rewards.size()); }
};

// rewards[g] = achieved bit; dones[g] = achieved bit OR episode_done (a true
// episode end stops bootstrapping for every goal).
RewardTermVector reward_term_vector(const GoalMask& achieved_now, bool episode_done);

// Uniform grid of candidate goal cells over a 2D workspace; cells whose
// center is blocked are invalid and carry no goal id.
struct QuantGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double spacing = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<uint8_t> valid;    // [nx * ny]
  std::vector<GoalId> goal_ids;  // [nx * ny], -1 for invalid cells
  std::vector<int> cells;        // goal id -> cell index

  int cell_index(int ix, int iy) const { return iy * nx + ix; }
  void center(int cell, double* x, double* y) const {
    *x = origin_x + (cell % nx + 0.5) * spacing;
    *y = origin_y + (cell / nx + 0.5) * spacing;
  }
  int num_goals() const { return static_cast<int>(cells.size()); }

  // Derived goal set with one entry per valid cell.
  GoalSet goal_set() const;
};

// Builds goal id tables from a validity predicate over cell centers.
QuantGrid make_quant_grid(double origin_x, double origin_y, double spacing, int nx, int ny,
                          const std::vector<uint8_t>& valid);

// Nearest valid cell center by Euclidean distance (ties by lowest cell
// index). Throws when the grid has no valid cell.
GoalId quantize_goal(double x, double y, const QuantGrid& grid);

// True iff reaching within eps_reach of the snapped center guarantees being
// within eps of the original continuous goal: h*sqrt(2)/2 + eps_reach <= eps.
bool quantization_adequacy(double spacing, double eps_reach, double eps);

// Autocurriculum bookkeeping. seen[g] is monotone; counts[g] >= 1 iff seen.
struct SeenGoalTracker {
  std::vector<uint8_t> seen;
  std::vector<int64_t> counts;

  explicit SeenGoalTracker(int num_goals = 0)
      : seen(static_cast<size_t>(num_goals), 0), counts(static_cast<size_t>(num_goals), 0) {}
  int size() const { return static_cast<int>(seen.size()); }
  int num_seen() const;
};

void tracker_update(SeenGoalTracker& tracker, const GoalMask& achieved);

// Uniform over seen goals; fallback when nothing is seen yet. With
// restrict_to_seen = false (autocurriculum off) samples uniformly over the
// whole set.
GoalId sample_command_goal(const SeenGoalTracker& tracker, const GoalSet& gs, Rng& rng,
                           GoalId fallback, bool restrict_to_seen = true);

// Uniform sample of k goals without replacement, forced to contain
// must_include; ids re-densified in original order. Deterministic in seed.
GoalSet subsample_goals(const GoalSet& gs, int k, uint64_t seed,
                        const std::vector<std::string>& must_include);

}  // namespace agrl
