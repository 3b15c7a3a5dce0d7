#pragma once

#include <string>
#include <vector>

#include "agrl/goalspace.hpp"
#include "agrl/rng.hpp"

namespace agrl::pointmaze {

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool contains_open(double px, double py) const {
    return px > x && px < x + w && py > y && py < y + h;
  }
  bool contains_closed(double px, double py) const {
    return px >= x && px <= x + w && py >= y && py <= y + h;
  }
};

struct MazeSpec {
  double x_min = 0.0, x_max = 8.0;
  double y_min = 0.0, y_max = 8.0;
  std::vector<Rect> walls;
  Rect start_region;
  double success_eps = 0.5;

  // Dynamics constants; single source of truth for the point-mass model.
  double dt = 0.1;
  double a_scale = 1.0;
  double drag = 0.1;
  double v_max = 2.0;
  int t_max = 200;

  // Free space = inside bounds, not strictly inside any wall.
  bool free(double px, double py) const;
  void validate() const;
};

// One built-in layout: 8x8 box with a single interior wall arm reaching in
// from the left, so the two chambers connect around the right side. All wall
// faces sit on multiples of 0.5.
MazeSpec umaze();

// JSON document: {bounds:[x0,x1,y0,y1], walls:[{x,y,w,h}...],
// start_region:{x,y,w,h}, success_eps} with optional dynamics overrides.
MazeSpec load_maze(const std::string& path);

struct PointState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  int step_count = 0;
};

struct ContGoal {
  double x = 0.0;
  double y = 0.0;
};

// pos uniform in start_region, vel zero; goal uniform over free space.
// Deterministic in rng state.
std::pair<PointState, ContGoal> reset(const MazeSpec& spec, Rng& rng);

// vel <- clamp(vel*(1-drag) + action*a_scale, v_max per axis), then
// axis-separated integration: a colliding axis stops flush at the wall face
// and zeroes that velocity component. Actions are clamped to [-1,1]^2.
PointState step(const MazeSpec& spec, const PointState& state, double ax, double ay);

// Closed ball: true iff distance <= eps.
bool success(const PointState& state, const ContGoal& goal, double eps);

// [x, y, vx, vy] scaled to roughly [-1, 1].
int observation_size();
void write_observation(const MazeSpec& spec, const PointState& state, float* out);
std::vector<float> observation(const MazeSpec& spec, const PointState& state);

// Quantization grid over the maze with cell centers in free space marked
// valid. Spacing should divide the bound extents.
QuantGrid make_maze_grid(const MazeSpec& spec, double spacing);

// Bit per grid goal iff the agent is within eps_reach of that cell center.
GoalMask achieved_goals(const PointState& state, const QuantGrid& grid, double eps_reach);

}  // namespace agrl::pointmaze
