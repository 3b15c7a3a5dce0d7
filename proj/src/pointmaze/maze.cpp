#include "agrl/pointmaze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "agrl/errors.hpp"

namespace agrl::pointmaze {

using nlohmann::json;

bool MazeSpec::free(double px, double py) const {
  if (px < x_min || px > x_max || py < y_min || py > y_max) return false;
  for (const Rect& wall : walls) {
    if (wall.contains_open(px, py)) return false;
  }
  return true;
}

void MazeSpec::validate() const {
  if (x_max <= x_min || y_max <= y_min) throw ConfigError("maze: empty bounds");
  if (success_eps <= 0.0) throw ConfigError("maze: success_eps must be > 0");
  if (start_region.w <= 0.0 || start_region.h <= 0.0) throw ConfigError("maze: empty start region");
  // Start region must be wall-free.
  for (const Rect& wall : walls) {
    const bool overlap = start_region.x < wall.x + wall.w && wall.x < start_region.x + start_region.w &&
                         start_region.y < wall.y + wall.h && wall.y < start_region.y + start_region.h;
    if (overlap) throw ConfigError("maze: start region intersects a wall");
  }
  // Free space connectivity, checked on a fine probe lattice.
  const double step = 0.25;
  const int nx = static_cast<int>(std::lround((x_max - x_min) / step));
  const int ny = static_cast<int>(std::lround((y_max - y_min) / step));
  std::vector<uint8_t> open(static_cast<size_t>(nx) * ny, 0);
  auto idx = [&](int ix, int iy) { return static_cast<size_t>(iy) * nx + ix; };
  int first = -1;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double px = x_min + (ix + 0.5) * step;
      const double py = y_min + (iy + 0.5) * step;
      if (free(px, py)) {
        open[idx(ix, iy)] = 1;
        if (first < 0) first = static_cast<int>(idx(ix, iy));
      }
    }
  }
  if (first < 0) throw ConfigError("maze: no free space");
  std::vector<uint8_t> seen(open.size(), 0);
  std::vector<int> stack{first};
  seen[static_cast<size_t>(first)] = 1;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    const int cx = cur % nx;
    const int cy = cur / nx;
    const int dr[4] = {0, 0, -1, 1};
    const int dc[4] = {-1, 1, 0, 0};
    for (int d = 0; d < 4; ++d) {
      const int nx2 = cx + dc[d];
      const int ny2 = cy + dr[d];
      if (nx2 < 0 || nx2 >= nx || ny2 < 0 || ny2 >= ny) continue;
      const size_t ni = idx(nx2, ny2);
      if (open[ni] && !seen[ni]) {
        seen[ni] = 1;
        stack.push_back(static_cast<int>(ni));
      }
    }
  }
  for (size_t i = 0; i < open.size(); ++i) {
    if (open[i] && !seen[i]) throw ConfigError("maze: free space is disconnected");
  }
}

MazeSpec umaze() {
  MazeSpec spec;
  spec.walls.push_back({0.0, 3.5, 5.5, 1.0});
  spec.start_region = {0.5, 0.5, 2.0, 2.5};
  spec.validate();
  return spec;
}

MazeSpec load_maze(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open maze spec " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed maze spec " + path + ": " + e.what());
  }
  MazeSpec spec;
  const auto& b = doc.at("bounds");
  spec.x_min = b.at(0).get<double>();
  spec.x_max = b.at(1).get<double>();
  spec.y_min = b.at(2).get<double>();
  spec.y_max = b.at(3).get<double>();
  for (const auto& jw : doc.at("walls")) {
    spec.walls.push_back(
        {jw.at("x").get<double>(), jw.at("y").get<double>(), jw.at("w").get<double>(), jw.at("h").get<double>()});
  }
  const auto& sr = doc.at("start_region");
  spec.start_region = {sr.at("x").get<double>(), sr.at("y").get<double>(), sr.at("w").get<double>(),
                       sr.at("h").get<double>()};
  spec.success_eps = doc.at("success_eps").get<double>();
  spec.dt = doc.value("dt", spec.dt);
  spec.a_scale = doc.value("a_scale", spec.a_scale);
  spec.drag = doc.value("drag", spec.drag);
  spec.v_max = doc.value("v_max", spec.v_max);
  spec.t_max = doc.value("t_max", spec.t_max);
  spec.validate();
  return spec;
}

std::pair<PointState, ContGoal> reset(const MazeSpec& spec, Rng& rng) {
  PointState s;
  s.x = spec.start_region.x + rng.uniform() * spec.start_region.w;
  s.y = spec.start_region.y + rng.uniform() * spec.start_region.h;
  s.vx = 0.0;
  s.vy = 0.0;
  s.step_count = 0;
  ContGoal g;
  for (int guard = 0; guard < 10000; ++guard) {
    g.x = rng.uniform_range(spec.x_min, spec.x_max);
    g.y = rng.uniform_range(spec.y_min, spec.y_max);
    if (spec.free(g.x, g.y)) return {s, g};
  }
  throw ConfigError("maze reset: rejection sampling found no free goal");
}

namespace {

// Move one axis; clamps at the first crossed wall face or bound and zeroes
// the velocity component on contact. The other coordinate is fixed.
void move_axis(const MazeSpec& spec, double& pos, double& vel, double other, bool is_x) {
  double target = pos + vel * spec.dt;
  const double lo = is_x ? spec.x_min : spec.y_min;
  const double hi = is_x ? spec.x_max : spec.y_max;
  bool hit = false;
  if (target < lo) {
    target = lo;
    hit = true;
  } else if (target > hi) {
    target = hi;
    hit = true;
  }
  for (const Rect& wall : spec.walls) {
    const double w_lo = is_x ? wall.x : wall.y;
    const double w_hi = is_x ? wall.x + wall.w : wall.y + wall.h;
    const double o_lo = is_x ? wall.y : wall.x;
    const double o_hi = is_x ? wall.y + wall.h : wall.x + wall.w;
    if (!(other > o_lo && other < o_hi)) continue;
    if (vel > 0.0 && pos <= w_lo && target > w_lo) {
      target = w_lo;
      hit = true;
    } else if (vel < 0.0 && pos >= w_hi && target < w_hi) {
      target = w_hi;
      hit = true;
    }
  }
  pos = target;
  if (hit) vel = 0.0;
}

}  // namespace

PointState step(const MazeSpec& spec, const PointState& state, double ax, double ay) {
  ax = std::clamp(ax, -1.0, 1.0);
  ay = std::clamp(ay, -1.0, 1.0);
  PointState next = state;
  next.vx = std::clamp(state.vx * (1.0 - spec.drag) + ax * spec.a_scale, -spec.v_max, spec.v_max);
  next.vy = std::clamp(state.vy * (1.0 - spec.drag) + ay * spec.a_scale, -spec.v_max, spec.v_max);
  move_axis(spec, next.x, next.vx, next.y, /*is_x=*/true);
  move_axis(spec, next.y, next.vy, next.x, /*is_x=*/false);
  next.step_count = state.step_count + 1;
  return next;
}

bool success(const PointState& state, const ContGoal& goal, double eps) {
  if (eps <= 0.0) throw ConfigError("pointmaze success: eps must be > 0");
  const double dx = state.x - goal.x;
  const double dy = state.y - goal.y;
  return dx * dx + dy * dy <= eps * eps;
}

int observation_size() { return 4; }

void write_observation(const MazeSpec& spec, const PointState& state, float* out) {
  const double sx = 2.0 / (spec.x_max - spec.x_min);
  const double sy = 2.0 / (spec.y_max - spec.y_min);
  out[0] = static_cast<float>((state.x - spec.x_min) * sx - 1.0);
  out[1] = static_cast<float>((state.y - spec.y_min) * sy - 1.0);
  out[2] = static_cast<float>(state.vx / spec.v_max);
  out[3] = static_cast<float>(state.vy / spec.v_max);
}

std::vector<float> observation(const MazeSpec& spec, const PointState& state) {
  std::vector<float> obs(4);
  write_observation(spec, state, obs.data());
  return obs;
}

QuantGrid make_maze_grid(const MazeSpec& spec, double spacing) {
  const int nx = static_cast<int>(std::lround((spec.x_max - spec.x_min) / spacing));
  const int ny = static_cast<int>(std::lround((spec.y_max - spec.y_min) / spacing));
  std::vector<uint8_t> valid(static_cast<size_t>(nx) * ny, 0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double cx = spec.x_min + (ix + 0.5) * spacing;
      const double cy = spec.y_min + (iy + 0.5) * spacing;
      valid[static_cast<size_t>(iy) * nx + ix] = spec.free(cx, cy) ? 1 : 0;
    }
  }
  return make_quant_grid(spec.x_min, spec.y_min, spacing, nx, ny, valid);
}

GoalMask achieved_goals(const PointState& state, const QuantGrid& grid, double eps_reach) {
  GoalMask mask(static_cast<size_t>(grid.num_goals()), 0);
  const double r2 = eps_reach * eps_reach;
  for (int g = 0; g < grid.num_goals(); ++g) {
    double cx, cy;
    grid.center(grid.cells[static_cast<size_t>(g)], &cx, &cy);
    const double dx = state.x - cx;
    const double dy = state.y - cy;
    if (dx * dx + dy * dy <= r2) mask[static_cast<size_t>(g)] = 1;
  }
  return mask;
}

}  // namespace agrl::pointmaze
