#include "agrl/goalspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "agrl/errors.hpp"

namespace agrl {

using nlohmann::json;

GoalId GoalSet::find(const std::string& name) const {
  for (size_t i = 0; i < goals.size(); ++i) {
    if (goals[i].name == name) return static_cast<GoalId>(i);
  }
  return -1;
}

void GoalSet::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& g : goals) {
    if (g.name.empty()) throw ConfigError("goal with empty name");
    if (!names.insert(g.name).second) throw ConfigError("duplicate goal name: " + g.name);
  }
}

std::string GoalSet::table() const {
  std::ostringstream os;
  os << "id\tname\tcategory\n";
  for (size_t i = 0; i < goals.size(); ++i) {
    os << i << '\t' << goals[i].name << '\t' << goals[i].category << '\n';
  }
  return os.str();
}

namespace {

const char* kind_str(GoalSpec::Kind k) {
  switch (k) {
    case GoalSpec::Kind::InventoryCount: return "inventory_count";
    case GoalSpec::Kind::Tool: return "tool";
    case GoalSpec::Kind::BlockAdjacent: return "block_adjacent";
    case GoalSpec::Kind::GridCell: return "grid_cell";
  }
  return "?";
}

GoalSpec::Kind kind_from_str(const std::string& s) {
  if (s == "inventory_count") return GoalSpec::Kind::InventoryCount;
  if (s == "tool") return GoalSpec::Kind::Tool;
  if (s == "block_adjacent") return GoalSpec::Kind::BlockAdjacent;
  if (s == "grid_cell") return GoalSpec::Kind::GridCell;
  throw ConfigError("unknown goal kind: " + s);
}

}  // namespace

GoalSet load_goal_set(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open goal set " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw IoError("malformed goal set " + path + ": " + e.what());
  }
  GoalSet gs;
  for (const auto& jg : doc.at("goals")) {
    GoalSpec g;
    g.name = jg.at("name").get<std::string>();
    g.category = jg.at("category").get<std::string>();
    g.kind = kind_from_str(jg.at("kind").get<std::string>());
    g.a = jg.value("a", 0);
    g.b = jg.value("b", 0);
    gs.goals.push_back(std::move(g));
  }
  gs.validate();
  return gs;
}

void save_goal_set(const std::string& path, const GoalSet& gs) {
  json doc;
  doc["goals"] = json::array();
  for (const auto& g : gs.goals) {
    doc["goals"].push_back({{"name", g.name},
                            {"category", g.category},
                            {"kind", kind_str(g.kind)},
                            {"a", g.a},
                            {"b", g.b}});
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write goal set " + path);
  f << doc.dump(2) << "\n";
}

RewardTermVector reward_term_vector(const GoalMask& achieved_now, bool episode_done) {
  RewardTermVector v;
  v.rewards.resize(achieved_now.size());
  v.dones.resize(achieved_now.size());
  for (size_t g = 0; g < achieved_now.size(); ++g) {
    v.rewards[g] = achieved_now[g] ? 1.0f : 0.0f;
    v.dones[g] = (achieved_now[g] || episode_done) ? 1 : 0;
  }
  return v;
}

GoalSet QuantGrid::goal_set() const {
  GoalSet gs;
  for (size_t gid = 0; gid < cells.size(); ++gid) {
    const int cell = cells[gid];
    GoalSpec g;
    g.name = "grid/x" + std::to_string(cell % nx) + "_y" + std::to_string(cell / nx);
    g.category = "grid";
    g.kind = GoalSpec::Kind::GridCell;
    g.a = cell;
    gs.goals.push_back(std::move(g));
  }
  return gs;
}

QuantGrid make_quant_grid(double origin_x, double origin_y, double spacing, int nx, int ny,
                          const std::vector<uint8_t>& valid) {
  if (spacing <= 0.0 || nx < 1 || ny < 1) throw ConfigError("quant grid: bad dimensions");
  if (valid.size() != static_cast<size_t>(nx) * ny) {
    throw ConfigError("quant grid: validity mask size mismatch");
  }
  QuantGrid grid;
  grid.origin_x = origin_x;
  grid.origin_y = origin_y;
  grid.spacing = spacing;
  grid.nx = nx;
  grid.ny = ny;
  grid.valid = valid;
  grid.goal_ids.assign(valid.size(), -1);
  for (size_t cell = 0; cell < valid.size(); ++cell) {
    if (valid[cell]) {
      grid.goal_ids[cell] = static_cast<GoalId>(grid.cells.size());
      grid.cells.push_back(static_cast<int>(cell));
    }
  }
  if (grid.cells.empty()) throw ConfigError("quant grid: no valid cell");
  return grid;
}

GoalId quantize_goal(double x, double y, const QuantGrid& grid) {
  if (grid.cells.empty()) throw ConfigError("quantize_goal: degenerate grid");
  // Snap to the containing cell, then search outward ring by ring. All cells
  // at the best distance are visited before the scan stops, so the lowest
  // cell index wins exact ties, matching an exhaustive scan.
  const double fx = (x - grid.origin_x) / grid.spacing - 0.5;
  const double fy = (y - grid.origin_y) / grid.spacing - 0.5;
  const int cx = std::clamp(static_cast<int>(std::lround(fx)), 0, grid.nx - 1);
  const int cy = std::clamp(static_cast<int>(std::lround(fy)), 0, grid.ny - 1);

  double best_d2 = std::numeric_limits<double>::infinity();
  int best_cell = -1;
  const int max_ring = std::max(grid.nx, grid.ny);
  for (int ring = 0; ring <= max_ring; ++ring) {
    // Closest possible squared distance for cells in this ring.
    if (best_cell >= 0) {
      const double ring_min = (ring - 1) * grid.spacing;
      if (ring >= 1 && ring_min > 0.0 && ring_min * ring_min > best_d2) break;
    }
    for (int iy = cy - ring; iy <= cy + ring; ++iy) {
      if (iy < 0 || iy >= grid.ny) continue;
      for (int ix = cx - ring; ix <= cx + ring; ++ix) {
        if (ix < 0 || ix >= grid.nx) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
        const int cell = grid.cell_index(ix, iy);
        if (!grid.valid[static_cast<size_t>(cell)]) continue;
        double gx, gy;
        grid.center(cell, &gx, &gy);
        const double d2 = (gx - x) * (gx - x) + (gy - y) * (gy - y);
        if (d2 < best_d2 || (d2 == best_d2 && cell < best_cell)) {
          best_d2 = d2;
          best_cell = cell;
        }
      }
    }
  }
  return grid.goal_ids[static_cast<size_t>(best_cell)];
}

bool quantization_adequacy(double spacing, double eps_reach, double eps) {
  return spacing * std::sqrt(2.0) / 2.0 + eps_reach <= eps;
}

int SeenGoalTracker::num_seen() const {
  int n = 0;
  for (uint8_t s : seen) n += s ? 1 : 0;
  return n;
}

void tracker_update(SeenGoalTracker& tracker, const GoalMask& achieved) {
  if (achieved.size() != tracker.seen.size()) {
    throw ShapeError("tracker_update: mask length mismatch");
  }
  for (size_t g = 0; g < achieved.size(); ++g) {
    if (achieved[g]) {
      tracker.seen[g] = 1;
      tracker.counts[g] += 1;
    }
  }
}

GoalId sample_command_goal(const SeenGoalTracker& tracker, const GoalSet& gs, Rng& rng,
                           GoalId fallback, bool restrict_to_seen) {
  if (gs.size() == 0) throw ConfigError("sample_command_goal: empty goal set");
  if (!restrict_to_seen) {
    return static_cast<GoalId>(rng.uniform_int(static_cast<uint64_t>(gs.size())));
  }
  const int n_seen = tracker.num_seen();
  if (n_seen == 0) return fallback;
  int pick = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(n_seen)));
  for (size_t g = 0; g < tracker.seen.size(); ++g) {
    if (tracker.seen[g] && pick-- == 0) return static_cast<GoalId>(g);
  }
  return fallback;  // unreachable
}

GoalSet subsample_goals(const GoalSet& gs, int k, uint64_t seed,
                        const std::vector<std::string>& must_include) {
  if (k < 0 || k > gs.size()) throw ConfigError("subsample_goals: k out of range");
  if (static_cast<int>(must_include.size()) > k) {
    throw ConfigError("subsample_goals: must_include larger than k");
  }
  std::vector<uint8_t> chosen(gs.goals.size(), 0);
  int n_chosen = 0;
  for (const auto& name : must_include) {
    const GoalId g = gs.find(name);
    if (g < 0) throw ConfigError("subsample_goals: unknown goal " + name);
    if (!chosen[static_cast<size_t>(g)]) {
      chosen[static_cast<size_t>(g)] = 1;
      ++n_chosen;
    }
  }
  std::vector<int> pool;
  for (int g = 0; g < gs.size(); ++g) {
    if (!chosen[static_cast<size_t>(g)]) pool.push_back(g);
  }
  Rng rng(Rng::mix(seed, 0x5b5bULL));
  while (n_chosen < k) {
    const size_t i = rng.uniform_int(pool.size());
    chosen[static_cast<size_t>(pool[i])] = 1;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    ++n_chosen;
  }
  GoalSet out;
  for (int g = 0; g < gs.size(); ++g) {
    if (chosen[static_cast<size_t>(g)]) out.goals.push_back(gs.goals[static_cast<size_t>(g)]);
  }
  return out;
}

}  // namespace agrl
