#include <algorithm>
#include <sstream>

#include "agrl/errors.hpp"
#include "agrl/gridcraft.hpp"

namespace agrl::gridcraft {

namespace {

constexpr int kRowDelta[4] = {-1, 1, 0, 0};  // Up, Down, Left, Right
constexpr int kColDelta[4] = {0, 0, -1, 1};

struct Cell {
  int r, c;
};

std::vector<uint8_t> reachable_walkable(const WorldState& w) {
  std::vector<uint8_t> seen(w.grid.size(), 0);
  if (!w.walkable(w.agent_row, w.agent_col)) return seen;
  std::vector<Cell> stack{{w.agent_row, w.agent_col}};
  seen[static_cast<size_t>(w.agent_row) * w.size + w.agent_col] = 1;
  while (!stack.empty()) {
    const Cell cur = stack.back();
    stack.pop_back();
    for (int d = 0; d < 4; ++d) {
      const int nr = cur.r + kRowDelta[d];
      const int nc = cur.c + kColDelta[d];
      if (!w.walkable(nr, nc)) continue;
      uint8_t& mark = seen[static_cast<size_t>(nr) * w.size + nc];
      if (!mark) {
        mark = 1;
        stack.push_back({nr, nc});
      }
    }
  }
  return seen;
}

bool adjacent_to_reachable(const WorldState& w, const std::vector<uint8_t>& reach, int r, int c) {
  for (int d = 0; d < 4; ++d) {
    const int nr = r + kRowDelta[d];
    const int nc = c + kColDelta[d];
    if (w.in_bounds(nr, nc) && reach[static_cast<size_t>(nr) * w.size + nc]) return true;
  }
  return false;
}

// Layout constraint check shared by the generator's retry loop.
bool constraints_hold(const WorldState& w) {
  const auto reach = reachable_walkable(w);
  bool tree = false, stone = false, water = false, table = false;
  for (int r = 0; r < w.size; ++r) {
    for (int c = 0; c < w.size; ++c) {
      if (!adjacent_to_reachable(w, reach, r, c)) continue;
      switch (w.at(r, c)) {
        case Block::Tree: tree = true; break;
        case Block::Stone: stone = true; break;
        case Block::Water: water = true; break;
        case Block::CraftingTable: table = true; break;
        default: break;
      }
    }
  }
  if (!(tree && stone && water && table)) return false;

  // Coal must exist and be openable: some stone neighbor of a coal cell is
  // itself interactable from the walkable region.
  bool coal_ok = false;
  for (int r = 0; r < w.size && !coal_ok; ++r) {
    for (int c = 0; c < w.size && !coal_ok; ++c) {
      if (w.at(r, c) != Block::CoalOre) continue;
      for (int d = 0; d < 4; ++d) {
        const int nr = r + kRowDelta[d];
        const int nc = c + kColDelta[d];
        if (w.in_bounds(nr, nc) && w.at(nr, nc) == Block::Stone &&
            adjacent_to_reachable(w, reach, nr, nc)) {
          coal_ok = true;
          break;
        }
      }
    }
  }
  return coal_ok;
}

void scatter_blob(WorldState& w, Rng& rng, Block block, int target_cells) {
  int r = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(w.size - 2)));
  int c = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(w.size - 2)));
  for (int placed = 0, guard = 0; placed < target_cells && guard < target_cells * 8; ++guard) {
    if (w.at(r, c) == Block::Grass) {
      w.set(r, c, block);
      ++placed;
    }
    const int d = static_cast<int>(rng.uniform_int(4));
    const int nr = r + kRowDelta[d];
    const int nc = c + kColDelta[d];
    if (w.in_bounds(nr, nc)) {
      r = nr;
      c = nc;
    }
  }
}

WorldState attempt_layout(uint64_t seed, int size, int attempt) {
  Rng rng(Rng::mix(seed, 0x77677 + static_cast<uint64_t>(attempt)));
  WorldState w;
  w.size = size;
  w.grid.assign(static_cast<size_t>(size) * size, Block::Grass);
  w.rng_state = rng.next_u64();

  const int area = size * size;
  scatter_blob(w, rng, Block::Water, std::max(2, area / 18));
  const int tree_cells = std::max(4, area / 9);
  for (int i = 0; i < tree_cells; ++i) {
    const int r = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    const int c = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    if (w.at(r, c) == Block::Grass) w.set(r, c, Block::Tree);
  }
  scatter_blob(w, rng, Block::Stone, std::max(5, area / 10));

  // Coal vein wrapped in stone so a pickaxe chain is always required.
  const int vein = 1 + static_cast<int>(rng.uniform_int(9));
  {
    const int r = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size - 2)));
    const int c = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size - 2)));
    std::vector<Cell> cells{{r, c}};
    w.set(r, c, Block::CoalOre);
    for (int i = 1, guard = 0; i < vein && guard < 64; ++guard) {
      const Cell base = cells[rng.uniform_int(cells.size())];
      const int d = static_cast<int>(rng.uniform_int(4));
      const int nr = base.r + kRowDelta[d];
      const int nc = base.c + kColDelta[d];
      if (nr > 0 && nr < size - 1 && nc > 0 && nc < size - 1 && w.at(nr, nc) != Block::CoalOre) {
        w.set(nr, nc, Block::CoalOre);
        cells.push_back({nr, nc});
        ++i;
      }
    }
    for (const Cell& cell : cells) {
      for (int d = 0; d < 4; ++d) {
        const int nr = cell.r + kRowDelta[d];
        const int nc = cell.c + kColDelta[d];
        if (w.in_bounds(nr, nc) && w.at(nr, nc) != Block::CoalOre) w.set(nr, nc, Block::Stone);
      }
    }
  }

  // Crafting table on some grass cell.
  for (int guard = 0; guard < 64; ++guard) {
    const int r = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    const int c = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    if (w.at(r, c) == Block::Grass) {
      w.set(r, c, Block::CraftingTable);
      break;
    }
  }

  // Agent on a grass cell.
  for (int guard = 0; guard < 256; ++guard) {
    const int r = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    const int c = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(size)));
    if (w.at(r, c) == Block::Grass) {
      w.agent_row = r;
      w.agent_col = c;
      break;
    }
  }
  w.facing = static_cast<Dir>(rng.uniform_int(4));
  return w;
}

}  // namespace

WorldState generate_world(uint64_t seed, int size) {
  if (size < 6) throw ConfigError("gridcraft world size must be >= 6");
  constexpr int kMaxAttempts = 256;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    WorldState w = attempt_layout(seed, size, attempt);
    if (constraints_hold(w)) return w;
  }
  throw ConfigError("gridcraft generator exhausted " + std::to_string(kMaxAttempts) +
                    " attempts for seed " + std::to_string(seed));
}

WorldState step(const WorldState& state, Action action) {
  WorldState next = state;
  next.step_count = state.step_count + 1;
  switch (action) {
    case Action::Up:
    case Action::Down:
    case Action::Left:
    case Action::Right: {
      const int d = static_cast<int>(action);
      next.facing = static_cast<Dir>(d);
      const int nr = state.agent_row + kRowDelta[d];
      const int nc = state.agent_col + kColDelta[d];
      if (next.walkable(nr, nc)) {
        next.agent_row = nr;
        next.agent_col = nc;
      }
      return next;
    }
    case Action::Do: {
      const int d = static_cast<int>(state.facing);
      const int fr = state.agent_row + kRowDelta[d];
      const int fc = state.agent_col + kColDelta[d];
      if (!next.in_bounds(fr, fc)) return next;
      switch (next.at(fr, fc)) {
        case Block::Tree:
          if (next.inventory.wood < kMaxInventory) {
            next.inventory.wood += 1;
            next.set(fr, fc, Block::Grass);
          }
          break;
        case Block::Stone:
          if (next.tools.wood_pickaxe && next.inventory.stone < kMaxInventory) {
            next.inventory.stone += 1;
            next.set(fr, fc, Block::Path);
          }
          break;
        case Block::CoalOre:
          if (next.tools.stone_pickaxe && next.inventory.coal < kMaxInventory) {
            next.inventory.coal += 1;
            next.set(fr, fc, Block::Path);
          }
          break;
        default:
          break;
      }
      return next;
    }
    case Action::Craft: {
      bool near_table = false;
      for (int d = 0; d < 4; ++d) {
        const int nr = state.agent_row + kRowDelta[d];
        const int nc = state.agent_col + kColDelta[d];
        if (next.in_bounds(nr, nc) && next.at(nr, nc) == Block::CraftingTable) {
          near_table = true;
          break;
        }
      }
      if (!near_table) return next;
      if (!next.tools.wood_pickaxe) {
        if (next.inventory.wood >= 1) {
          next.inventory.wood -= 1;
          next.tools.wood_pickaxe = true;
        }
      } else if (!next.tools.stone_pickaxe) {
        if (next.inventory.wood >= 1 && next.inventory.stone >= 1) {
          next.inventory.wood -= 1;
          next.inventory.stone -= 1;
          next.tools.stone_pickaxe = true;
        }
      }
      return next;
    }
  }
  return next;
}

int observation_size() {
  const int window = (2 * kViewRadius + 1) * (2 * kViewRadius + 1);
  return window * (kNumBlockTypes + 1) + 3 * kMaxInventory + 2 + 4;
}

void write_observation(const WorldState& state, float* out) {
  const int span = 2 * kViewRadius + 1;
  const int channels = kNumBlockTypes + 1;  // out-of-bounds is its own channel
  int idx = 0;
  for (int dr = -kViewRadius; dr <= kViewRadius; ++dr) {
    for (int dc = -kViewRadius; dc <= kViewRadius; ++dc) {
      const int r = state.agent_row + dr;
      const int c = state.agent_col + dc;
      for (int ch = 0; ch < channels; ++ch) out[idx + ch] = 0.0f;
      if (state.in_bounds(r, c)) {
        out[idx + static_cast<int>(state.at(r, c))] = 1.0f;
      } else {
        out[idx + kNumBlockTypes] = 1.0f;
      }
      idx += channels;
    }
  }
  (void)span;
  auto thermometer = [&](int count) {
    for (int i = 0; i < kMaxInventory; ++i) out[idx++] = count > i ? 1.0f : 0.0f;
  };
  thermometer(state.inventory.wood);
  thermometer(state.inventory.stone);
  thermometer(state.inventory.coal);
  out[idx++] = state.tools.wood_pickaxe ? 1.0f : 0.0f;
  out[idx++] = state.tools.stone_pickaxe ? 1.0f : 0.0f;
  for (int d = 0; d < 4; ++d) out[idx++] = static_cast<int>(state.facing) == d ? 1.0f : 0.0f;
}

std::vector<float> observation(const WorldState& state) {
  std::vector<float> obs(static_cast<size_t>(observation_size()));
  write_observation(state, obs.data());
  return obs;
}

bool episode_over(const WorldState& state, int t_max) { return state.step_count >= t_max; }

const char* block_name(Block b) {
  switch (b) {
    case Block::Grass: return "grass";
    case Block::Tree: return "tree";
    case Block::Stone: return "stone";
    case Block::Water: return "water";
    case Block::CoalOre: return "coal_ore";
    case Block::CraftingTable: return "crafting_table";
    case Block::Path: return "path";
  }
  return "?";
}

const char* dir_name(Dir d) {
  switch (d) {
    case Dir::Up: return "up";
    case Dir::Down: return "down";
    case Dir::Left: return "left";
    case Dir::Right: return "right";
  }
  return "?";
}

std::string render(const WorldState& state) {
  static constexpr char kGlyph[] = {'.', 'T', 'S', '~', 'C', '#', ','};
  std::ostringstream os;
  for (int r = 0; r < state.size; ++r) {
    for (int c = 0; c < state.size; ++c) {
      if (r == state.agent_row && c == state.agent_col) {
        os << '@';
      } else {
        os << kGlyph[static_cast<int>(state.at(r, c))];
      }
    }
    os << '\n';
  }
  os << "facing=" << dir_name(state.facing) << " wood=" << state.inventory.wood
     << " stone=" << state.inventory.stone << " coal=" << state.inventory.coal
     << " picks=" << (state.tools.wood_pickaxe ? "w" : "-")
     << (state.tools.stone_pickaxe ? "s" : "-") << " t=" << state.step_count << '\n';
  return os.str();
}

}  // namespace agrl::gridcraft
