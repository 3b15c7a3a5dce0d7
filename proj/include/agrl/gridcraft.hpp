#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agrl/rng.hpp"

namespace agrl::gridcraft {

enum class Block : uint8_t {
  Grass = 0,
  Tree,
  Stone,
  Water,
  CoalOre,
  CraftingTable,
  Path,
};
constexpr int kNumBlockTypes = 7;

enum class Dir : uint8_t { Up = 0, Down, Left, Right };

// Action indices are part of the external contract: 0..3 move/turn, 4 Do,
// 5 Craft.
enum class Action : uint8_t { Up = 0, Down, Left, Right, Do, Craft };
constexpr int kNumActions = 6;

constexpr int kMaxInventory = 9;
constexpr int kDefaultTMax = 200;
constexpr int kViewRadius = 3;

struct Inventory {
  int wood = 0;
  int stone = 0;
  int coal = 0;
  bool operator==(const Inventory&) const = default;
};

struct Tools {
  bool wood_pickaxe = false;
  bool stone_pickaxe = false;
  bool operator==(const Tools&) const = default;
};

// Value type; step() is pure. Dynamics are fully deterministic, rng_state is
// carried for the generator and reserved for stochastic extensions.
struct WorldState {
  int size = 0;
  std::vector<Block> grid;  // [size * size], row-major
  int agent_row = 0;
  int agent_col = 0;
  Dir facing = Dir::Down;
  Inventory inventory;
  Tools tools;
  int step_count = 0;
  uint64_t rng_state = 0;

  Block at(int r, int c) const { return grid[static_cast<size_t>(r) * size + c]; }
  void set(int r, int c, Block b) { grid[static_cast<size_t>(r) * size + c] = b; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < size && c >= 0 && c < size; }
  bool walkable(int r, int c) const {
    if (!in_bounds(r, c)) return false;
    const Block b = at(r, c);
    return b == Block::Grass || b == Block::Path;
  }
  bool operator==(const WorldState&) const = default;
};

// Procedural generation, deterministic in (seed, size). Retries layouts until
// the reachability constraints hold: a connected walkable region containing
// the agent, at least one tree / stone / water / crafting table interactable
// from it, and a coal vein sealed behind minable stone. Throws after a
// bounded number of attempts. size must be >= 6.
WorldState generate_world(uint64_t seed, int size);

// One deterministic transition. Movement actions set facing and move when
// the target cell is walkable (turn in place otherwise). Do interacts with
// the faced cell: Tree -> +1 wood (becomes Grass), Stone -> +1 stone with a
// wood pickaxe (becomes Path), CoalOre -> +1 coal with a stone pickaxe
// (becomes Path); collecting at 9 held is a no-op. Craft next to a crafting
// table makes the wood pickaxe first (1 wood), then the stone pickaxe
// (1 wood + 1 stone). Invalid interactions are no-ops. step_count always
// advances.
WorldState step(const WorldState& state, Action action);

// Fixed-length one-hot observation: (2k+1)^2 local view over block channels
// plus an out-of-bounds channel, thermometer-coded inventory, tool flags,
// facing one-hot.
int observation_size();
void write_observation(const WorldState& state, float* out);
std::vector<float> observation(const WorldState& state);

bool episode_over(const WorldState& state, int t_max = kDefaultTMax);

// Debug rendering: one character per block plus an agent marker and a status
// line with facing/inventory.
std::string render(const WorldState& state);

const char* block_name(Block b);
const char* dir_name(Dir d);

}  // namespace agrl::gridcraft
