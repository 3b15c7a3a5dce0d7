#include "agrl/gridcraft_goals.hpp"

#include "agrl/errors.hpp"

namespace agrl::gridcraft {

namespace {

constexpr int kRowDelta[4] = {-1, 1, 0, 0};  // Up, Down, Left, Right
constexpr int kColDelta[4] = {0, 0, -1, 1};
constexpr const char* kDirSuffix[4] = {"up", "down", "left", "right"};

enum Item { kWood = 0, kStone = 1, kCoal = 2 };
constexpr const char* kItemName[3] = {"wood", "stone", "coal"};

enum Tool { kWoodPickaxe = 0, kStonePickaxe = 1 };
constexpr const char* kToolName[2] = {"wood_pickaxe", "stone_pickaxe"};

GoalSpec inventory_goal(int item, int count) {
  GoalSpec g;
  g.name = std::string("inventory/") + kItemName[item] + "_" + std::to_string(count);
  g.category = "inventory";
  g.kind = GoalSpec::Kind::InventoryCount;
  g.a = item;
  g.b = count;
  return g;
}

GoalSpec tool_goal(int tool) {
  GoalSpec g;
  g.name = std::string("tools/") + kToolName[tool];
  g.category = "tools";
  g.kind = GoalSpec::Kind::Tool;
  g.a = tool;
  return g;
}

GoalSpec block_goal(Block block, int dir) {
  GoalSpec g;
  g.name = std::string("block_map/") + block_name(block) + "_" + kDirSuffix[dir];
  g.category = "block_map";
  g.kind = GoalSpec::Kind::BlockAdjacent;
  g.a = static_cast<int>(block);
  g.b = dir;
  return g;
}

void add_block_goals(GoalSet& gs, Block block) {
  for (int d = 0; d < 4; ++d) gs.goals.push_back(block_goal(block, d));
}

}  // namespace

GoalSet make_goal_set(GoalPreset preset) {
  GoalSet gs;
  switch (preset) {
    case GoalPreset::Tiny:
      gs.goals.push_back(inventory_goal(kWood, 1));
      gs.goals.push_back(inventory_goal(kWood, 2));
      gs.goals.push_back(inventory_goal(kStone, 1));
      gs.goals.push_back(tool_goal(kWoodPickaxe));
      add_block_goals(gs, Block::Tree);
      add_block_goals(gs, Block::Stone);
      break;
    case GoalPreset::Small:
      for (int c = 1; c <= 3; ++c) gs.goals.push_back(inventory_goal(kWood, c));
      for (int c = 1; c <= 2; ++c) gs.goals.push_back(inventory_goal(kStone, c));
      gs.goals.push_back(inventory_goal(kCoal, 1));
      gs.goals.push_back(tool_goal(kWoodPickaxe));
      gs.goals.push_back(tool_goal(kStonePickaxe));
      add_block_goals(gs, Block::Tree);
      add_block_goals(gs, Block::Stone);
      add_block_goals(gs, Block::Water);
      break;
    case GoalPreset::Full:
      for (int item = 0; item < 3; ++item) {
        for (int c = 1; c <= kMaxInventory; ++c) gs.goals.push_back(inventory_goal(item, c));
      }
      gs.goals.push_back(tool_goal(kWoodPickaxe));
      gs.goals.push_back(tool_goal(kStonePickaxe));
      add_block_goals(gs, Block::Tree);
      add_block_goals(gs, Block::Stone);
      add_block_goals(gs, Block::Water);
      add_block_goals(gs, Block::CoalOre);
      add_block_goals(gs, Block::CraftingTable);
      break;
  }
  gs.validate();
  return gs;
}

GoalPreset goal_preset_from_string(const std::string& s) {
  if (s == "tiny") return GoalPreset::Tiny;
  if (s == "small") return GoalPreset::Small;
  if (s == "full") return GoalPreset::Full;
  throw ConfigError("unknown gridcraft goal preset: " + s);
}

bool goal_holds(const WorldState& state, const GoalSpec& goal) {
  switch (goal.kind) {
    case GoalSpec::Kind::InventoryCount: {
      int count = 0;
      switch (goal.a) {
        case kWood: count = state.inventory.wood; break;
        case kStone: count = state.inventory.stone; break;
        case kCoal: count = state.inventory.coal; break;
        default: throw ConfigError("gridcraft: unknown inventory item in goal " + goal.name);
      }
      return count == goal.b;
    }
    case GoalSpec::Kind::Tool:
      switch (goal.a) {
        case kWoodPickaxe: return state.tools.wood_pickaxe;
        case kStonePickaxe: return state.tools.stone_pickaxe;
        default: throw ConfigError("gridcraft: unknown tool in goal " + goal.name);
      }
    case GoalSpec::Kind::BlockAdjacent: {
      if (goal.a < 0 || goal.a >= kNumBlockTypes || goal.b < 0 || goal.b >= 4) {
        throw ConfigError("gridcraft: bad block goal parameters in " + goal.name);
      }
      const int r = state.agent_row + kRowDelta[goal.b];
      const int c = state.agent_col + kColDelta[goal.b];
      return state.in_bounds(r, c) && state.at(r, c) == static_cast<Block>(goal.a);
    }
    case GoalSpec::Kind::GridCell:
      throw ConfigError("gridcraft cannot evaluate grid-cell goal " + goal.name);
  }
  throw ConfigError("gridcraft: unknown goal kind in " + goal.name);
}

GoalMask achieved_goals(const WorldState& state, const GoalSet& goal_set) {
  GoalMask mask(goal_set.goals.size());
  for (size_t g = 0; g < goal_set.goals.size(); ++g) {
    mask[g] = goal_holds(state, goal_set.goals[g]) ? 1 : 0;
  }
  return mask;
}

}  // namespace agrl::gridcraft
