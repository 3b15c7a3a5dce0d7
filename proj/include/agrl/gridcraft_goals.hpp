#pragma once

#include <string>

#include "agrl/goalspace.hpp"
#include "agrl/gridcraft.hpp"

namespace agrl::gridcraft {

// Built-in goal presets. Inventory goals are exact counts and therefore
// mutually exclusive; tool goals are monotone flags; block goals test the
// cell adjacent to the agent in a fixed direction.
//   tiny:  12 goals, for the enumerable 6x6 fixture
//   small: 20 goals (the gridcraft_small training env)
//   full:  49 goals (3 resources x 9 counts + 2 tools + 5 blocks x 4 dirs)
enum class GoalPreset { Tiny, Small, Full };

GoalSet make_goal_set(GoalPreset preset);

GoalPreset goal_preset_from_string(const std::string& s);

// True iff the goal predicate holds in the state. Throws on goal kinds this
// environment cannot evaluate.
bool goal_holds(const WorldState& state, const GoalSpec& goal);

// Bit g set iff goal g holds.
GoalMask achieved_goals(const WorldState& state, const GoalSet& goal_set);

}  // namespace agrl::gridcraft
