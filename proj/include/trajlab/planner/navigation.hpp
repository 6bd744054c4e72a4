#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "trajlab/sim/types.hpp"

namespace trajlab {

struct NavPose {
  Cell cell;
  int heading = 0;
  friend auto operator<=>(const NavPose&, const NavPose&) = default;
};

/// Grid search problem over (cell, heading) with unit cost per move or turn.
struct NavProblem {
  int width = 0;
  int height = 0;
  std::function<bool(Cell)> passable;
  std::vector<NavPose> goals;  // any of these ends the search
};

/// A* with the Manhattan distance to the nearest goal cell as heuristic;
/// frontier ties are broken by the smaller (x, y, heading) tuple.
/// Returns the action sequence, or nullopt when no goal is reachable.
std::optional<std::vector<ActionKind>> plan_path(const NavProblem& problem, NavPose start);

}  // namespace trajlab
