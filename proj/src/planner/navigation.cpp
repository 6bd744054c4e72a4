#include "trajlab/planner/navigation.hpp"

#include <algorithm>
#include <climits>
#include <queue>
#include <tuple>

namespace trajlab {

std::optional<std::vector<ActionKind>> plan_path(const NavProblem& p, NavPose start) {
  if (p.goals.empty()) return std::nullopt;
  const int n = p.width * p.height * 4;
  auto index = [&](Cell c, int heading) { return ((c.y * p.width) + c.x) * 4 + heading / 90; };
  auto in_bounds = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < p.width && c.y < p.height; };

  std::vector<bool> is_goal(n, false);
  std::vector<Cell> goal_cells;
  for (const auto& g : p.goals) {
    if (!in_bounds(g.cell)) continue;
    is_goal[index(g.cell, g.heading)] = true;
    goal_cells.push_back(g.cell);
  }
  if (goal_cells.empty() || !in_bounds(start.cell)) return std::nullopt;
  std::sort(goal_cells.begin(), goal_cells.end());
  goal_cells.erase(std::unique(goal_cells.begin(), goal_cells.end()), goal_cells.end());
  auto h = [&](Cell c) {
    int best = INT_MAX;
    for (const Cell g : goal_cells) best = std::min(best, manhattan(c, g));
    return best;
  };

  std::vector<int> g(n, INT_MAX);
  std::vector<int> parent(n, -1);
  std::vector<ActionKind> via(n, ActionKind::Stop);
  std::vector<bool> closed(n, false);
  using Key = std::tuple<int, int, int, int>;  // f, x, y, heading
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;

  const int s = index(start.cell, start.heading);
  g[s] = 0;
  open.emplace(h(start.cell), start.cell.x, start.cell.y, start.heading);
  while (!open.empty()) {
    const auto [f, x, y, heading] = open.top();
    open.pop();
    const Cell c{x, y};
    const int cur = index(c, heading);
    if (closed[cur]) continue;
    closed[cur] = true;
    if (is_goal[cur]) {
      std::vector<ActionKind> actions;
      for (int at = cur; at != s; at = parent[at]) actions.push_back(via[at]);
      std::reverse(actions.begin(), actions.end());
      return actions;
    }
    const std::tuple<Cell, int, ActionKind> moves[] = {
        {c, (heading + 270) % 360, ActionKind::TurnLeft},
        {c, (heading + 90) % 360, ActionKind::TurnRight},
        {step_toward(c, heading), heading, ActionKind::MoveAhead},
    };
    for (const auto& [nc, nh, kind] : moves) {
      if (kind == ActionKind::MoveAhead && (!in_bounds(nc) || !p.passable(nc))) continue;
      const int ni = index(nc, nh);
      if (closed[ni] || g[cur] + 1 >= g[ni]) continue;
      g[ni] = g[cur] + 1;
      parent[ni] = cur;
      via[ni] = kind;
      open.emplace(g[ni] + h(nc), nc.x, nc.y, nh);
    }
  }
  return std::nullopt;
}

}  // namespace trajlab
