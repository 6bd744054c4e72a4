#include <algorithm>

#include "trajlab/agent/agent.hpp"

namespace trajlab {

ReferenceHints extract_hints(const AbstractTrajectory& abstract) {
  ReferenceHints h;
  h.raw = abstract.raw;
  for (const auto& m : abstract.milestones) {
    Waypoint w;
    w.cell = m.observation.pose.cell;
    w.heading = m.observation.pose.heading;
    w.pitch = m.observation.pose.pitch;
    w.step_index = m.step_index;
    const bool acted = m.action && is_interaction(m.action->kind);
    if (acted) {
      h.skeleton.push_back(m.action->kind);
      if (m.action_object) h.object_hints.push_back(*m.action_object);
      w.interaction = m.action->kind;
      w.object = m.action_object;
    }
    if (!abstract.raw) {
      for (const auto& v : m.observation.visible) w.seen_types.push_back(v.type);
      std::sort(w.seen_types.begin(), w.seen_types.end());
      w.seen_types.erase(std::unique(w.seen_types.begin(), w.seen_types.end()), w.seen_types.end());
    }
    for (const auto& c : m.observation.view) h.layout.emplace(c.cell, c.terrain);
    h.waypoints.push_back(std::move(w));
  }
  std::sort(h.object_hints.begin(), h.object_hints.end());
  h.object_hints.erase(std::unique(h.object_hints.begin(), h.object_hints.end()), h.object_hints.end());
  return h;
}

}  // namespace trajlab
