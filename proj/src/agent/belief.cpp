#include <cstdio>

#include "trajlab/agent/agent.hpp"

namespace trajlab {

AgentBelief::AgentBelief(int w, int h)
    : width(w), height(h), known_map(static_cast<std::size_t>(w) * h, Knowledge::Unknown) {}

Knowledge AgentBelief::at(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) return Knowledge::Wall;
  return known_map[static_cast<std::size_t>(c.y) * width + c.x];
}

void AgentBelief::mark(Cell c, Knowledge k) {
  if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) return;
  auto& slot = known_map[static_cast<std::size_t>(c.y) * width + c.x];
  if (slot == Knowledge::Unknown) slot = k;  // knowledge never reverts
}

bool AgentBelief::passable(Cell c) const { return at(c) != Knowledge::Wall; }

bool AgentBelief::blacklisted(const Pose& pose, const Action& a) const {
  for (const auto& n : reflection_notes) {
    if (!(n.pose == pose) || !(n.action == a)) continue;
    // A bump stays valid forever; other failures may stop applying once the
    // world changed through a successful interaction.
    if (a.kind == ActionKind::MoveAhead || n.epoch == epoch) return true;
  }
  return false;
}

std::optional<ReflectionNote> self_reflection(const Action& prev_action, const Observation& prev_obs,
                                              const std::string& feedback) {
  static constexpr std::string_view kFailed = "Failed: ";
  if (feedback.rfind(kFailed, 0) != 0) return std::nullopt;
  ReflectionNote n;
  n.pose = prev_obs.pose;
  n.action = prev_action;
  const auto end = feedback.find('.', kFailed.size());
  n.reason = feedback.substr(kFailed.size(), end == std::string::npos ? std::string::npos : end - kFailed.size());
  return n;
}

namespace {

void parse_state_messages(AgentBelief& b, const std::string& fb) {
  // "<Type> <id> is now hot." fragments produced by the simulator
  std::size_t pos = 0;
  while ((pos = fb.find(" is now ", pos)) != std::string::npos) {
    std::size_t start = fb.rfind(' ', pos - 1);
    const std::string idtxt = fb.substr(start + 1, pos - start - 1);
    int id = 0;
    if (std::sscanf(idtxt.c_str(), "%d", &id) == 1) {
      const std::string rest = fb.substr(pos + 8, 5);
      if (rest.rfind("hot", 0) == 0) b.hot.insert(id);
      else if (rest.rfind("cold", 0) == 0) b.cold.insert(id);
      else if (rest.rfind("clean", 0) == 0) b.clean.insert(id);
    }
    pos += 8;
  }
}

void apply_outcome(AgentBelief& b, const Action& a, bool ok, const std::optional<ReflectionNote>& note) {
  if (ok) {
    switch (a.kind) {
      case ActionKind::Open: b.opened.insert(a.target); break;
      case ActionKind::Close: b.opened.erase(a.target); break;
      case ActionKind::ToggleOn: b.switched_on.insert(a.target); break;
      case ActionKind::ToggleOff: b.switched_on.erase(a.target); break;
      case ActionKind::PickUp: b.put_into.erase(a.target); break;
      case ActionKind::Put:
        if (b.held) {
          b.put_into[*b.held] = a.target;
          const auto rec = b.seen_objects.find(a.target);
          const auto obj = b.seen_objects.find(*b.held);
          if (rec != b.seen_objects.end() && obj != b.seen_objects.end()) {
            const bool inside = traits(rec->second.type).openable || rec->second.type == ObjType::Sink;
            obj->second.cell = rec->second.cell;
            obj->second.relation = inside ? Relation::in(a.target) : Relation::on(a.target);
          }
        }
        break;
      default: break;
    }
    if (is_interaction(a.kind)) ++b.epoch;
    return;
  }
  if (!note) return;
  if (note->reason == "already open") b.opened.insert(a.target);
  else if (note->reason == "already closed" || note->reason == "closed") b.opened.erase(a.target);
  else if (note->reason == "already on") b.switched_on.insert(a.target);
  else if (note->reason == "already off") b.switched_on.erase(a.target);
}

}  // namespace

void update_belief(AgentBelief& b, const std::optional<Action>& prev_action, const Observation& obs,
                   const std::optional<ReflectionNote>& note) {
  const Pose& p = obs.pose;
  if (prev_action) {
    ++b.step;
    const bool ok = obs.feedback.rfind("OK.", 0) == 0;
    if (note) {
      ReflectionNote n = *note;
      n.epoch = b.epoch;
      b.reflection_notes.push_back(n);
      ++b.consecutive_failures;
      if (b.consecutive_failures >= 2) b.force_replan = true;
      if (prev_action->kind == ActionKind::MoveAhead && note->reason == "blocked")
        b.mark(step_toward(p.cell, p.heading), Knowledge::Wall);
    } else {
      b.consecutive_failures = 0;
    }
    apply_outcome(b, *prev_action, ok, note);
  }
  b.held = p.held;
  if (p.held) {
    auto it = b.seen_objects.find(*p.held);
    if (it != b.seen_objects.end()) it->second.relation = Relation::floor();
  }
  b.mark(p.cell, Knowledge::Free);
  for (const auto& v : obs.view) {
    if (v.terrain == '#' || v.terrain == 'F') {
      b.mark(v.cell, Knowledge::Wall);  // fixtures block like walls
    } else {
      b.mark(v.cell, Knowledge::Free);
    }
  }
  for (const auto& v : obs.visible) {
    b.seen_objects[v.id] = SeenObject{v.type, v.cell, v.relation, p.pitch, b.step};
    b.lost.erase(v.id);
  }
  parse_state_messages(b, obs.feedback);
  const NavPose now{p.cell, p.heading};
  if (!(now == b.last_pose)) b.pitch_tries.clear();
  b.last_pose = now;
}

}  // namespace trajlab
