#include <algorithm>
#include <climits>
#include <deque>

#include "trajlab/agent/agent.hpp"

namespace trajlab {
namespace {

constexpr int kViewRange = 5;

struct Intent {
  enum class Kind { Interact, Approach, Find, Idle } kind = Kind::Idle;
  ActionKind action = ActionKind::Stop;
  int id = 0;
  ObjType type = ObjType::Cup;

  static Intent interact(ActionKind k, int id) { return {Kind::Interact, k, id, {}}; }
  static Intent approach(int id) { return {Kind::Approach, ActionKind::Stop, id, {}}; }
  static Intent find(ObjType t) { return {Kind::Find, ActionKind::Stop, 0, t}; }
};

const VisibleObject* visible(const Observation& obs, int id) {
  for (const auto& v : obs.visible)
    if (v.id == id) return &v;
  return nullptr;
}

Action look_toward(int pitch, int want) {
  return Action::simple(pitch < want ? ActionKind::LookUp : ActionKind::LookDown);
}

std::optional<int> nearest_seen(const AgentBelief& b, ObjType type, Cell from) {
  std::optional<int> best;
  int best_d = INT_MAX;
  for (const auto& [id, o] : b.seen_objects) {
    if (o.type != type || b.unreachable.count(id) || b.lost.count(id)) continue;
    if (b.held && *b.held == id) continue;
    const int d = manhattan(from, o.cell);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

int expected_pitch(const AgentBelief& b, int id, int current) {
  const auto it = b.seen_objects.find(id);
  if (it == b.seen_objects.end()) return current;
  const SeenObject& o = it->second;
  if (!traits(o.type).pickupable) return pitch_for(traits(o.type).elevation, current);
  if (o.relation.kind != Relation::Kind::Floor) {
    const auto p = b.seen_objects.find(o.relation.parent);
    if (p != b.seen_objects.end()) return pitch_for(traits(p->second.type).elevation, current);
  }
  return o.pitch;
}

std::vector<NavPose> poses_facing(const AgentBelief& b, Cell target) {
  std::vector<NavPose> goals;
  for (int y = target.y - 1; y <= target.y + 1; ++y)
    for (int x = target.x - 1; x <= target.x + 1; ++x) {
      const Cell c{x, y};
      if (c == target || !b.passable(c)) continue;
      for (int h = 0; h < 360; h += 90)
        if (in_view_cone({c, h, 0, {}}, target, kViewRange)) goals.push_back({c, h});
    }
  return goals;
}

bool at_any(const Pose& p, const std::vector<NavPose>& goals) {
  return std::any_of(goals.begin(), goals.end(),
                     [&](const NavPose& g) { return g.cell == p.cell && g.heading == p.heading; });
}

std::string cell_key(Cell c) { return std::to_string(c.x) + "," + std::to_string(c.y); }

struct NavStep {
  enum class Kind { Arrived, Move, Unreachable } kind;
  Action action;
};

// Advances along the cached plan, recomputing it when the goal changed, the
// remaining path crosses a cell now known to be blocked, or reflection asked.
NavStep navigate(AgentBelief& b, const Pose& pose, const std::string& key, const std::vector<NavPose>& goals) {
  if (at_any(pose, goals)) return {NavStep::Kind::Arrived, {}};
  bool reuse = b.plan && !b.force_replan && b.plan->goal_key == key && b.plan->next < b.plan->actions.size();
  if (reuse) {
    NavPose cur{pose.cell, pose.heading};
    for (std::size_t i = b.plan->next; i < b.plan->actions.size() && reuse; ++i) {
      switch (b.plan->actions[i]) {
        case ActionKind::MoveAhead:
          cur.cell = step_toward(cur.cell, cur.heading);
          reuse = b.passable(cur.cell);
          break;
        case ActionKind::TurnLeft: cur.heading = (cur.heading + 270) % 360; break;
        case ActionKind::TurnRight: cur.heading = (cur.heading + 90) % 360; break;
        default: break;
      }
    }
    reuse = reuse && std::find(goals.begin(), goals.end(), cur) != goals.end();
  }
  if (!reuse) {
    NavProblem prob;
    prob.width = b.width;
    prob.height = b.height;
    prob.passable = [&b](Cell c) { return b.passable(c); };
    prob.goals = goals;
    auto path = plan_path(prob, {pose.cell, pose.heading});
    b.force_replan = false;
    if (!path || path->empty()) return {NavStep::Kind::Unreachable, {}};
    auto plan = std::make_shared<NavPlan>();
    plan->id = ++b.plans_made;
    plan->goal_key = key;
    plan->actions = std::move(*path);
    b.plan = std::move(plan);
  }
  const Action a = Action::simple(b.plan->actions[b.plan->next++]);
  if (b.blacklisted(pose, a)) {
    b.force_replan = true;
    return {NavStep::Kind::Unreachable, {}};
  }
  return {NavStep::Kind::Move, a};
}

const SubTask* current_subtask(const AgentBelief& b, const Task& task) {
  if (b.current_subtask_index < 0 || b.current_subtask_index >= static_cast<int>(task.subtasks.size()))
    return nullptr;
  return &task.subtasks[b.current_subtask_index];
}

bool openable_type(const AgentBelief& b, int id) {
  const auto it = b.seen_objects.find(id);
  return it != b.seen_objects.end() && traits(it->second.type).openable;
}

Intent appliance_intent(const AgentBelief& b, const Task& task, SubTaskKind kind, Cell at) {
  const ObjType appliance = kind == SubTaskKind::Heat ? ObjType::Microwave : ObjType::Fridge;
  const std::set<int>& done = kind == SubTaskKind::Heat ? b.hot : b.cold;
  if (!b.item) {
    if (auto t = nearest_seen(b, task.target_type, at)) return Intent::interact(ActionKind::PickUp, *t);
    return Intent::find(task.target_type);
  }
  const int item = *b.item;
  if (b.held && *b.held == item) {
    const auto a = nearest_seen(b, appliance, at);
    if (!a) return Intent::find(appliance);
    if (!b.opened.count(*a)) return Intent::interact(ActionKind::Open, *a);
    return Intent::interact(ActionKind::Put, *a);
  }
  const auto in = b.put_into.find(item);
  if (in == b.put_into.end()) return Intent::interact(ActionKind::PickUp, item);
  const int a = in->second;
  if (!done.count(item)) {
    if (b.opened.count(a)) return Intent::interact(ActionKind::Close, a);
    if (kind == SubTaskKind::Heat && !b.switched_on.count(a)) return Intent::interact(ActionKind::ToggleOn, a);
    return Intent::interact(ActionKind::Open, a);  // nothing happened; take it out again
  }
  if (!b.opened.count(a)) return Intent::interact(ActionKind::Open, a);
  return Intent::interact(ActionKind::PickUp, item);
}

Intent clean_intent(const AgentBelief& b, const Task& task, Cell at) {
  if (!b.item) {
    if (auto t = nearest_seen(b, task.target_type, at)) return Intent::interact(ActionKind::PickUp, *t);
    return Intent::find(task.target_type);
  }
  const int item = *b.item;
  if (b.held && *b.held == item) {
    const auto s = nearest_seen(b, ObjType::Sink, at);
    if (!s) return Intent::find(ObjType::Sink);
    return Intent::interact(ActionKind::Put, *s);
  }
  const auto in = b.put_into.find(item);
  if (in == b.put_into.end() || b.clean.count(item)) return Intent::interact(ActionKind::PickUp, item);
  const auto sink = b.seen_objects.find(in->second);
  if (sink == b.seen_objects.end()) return Intent::interact(ActionKind::PickUp, item);
  for (const auto& [id, o] : b.seen_objects)
    if (o.type == ObjType::Faucet && o.cell == sink->second.cell && !b.switched_on.count(id))
      return Intent::interact(ActionKind::ToggleOn, id);
  return Intent::approach(in->second);
}

Intent subtask_intent(const AgentBelief& b, const Task& task, Cell at) {
  const SubTask* st = current_subtask(b, task);
  if (st == nullptr) return {};
  const ObjType target = st->goal.subject;
  switch (st->kind) {
    case SubTaskKind::Navigate:
      if (auto t = nearest_seen(b, target, at)) return Intent::approach(*t);
      return Intent::find(target);
    case SubTaskKind::LocateAndDeclare:
      if (auto t = nearest_seen(b, target, at)) return Intent::interact(ActionKind::Declare, *t);
      return Intent::find(target);
    case SubTaskKind::FindAndPick:
      if (auto t = nearest_seen(b, target, at)) {
        const auto& o = b.seen_objects.at(*t);
        if (o.relation.kind == Relation::Kind::In && openable_type(b, o.relation.parent) &&
            !b.opened.count(o.relation.parent))
          return Intent::interact(ActionKind::Open, o.relation.parent);
        return Intent::interact(ActionKind::PickUp, *t);
      }
      return Intent::find(target);
    case SubTaskKind::Heat:
    case SubTaskKind::Cool: return appliance_intent(b, task, st->kind, at);
    case SubTaskKind::Clean: return clean_intent(b, task, at);
    case SubTaskKind::Place: {
      const ObjType r = st->goal.receptacle.value_or(ObjType::CounterTop);
      if (!b.held) return {};
      const auto rid = nearest_seen(b, r, at);
      if (!rid) return Intent::find(r);
      if (traits(r).openable && !b.opened.count(*rid)) return Intent::interact(ActionKind::Open, *rid);
      return Intent::interact(ActionKind::Put, *rid);
    }
  }
  return {};
}

// Interaction or approach toward a known object. nullopt with the object
// marked unreachable/lost means: pick a new intent.
std::optional<Action> pursue(AgentBelief& b, const Intent& in, const Observation& obs) {
  const Pose& pose = obs.pose;
  const VisibleObject* v = visible(obs, in.id);
  if (in.kind == Intent::Kind::Interact && v && (in.action == ActionKind::Declare || v->distance <= 1)) {
    const Action a = Action::with(in.action, in.id);
    if (!b.blacklisted(pose, a)) return a;
    b.unreachable.insert(in.id);
    return std::nullopt;
  }
  const SeenObject& o = b.seen_objects.at(in.id);
  const auto goals = poses_facing(b, o.cell);
  const auto step = navigate(b, pose, "obj:" + std::to_string(in.id) + "@" + cell_key(o.cell), goals);
  if (step.kind == NavStep::Kind::Move) return step.action;
  if (step.kind == NavStep::Kind::Unreachable) {
    b.unreachable.insert(in.id);
    return std::nullopt;
  }
  // At a facing pose: bring the object into the pitch band.
  auto& tried = b.pitch_tries[in.id];
  const int want = expected_pitch(b, in.id, pose.pitch);
  if (!tried.count(want) && pose.pitch != want) return look_toward(pose.pitch, want);
  tried.insert(pose.pitch);
  for (int p : {want, 0, 30, -30})
    if (!tried.count(p)) return look_toward(pose.pitch, p);
  b.lost.insert(in.id);
  return std::nullopt;
}

bool relevant_first(const Waypoint& w, ObjType x) {
  if (w.object && *w.object == x) return true;
  return w.interaction == ActionKind::Open &&
         std::binary_search(w.seen_types.begin(), w.seen_types.end(), x);
}

bool relevant(const Waypoint& w, ObjType x) {
  return std::binary_search(w.seen_types.begin(), w.seen_types.end(), x);
}

std::optional<std::size_t> next_waypoint(const AgentBelief& b, const ReferenceHints& h, ObjType x) {
  const auto open = [&](std::size_t i) { return !b.waypoint_done[i]; };
  if (!h.raw) {
    for (std::size_t i = 0; i < h.waypoints.size(); ++i)
      if (open(i) && relevant_first(h.waypoints[i], x)) return i;
    for (std::size_t i = 0; i < h.waypoints.size(); ++i)
      if (open(i) && relevant(h.waypoints[i], x)) return i;
    return std::nullopt;
  }
  for (std::size_t i = 0; i < h.waypoints.size(); ++i)
    if (open(i)) return i;
  return std::nullopt;
}

std::optional<Action> follow_hints(AgentBelief& b, const ReferenceHints& h, ObjType x, const Observation& obs) {
  const Pose& pose = obs.pose;
  if (b.waypoint_done.size() != h.waypoints.size()) b.waypoint_done.assign(h.waypoints.size(), false);
  while (auto idx = next_waypoint(b, h, x)) {
    const Waypoint& w = h.waypoints[*idx];
    if (b.at(w.cell) != Knowledge::Free && b.at(w.cell) != Knowledge::Unknown) {
      b.waypoint_done[*idx] = true;
      continue;
    }
    const auto step = navigate(b, pose, "wp:" + std::to_string(*idx), {{w.cell, w.heading}});
    if (step.kind == NavStep::Kind::Move) return step.action;
    if (step.kind == NavStep::Kind::Unreachable) {
      b.waypoint_done[*idx] = true;
      continue;
    }
    if (pose.pitch != w.pitch) {
      const Action a = look_toward(pose.pitch, w.pitch);
      if (!b.blacklisted(pose, a)) return a;
    }
    if (w.interaction == ActionKind::Open && w.object) {
      const VisibleObject* best = nullptr;
      for (const auto& v : obs.visible)
        if (v.type == *w.object && v.distance <= 1 && !b.opened.count(v.id) &&
            !b.blacklisted(pose, Action::with(ActionKind::Open, v.id)))
          if (best == nullptr || v.distance < best->distance) best = &v;
      if (best) return Action::with(ActionKind::Open, best->id);
    }
    b.waypoint_done[*idx] = true;
  }
  return std::nullopt;
}

// Nearest known-free cell with an unknown 4-neighbour, by BFS distance then (x, y).
std::optional<Action> explore_frontier(AgentBelief& b, const Observation& obs) {
  const Pose& pose = obs.pose;
  const int W = b.width, H = b.height;
  std::vector<int> dist(static_cast<std::size_t>(W) * H, -1);
  std::deque<Cell> q{pose.cell};
  dist[static_cast<std::size_t>(pose.cell.y) * W + pose.cell.x] = 0;
  std::optional<NavPose> best;
  int best_d = INT_MAX;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    const int d = dist[static_cast<std::size_t>(c.y) * W + c.x];
    if (d > best_d) break;
    for (int h = 0; h < 360; h += 90) {
      const Cell n = step_toward(c, h);
      if (n.x < 0 || n.y < 0 || n.x >= W || n.y >= H) continue;
      if (b.at(n) == Knowledge::Unknown) {
        const NavPose cand{c, h};
        if (!best || d < best_d || (d == best_d && cand.cell < best->cell)) {
          best = cand;
          best_d = d;
        }
        break;
      }
    }
    for (int h = 0; h < 360; h += 90) {
      const Cell n = step_toward(c, h);
      if (!b.known_free(n)) continue;
      auto& slot = dist[static_cast<std::size_t>(n.y) * W + n.x];
      if (slot >= 0) continue;
      slot = d + 1;
      q.push_back(n);
    }
  }
  if (!best) return std::nullopt;
  if (b.frontier_goal != best->cell) {
    // alternate the look band each time a frontier is actually reached
    if (b.frontier_goal && pose.cell == *b.frontier_goal) b.frontier_pitch = -b.frontier_pitch;
    b.frontier_goal = best->cell;
  }
  if (pose.pitch != b.frontier_pitch) {
    const Action a = look_toward(pose.pitch, b.frontier_pitch);
    if (!b.blacklisted(pose, a)) return a;
  }
  const auto step = navigate(b, pose, "frontier:" + cell_key(best->cell), {*best});
  if (step.kind == NavStep::Kind::Move) return step.action;
  // Arrived (the view should have revealed the cell) or blocked: turn to look.
  for (const auto k : {ActionKind::TurnRight, ActionKind::TurnLeft}) {
    const Action a = Action::simple(k);
    if (!b.blacklisted(pose, a)) return a;
  }
  return std::nullopt;
}

std::optional<Action> unblocked(const AgentBelief& b, const Pose& pose, std::optional<Action> a) {
  if (a && b.blacklisted(pose, *a)) return std::nullopt;
  return a;
}

}  // namespace

Action next_action(AgentBelief& b, const Task& task, const ReferenceHints& hints, const Observation& obs) {
  const Pose& pose = obs.pose;
  if (b.held && !b.item) {
    const auto it = b.seen_objects.find(*b.held);
    if (it != b.seen_objects.end() && it->second.type == task.target_type) b.item = *b.held;
  }

  // A reference from another layout is worse than none; drop it on the
  // first terrain mismatch.
  if (!b.reference_rejected)
    for (const auto& c : obs.view) {
      const auto it = hints.layout.find(c.cell);
      if (it != hints.layout.end() && it->second != c.terrain) {
        b.reference_rejected = true;
        break;
      }
    }

  std::optional<ObjType> search;
  for (int guard = 0; guard < 32; ++guard) {
    const Intent in = subtask_intent(b, task, pose.cell);
    if (in.kind == Intent::Kind::Interact || in.kind == Intent::Kind::Approach) {
      if (auto a = unblocked(b, pose, pursue(b, in, obs))) return *a;
      continue;
    }
    if (in.kind == Intent::Kind::Find) search = in.type;
    break;
  }
  if (search) {
    if (!b.reference_rejected)
      if (auto a = unblocked(b, pose, follow_hints(b, hints, *search, obs))) return *a;
    if (auto a = unblocked(b, pose, explore_frontier(b, obs))) return *a;
  }
  return Action::simple(ActionKind::Stop);
}

}  // namespace trajlab
