#include "trajlab/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "trajlab/common.hpp"

namespace trajlab {

bool WorldState::walkable(Cell c) const {
  if (!scene->is_floor(c)) return false;
  return std::none_of(objects.begin(), objects.end(), [c](const ObjectInstance& o) {
    return blocks_movement(o.type) && o.position == c;
  });
}

Json WorldState::to_json() const {
  Json j{{"objects", objects}, {"pose", pose}};
  j["declared"] = Json(std::vector<int>(declared.begin(), declared.end()));
  return j;
}

bool hidden_in_closed(const WorldState& w, const ObjectInstance& obj) {
  const ObjectInstance* cur = &obj;
  // Relations form a forest; depth is bounded by the object count.
  for (std::size_t guard = 0; guard <= w.objects.size(); ++guard) {
    if (cur->relation.kind == Relation::Kind::Floor) return false;
    const ObjectInstance* parent = w.find(cur->relation.parent);
    if (parent == nullptr) return false;
    if (cur->relation.kind == Relation::Kind::In && parent->openable && !parent->is_open) return true;
    cur = parent;
  }
  return false;
}

bool line_of_sight(const Scene& scene, Cell from, Cell to) {
  int x0 = from.x, y0 = from.y;
  const int dx = std::abs(to.x - x0), dy = -std::abs(to.y - y0);
  const int sx = x0 < to.x ? 1 : -1, sy = y0 < to.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 == to.x && y0 == to.y) return true;
    if (!(x0 == from.x && y0 == from.y) && scene.terrain({x0, y0}) == '#') return false;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

bool in_view_cone(const Pose& pose, Cell target, int range) {
  const int dx = target.x - pose.cell.x;
  const int dy = target.y - pose.cell.y;
  if (dx == 0 && dy == 0) return false;
  const int d2 = dx * dx + dy * dy;
  if (d2 > range * range) return false;
  const Cell ahead = step_toward({0, 0}, pose.heading);
  const int dot = ahead.x * dx + ahead.y * dy;
  // angle <= 45 degrees  <=>  dot >= 0 and 2 dot^2 >= |d|^2
  return dot > 0 && 2 * dot * dot >= d2;
}

bool is_visible(const WorldState& w, const ObjectInstance& obj) {
  if (w.pose.held && *w.pose.held == obj.id) return false;
  if (!pitch_sees(w.pose.pitch, obj.elevation)) return false;
  if (!in_view_cone(w.pose, obj.position, w.params.view_range)) return false;
  if (!line_of_sight(*w.scene, w.pose.cell, obj.position)) return false;
  return !hidden_in_closed(w, obj);
}

namespace {

int bearing_of(const Pose& pose, Cell target) {
  const double dx = target.x - pose.cell.x;
  const double dy = target.y - pose.cell.y;
  double abs_deg = std::atan2(dx, -dy) * 180.0 / 3.14159265358979323846;
  double rel = abs_deg - pose.heading;
  while (rel <= -180.0) rel += 360.0;
  while (rel > 180.0) rel -= 360.0;
  return static_cast<int>(std::lround(rel));
}

}  // namespace

std::vector<VisibleObject> visible_objects(const WorldState& w) {
  std::vector<VisibleObject> out;
  for (const auto& o : w.objects) {
    if (!is_visible(w, o)) continue;
    out.push_back({o.id, o.type, o.relation, chebyshev(w.pose.cell, o.position),
                   bearing_of(w.pose, o.position), o.position});
  }
  return out;  // objects are stored by id, so already ascending
}

std::vector<ViewCell> view_cells(const WorldState& w) {
  std::vector<ViewCell> out;
  const int r = w.params.view_range;
  const Cell c = w.pose.cell;
  for (int y = c.y - r; y <= c.y + r; ++y)
    for (int x = c.x - r; x <= c.x + r; ++x) {
      const Cell t{x, y};
      if (!w.scene->in_bounds(t) || !in_view_cone(w.pose, t, r)) continue;
      if (!line_of_sight(*w.scene, c, t)) continue;
      char terrain = w.scene->terrain(t);
      if (terrain != '#' && !w.walkable(t)) terrain = 'F';
      out.push_back({t, terrain});
    }
  return out;
}

std::string listing(const std::vector<VisibleObject>& visible) {
  std::string s = "You see: ";
  if (visible.empty()) return s + "nothing.";
  for (std::size_t i = 0; i < visible.size(); ++i) {
    if (i) s += ", ";
    s += std::string(to_string(visible[i].type)) + " " + std::to_string(visible[i].id);
  }
  return s + ".";
}

Observation observe(const WorldState& w, std::string feedback_head) {
  Observation o;
  o.visible = visible_objects(w);
  o.pose = w.pose;
  o.view = view_cells(w);
  o.feedback = std::move(feedback_head) + " " + listing(o.visible);
  return o;
}

bool check_goal(const WorldState& w, const GoalPredicate& goal) {
  for (const auto& o : w.objects) {
    if (o.type != goal.subject) continue;
    const bool held = w.pose.held && *w.pose.held == o.id;
    bool ok = true;
    for (const auto c : goal.conditions) {
      switch (c) {
        case Condition::Near:
          ok = chebyshev(w.pose.cell, o.position) <= w.params.interaction_range && is_visible(w, o);
          break;
        case Condition::Held: ok = held; break;
        case Condition::Hot: ok = o.temperature == Temperature::Hot; break;
        case Condition::Cold: ok = o.temperature == Temperature::Cold; break;
        case Condition::Clean: ok = o.cleanliness == Cleanliness::Clean; break;
        case Condition::Placed: {
          ok = false;
          if (!held && o.relation.kind != Relation::Kind::Floor && goal.receptacle) {
            const auto* p = w.find(o.relation.parent);
            ok = p != nullptr && p->type == *goal.receptacle;
          }
          break;
        }
        case Condition::Declared: ok = w.declared.count(o.id) > 0; break;
      }
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

Env::Env(const Scene& scene, SimParams params) : scene_(&scene) {
  state_.scene = scene_;
  state_.params = params;
}

Observation Env::reset_at(const Task& task, const Pose& pose) {
  if (task.scene_id != scene_->scene_id)
    throw ValidationError("task " + task.task_id + " belongs to scene " + task.scene_id +
                          ", not " + scene_->scene_id);
  state_.objects = scene_->objects;
  state_.declared.clear();
  state_.declare_allowed = task.family == TaskFamily::AnswerWhere;
  state_.pose = pose;
  active_ = true;
  return observe(state_, "Start.");
}

Observation Env::reset(const Task& task, std::uint64_t episode_seed) {
  const auto mask = walkable_mask(*scene_);
  std::vector<Cell> cells;
  for (int y = 0; y < scene_->height; ++y)
    for (int x = 0; x < scene_->width; ++x)
      if (mask[y][x]) cells.push_back({x, y});
  if (cells.empty()) throw ValidationError("scene " + scene_->scene_id + " has no walkable cell");
  Rng rng(episode_seed);
  for (int attempt = 0;; ++attempt) {
    Pose p;
    p.cell = cells[rng.below(cells.size())];
    p.heading = 90 * static_cast<int>(rng.below(4));
    auto obs = reset_at(task, p);
    if (attempt >= 64 || task.subtasks.empty() || !check_goal(state_, task.subtasks.front().goal))
      return obs;
  }
}

Observation Env::step(const Action& action) {
  if (!active_) throw std::logic_error("Env::step called on an inactive episode");
  std::string extra;
  const WorldState before = state_;
  const auto failure = apply(action);
  if (failure) {
    state_ = before;
    return observe(state_, "Failed: " + *failure + ".");
  }
  apply_physics(extra);
  if (action.kind == ActionKind::Stop) {
    active_ = false;
    extra = " Stopped." + extra;
  }
  return observe(state_, "OK." + extra);
}

std::optional<std::string> Env::apply(const Action& a) {
  auto& pose = state_.pose;
  switch (a.kind) {
    case ActionKind::MoveAhead: {
      const Cell next = step_toward(pose.cell, pose.heading);
      if (!state_.walkable(next)) return "blocked";
      pose.cell = next;
      if (pose.held) state_.find(*pose.held)->position = next;
      return std::nullopt;
    }
    case ActionKind::TurnLeft: pose.heading = (pose.heading + 270) % 360; return std::nullopt;
    case ActionKind::TurnRight: pose.heading = (pose.heading + 90) % 360; return std::nullopt;
    case ActionKind::LookUp:
      if (pose.pitch >= 30) return "cannot look further up";
      pose.pitch += 30;
      return std::nullopt;
    case ActionKind::LookDown:
      if (pose.pitch <= -30) return "cannot look further down";
      pose.pitch -= 30;
      return std::nullopt;
    case ActionKind::Stop: return std::nullopt;
    default: break;
  }

  ObjectInstance* obj = state_.find(a.target);
  if (obj == nullptr || !is_visible(state_, *obj)) return "no such object";
  if (a.kind == ActionKind::Declare) {
    if (!state_.declare_allowed) return "nothing to declare";
    state_.declared.insert(obj->id);
    return std::nullopt;
  }
  if (a.kind == ActionKind::PickUp && pose.held) return "hands full";
  if (chebyshev(pose.cell, obj->position) > state_.params.interaction_range) return "too far";

  switch (a.kind) {
    case ActionKind::PickUp: {
      if (!obj->pickupable) return "not pickupable";
      obj->relation = Relation::floor();
      obj->position = pose.cell;
      pose.held = obj->id;
      return std::nullopt;
    }
    case ActionKind::Put: {
      if (!pose.held) return "hands empty";
      if (!obj->receptacle) return "not a receptacle";
      if (obj->openable && !obj->is_open) return "closed";
      ObjectInstance* held = state_.find(*pose.held);
      const bool inside = obj->openable || obj->type == ObjType::Sink;
      held->relation = inside ? Relation::in(obj->id) : Relation::on(obj->id);
      held->position = obj->position;
      held->elevation = obj->elevation;
      pose.held.reset();
      return std::nullopt;
    }
    case ActionKind::Open:
      if (!obj->openable) return "cannot open";
      if (obj->is_open) return "already open";
      obj->is_open = true;
      return std::nullopt;
    case ActionKind::Close:
      if (!obj->openable) return "cannot close";
      if (!obj->is_open) return "already closed";
      obj->is_open = false;
      return std::nullopt;
    case ActionKind::ToggleOn:
      if (!obj->toggleable) return "cannot toggle";
      if (obj->is_on) return "already on";
      obj->is_on = true;
      return std::nullopt;
    case ActionKind::ToggleOff:
      if (!obj->toggleable) return "cannot toggle";
      if (!obj->is_on) return "already off";
      obj->is_on = false;
      return std::nullopt;
    default: return "unsupported action";
  }
}

void Env::apply_physics(std::string& extra) {
  for (auto& o : state_.objects) {
    if (o.relation.kind != Relation::Kind::In) continue;
    const ObjectInstance* p = state_.find(o.relation.parent);
    if (p == nullptr) continue;
    const std::string who = std::string(to_string(o.type)) + " " + std::to_string(o.id);
    if (p->type == ObjType::Microwave && p->is_on && !p->is_open && o.temperature != Temperature::Hot) {
      o.temperature = Temperature::Hot;
      extra += " " + who + " is now hot.";
    } else if (p->type == ObjType::Fridge && !p->is_open && o.temperature != Temperature::Cold) {
      o.temperature = Temperature::Cold;
      extra += " " + who + " is now cold.";
    } else if (p->type == ObjType::Sink && o.cleanliness != Cleanliness::Clean) {
      const bool running = std::any_of(state_.objects.begin(), state_.objects.end(),
                                       [p](const ObjectInstance& f) {
                                         return f.type == ObjType::Faucet && f.is_on &&
                                                f.position == p->position;
                                       });
      if (running) {
        o.cleanliness = Cleanliness::Clean;
        extra += " " + who + " is now clean.";
      }
    }
  }
}

}  // namespace trajlab
