#include "trajlab/abstraction/abstraction.hpp"

#include <algorithm>
#include <map>

#include "trajlab/common.hpp"

namespace trajlab {
namespace {

const char* heading_name(int h) {
  switch (h) {
    case 0: return "north";
    case 90: return "east";
    case 180: return "south";
    default: return "west";
  }
}

const char* pitch_name(int p) { return p < 0 ? "down" : p > 0 ? "up" : "level"; }

std::string cell_str(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

// Ids are unique per scene, so one map over the whole trajectory is enough.
std::map<int, ObjType> type_map(const Trajectory& t) {
  std::map<int, ObjType> m;
  for (const auto& o : t.observations)
    for (const auto& v : o.visible) m.emplace(v.id, v.type);
  return m;
}

std::string name_of(const std::map<int, ObjType>& types, int id) {
  auto it = types.find(id);
  std::string n = it == types.end() ? "object" : std::string(to_string(it->second));
  return n + " " + std::to_string(id);
}

// Text between "OK." and " You see:", empty for plain steps.
std::string feedback_extra(const std::string& fb) {
  if (fb.rfind("OK.", 0) != 0) return {};
  const auto end = fb.find(" You see:");
  std::string mid = fb.substr(3, end == std::string::npos ? std::string::npos : end - 3);
  while (!mid.empty() && mid.front() == ' ') mid.erase(mid.begin());
  return mid;
}

bool notable(const std::string& fb) {
  if (fb.rfind("Start.", 0) == 0) return false;
  return fb.rfind("OK.", 0) != 0 || !feedback_extra(fb).empty();
}

std::string interaction_text(const Trajectory& t, std::size_t s, const std::map<int, ObjType>& types) {
  const Action& a = t.actions[s - 1];
  const std::string obj = name_of(types, a.target);
  switch (a.kind) {
    case ActionKind::PickUp: return "Picked up " + obj + ".";
    case ActionKind::Put: {
      const auto& held = t.observations[s - 1].pose.held;
      const std::string what = held ? name_of(types, *held) : "object";
      return "Put " + what + " into " + obj + ".";
    }
    case ActionKind::Open: return "Opened " + obj + ".";
    case ActionKind::Close: return "Closed " + obj + ".";
    case ActionKind::ToggleOn: return "Turned on " + obj + ".";
    case ActionKind::ToggleOff: return "Turned off " + obj + ".";
    case ActionKind::Declare: return "Declared " + obj + ".";
    default: return to_string(a) + ".";
  }
}

struct Scan {
  std::vector<std::uint8_t> triggers;
  std::map<int, ObjType> types;
  int target_first = -1;
  std::vector<int> goal_steps;
};

Scan scan(const Trajectory& t, const Task& current) {
  validate(t);
  Scan sc;
  sc.types = type_map(t);
  sc.triggers.assign(t.observations.size(), 0);
  sc.goal_steps = subtask_completion_steps(t);
  sc.triggers[0] |= static_cast<std::uint8_t>(Trigger::Start);
  for (std::size_t s = 1; s < t.observations.size(); ++s) {
    if (is_interaction(t.actions[s - 1].kind)) sc.triggers[s] |= static_cast<std::uint8_t>(Trigger::Interaction);
    if (notable(t.feedbacks[s])) sc.triggers[s] |= static_cast<std::uint8_t>(Trigger::Notable);
  }
  for (int g : sc.goal_steps)
    if (g >= 0) sc.triggers[g] |= static_cast<std::uint8_t>(Trigger::Goal);
  for (std::size_t s = 0; s < t.observations.size() && sc.target_first < 0; ++s)
    for (const auto& v : t.observations[s].visible)
      if (v.type == current.target_type) {
        sc.target_first = static_cast<int>(s);
        sc.triggers[s] |= static_cast<std::uint8_t>(Trigger::TargetSeen);
        break;
      }
  return sc;
}

Milestone make_milestone(const Trajectory& t, const Task& current, const Scan& sc, std::size_t s) {
  Milestone m;
  m.step_index = static_cast<int>(s);
  m.triggers = sc.triggers[s];
  m.observation = t.observations[s];
  m.feedback = t.feedbacks[s];
  if (s > 0) {
    m.action = t.actions[s - 1];
    if (is_parameterized(m.action->kind)) {
      auto it = sc.types.find(m.action->target);
      if (it != sc.types.end()) m.action_object = it->second;
    }
  }
  std::vector<std::string> parts;
  const Pose& p = t.observations[s].pose;
  if (has(m.triggers, Trigger::Start))
    parts.push_back("Start at " + cell_str(p.cell) + " facing " + heading_name(p.heading) +
                    ", looking " + pitch_name(p.pitch) + ".");
  if (has(m.triggers, Trigger::Interaction)) parts.push_back(interaction_text(t, s, sc.types));
  if (has(m.triggers, Trigger::Goal))
    for (std::size_t i = 0; i < sc.goal_steps.size(); ++i)
      if (sc.goal_steps[i] == static_cast<int>(s))
        parts.push_back("Subtask done: " + t.task.subtasks[i].description);
  if (has(m.triggers, Trigger::TargetSeen)) {
    for (const auto& v : t.observations[s].visible)
      if (v.type == current.target_type) {
        parts.push_back("Spotted " + name_of(sc.types, v.id) + " at " + cell_str(v.cell) + ", looking " +
                        pitch_name(p.pitch) + ".");
        break;
      }
  }
  if (has(m.triggers, Trigger::Notable)) {
    const auto& fb = t.feedbacks[s];
    const auto extra = feedback_extra(fb);
    parts.push_back("Noticed: " + (extra.empty() ? fb.substr(0, fb.find(" You see:")) : extra));
  }
  for (const auto& part : parts) {
    if (!m.description.empty()) m.description += ' ';
    m.description += part;
  }
  return m;
}

std::uint8_t parse_triggers(const Json& j) {
  std::uint8_t mask = 0;
  for (const auto& s : j) {
    const auto v = s.get<std::string>();
    if (v == "start") mask |= static_cast<std::uint8_t>(Trigger::Start);
    else if (v == "interaction") mask |= static_cast<std::uint8_t>(Trigger::Interaction);
    else if (v == "goal") mask |= static_cast<std::uint8_t>(Trigger::Goal);
    else if (v == "target_seen") mask |= static_cast<std::uint8_t>(Trigger::TargetSeen);
    else if (v == "notable") mask |= static_cast<std::uint8_t>(Trigger::Notable);
    else throw ValidationError("unknown milestone trigger " + v);
  }
  return mask;
}

Json trigger_names(std::uint8_t mask) {
  Json j = Json::array();
  if (has(mask, Trigger::Start)) j.push_back("start");
  if (has(mask, Trigger::Interaction)) j.push_back("interaction");
  if (has(mask, Trigger::Goal)) j.push_back("goal");
  if (has(mask, Trigger::TargetSeen)) j.push_back("target_seen");
  if (has(mask, Trigger::Notable)) j.push_back("notable");
  return j;
}

}  // namespace

std::string summarize_actions(const std::vector<Action>& actions, std::size_t begin, std::size_t end) {
  end = std::min(end, actions.size());
  if (begin >= end) return "end";
  int moves = 0, turns = 0, looks = 0;
  std::vector<std::string> tail;
  for (std::size_t i = begin; i < end; ++i) {
    switch (actions[i].kind) {
      case ActionKind::MoveAhead: ++moves; break;
      case ActionKind::TurnLeft:
      case ActionKind::TurnRight: ++turns; break;
      case ActionKind::LookUp:
      case ActionKind::LookDown: ++looks; break;
      default: tail.push_back(to_string(actions[i]));
    }
  }
  std::vector<std::string> nav;
  if (moves) nav.push_back(std::to_string(moves) + (moves == 1 ? " cell" : " cells"));
  if (turns) nav.push_back(std::to_string(turns) + (turns == 1 ? " turn" : " turns"));
  if (looks) nav.push_back(std::to_string(looks) + (looks == 1 ? " look change" : " look changes"));
  std::string out;
  if (!nav.empty()) {
    out = "navigate ";
    for (std::size_t i = 0; i < nav.size(); ++i) out += (i ? ", " : "") + nav[i];
  }
  for (const auto& t : tail) out += (out.empty() ? "" : ", then ") + t;
  return out;
}

AbstractTrajectory abstract_trajectory(const Trajectory& traj, const Task& current) {
  const Scan sc = scan(traj, current);
  AbstractTrajectory a;
  a.source_traj_id = traj.traj_id;
  a.source_scene_id = traj.task.scene_id;
  a.source_instruction = traj.task.instruction;
  a.conditioning_task_id = current.task_id;
  for (std::size_t s = 0; s < sc.triggers.size(); ++s)
    if (sc.triggers[s]) a.milestones.push_back(make_milestone(traj, current, sc, s));
  for (std::size_t i = 0; i < a.milestones.size(); ++i) {
    const auto from = static_cast<std::size_t>(a.milestones[i].step_index);
    const auto to = i + 1 < a.milestones.size() ? static_cast<std::size_t>(a.milestones[i + 1].step_index)
                                                : traj.actions.size();
    a.milestones[i].overarching_actions = summarize_actions(traj.actions, from, to);
  }
  return a;
}

AbstractTrajectory raw_view(const Trajectory& traj, const Task& current, int limit) {
  const Scan sc = scan(traj, current);
  AbstractTrajectory a;
  a.source_traj_id = traj.traj_id;
  a.source_scene_id = traj.task.scene_id;
  a.source_instruction = traj.task.instruction;
  a.conditioning_task_id = current.task_id;
  a.raw = true;
  const auto n = std::min(traj.observations.size(), static_cast<std::size_t>(std::max(limit, 1)));
  for (std::size_t s = 0; s < n; ++s) {
    Milestone m;
    m.step_index = static_cast<int>(s);
    m.triggers = sc.triggers[s];
    m.observation = traj.observations[s];
    m.feedback = traj.feedbacks[s];
    if (s > 0) {
      m.action = traj.actions[s - 1];
      if (is_parameterized(m.action->kind)) {
        auto it = sc.types.find(m.action->target);
        if (it != sc.types.end()) m.action_object = it->second;
      }
      m.description = "Step " + std::to_string(s) + ": " + to_string(*m.action) + ".";
    } else {
      m.description = "Step 0: start.";
    }
    m.overarching_actions = summarize_actions(traj.actions, s, s + 1);
    a.milestones.push_back(std::move(m));
  }
  return a;
}

void to_json(Json& j, const Milestone& m) {
  j = Json{{"step", m.step_index},
           {"triggers", trigger_names(m.triggers)},
           {"description", m.description},
           {"obs", m.observation},
           {"feedback", m.feedback},
           {"action", m.action ? Json(*m.action) : Json(nullptr)},
           {"action_object", m.action_object ? Json(std::string(to_string(*m.action_object))) : Json(nullptr)},
           {"overarching", m.overarching_actions}};
}

void from_json(const Json& j, Milestone& m) {
  m.step_index = j.at("step").get<int>();
  m.triggers = parse_triggers(j.at("triggers"));
  m.description = j.at("description").get<std::string>();
  m.observation = j.at("obs").get<Observation>();
  m.feedback = j.at("feedback").get<std::string>();
  m.action.reset();
  if (!j.at("action").is_null()) m.action = j.at("action").get<Action>();
  m.action_object.reset();
  if (!j.at("action_object").is_null()) m.action_object = parse_obj_type(j.at("action_object").get<std::string>());
  m.overarching_actions = j.at("overarching").get<std::string>();
}

void to_json(Json& j, const AbstractTrajectory& a) {
  j = Json{{"source_traj_id", a.source_traj_id},
           {"source_scene_id", a.source_scene_id},
           {"source_instruction", a.source_instruction},
           {"conditioning_task_id", a.conditioning_task_id},
           {"raw", a.raw},
           {"milestones", a.milestones}};
}

void from_json(const Json& j, AbstractTrajectory& a) {
  a.source_traj_id = j.at("source_traj_id").get<std::string>();
  a.source_scene_id = j.at("source_scene_id").get<std::string>();
  a.source_instruction = j.at("source_instruction").get<std::string>();
  a.conditioning_task_id = j.at("conditioning_task_id").get<std::string>();
  a.raw = j.at("raw").get<bool>();
  a.milestones = j.at("milestones").get<std::vector<Milestone>>();
  for (std::size_t i = 1; i < a.milestones.size(); ++i)
    if (a.milestones[i].step_index <= a.milestones[i - 1].step_index)
      throw ValidationError("milestone steps not increasing in " + a.source_traj_id);
}

}  // namespace trajlab
