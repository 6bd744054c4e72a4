#include "trajlab/memory/trajectory.hpp"

#include <map>
#include <set>

#include "trajlab/common.hpp"

namespace trajlab {

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split: " + std::string(s));
}

void validate(const Trajectory& t) {
  const auto n = t.actions.size();
  if (t.observations.size() != n + 1 || t.feedbacks.size() != n + 1 ||
      t.steps != static_cast<int>(n))
    throw ValidationError("trajectory " + t.traj_id + ": inconsistent sequence lengths");
}

namespace {

struct SymbolicState {
  std::map<int, ObjType> type;
  std::map<int, int> parent;  // 0 when carried or on the floor
  std::set<int> hot, cold, clean, declared;
};

void parse_state_messages(const std::string& fb, SymbolicState& st) {
  // "<Type> <id> is now <state>." fragments appended by the physics step.
  static const std::string marker = " is now ";
  std::size_t pos = 0;
  while ((pos = fb.find(marker, pos)) != std::string::npos) {
    std::size_t id_end = pos;
    std::size_t id_begin = fb.rfind(' ', id_end - 1);
    if (id_begin == std::string::npos) break;
    const int id = std::stoi(fb.substr(id_begin + 1, id_end - id_begin - 1));
    const auto word_begin = pos + marker.size();
    const auto word = fb.substr(word_begin, fb.find('.', word_begin) - word_begin);
    if (word == "hot") {
      st.hot.insert(id);
      st.cold.erase(id);
    } else if (word == "cold") {
      st.cold.insert(id);
      st.hot.erase(id);
    } else if (word == "clean") {
      st.clean.insert(id);
    }
    pos = word_begin;
  }
}

bool holds(const GoalPredicate& g, const SymbolicState& st, const Observation& obs) {
  for (const auto& [id, t] : st.type) {
    if (t != g.subject) continue;
    const bool held = obs.pose.held && *obs.pose.held == id;
    bool ok = true;
    for (const auto c : g.conditions) {
      switch (c) {
        case Condition::Near: {
          ok = false;
          for (const auto& v : obs.visible)
            if (v.id == id && v.distance <= 1) ok = true;
          break;
        }
        case Condition::Held: ok = held; break;
        case Condition::Hot: ok = st.hot.count(id) > 0; break;
        case Condition::Cold: ok = st.cold.count(id) > 0; break;
        case Condition::Clean: ok = st.clean.count(id) > 0; break;
        case Condition::Placed: {
          ok = false;
          const auto it = st.parent.find(id);
          if (!held && it != st.parent.end() && it->second != 0 && g.receptacle) {
            const auto pt = st.type.find(it->second);
            ok = pt != st.type.end() && pt->second == *g.receptacle;
          }
          break;
        }
        case Condition::Declared: ok = st.declared.count(id) > 0; break;
      }
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

void absorb_visible(const Observation& obs, SymbolicState& st) {
  for (const auto& v : obs.visible) {
    st.type[v.id] = v.type;
    st.parent[v.id] = v.relation.kind == Relation::Kind::Floor ? 0 : v.relation.parent;
  }
}

}  // namespace

std::vector<int> subtask_completion_steps(const Trajectory& t) {
  std::vector<int> out(t.task.subtasks.size(), -1);
  if (t.observations.empty()) return out;
  SymbolicState st;
  absorb_visible(t.observations[0], st);
  std::size_t k = 0;
  for (std::size_t s = 1; s < t.observations.size() && k < out.size(); ++s) {
    const Action& a = t.actions[s - 1];
    const Observation& prev = t.observations[s - 1];
    const Observation& obs = t.observations[s];
    const bool ok = t.feedbacks[s].rfind("OK.", 0) == 0;
    if (ok && a.kind == ActionKind::Put && prev.pose.held) st.parent[*prev.pose.held] = a.target;
    if (ok && a.kind == ActionKind::PickUp) st.parent[a.target] = 0;
    if (ok && a.kind == ActionKind::Declare) st.declared.insert(a.target);
    absorb_visible(obs, st);
    parse_state_messages(t.feedbacks[s], st);
    while (k < out.size() && holds(t.task.subtasks[k].goal, st, obs)) out[k++] = static_cast<int>(s);
  }
  return out;
}

void to_json(Json& j, const Trajectory& t) {
  j = Json{{"traj_id", t.traj_id},
           {"task", t.task},
           {"obs", t.observations},
           {"acts", t.actions},
           {"fbs", t.feedbacks},
           {"steps", t.steps},
           {"success", t.success},
           {"split", to_string(t.split)}};
}

void from_json(const Json& j, Trajectory& t) {
  t.traj_id = j.at("traj_id").get<std::string>();
  t.task = j.at("task").get<Task>();
  t.observations = j.at("obs").get<std::vector<Observation>>();
  t.actions = j.at("acts").get<std::vector<Action>>();
  t.feedbacks = j.at("fbs").get<std::vector<std::string>>();
  t.steps = j.at("steps").get<int>();
  t.success = j.at("success").get<bool>();
  t.split = parse_split(j.at("split").get<std::string>());
  validate(t);
}

}  // namespace trajlab
