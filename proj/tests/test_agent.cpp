#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "trajlab/agent/agent.hpp"
#include "trajlab/common.hpp"
#include "trajlab/planner/planner.hpp"

using namespace trajlab;
using namespace trajlab::testing;

namespace {

const Trajectory* first_other_scene(const MemoryStore& m, const Task& task) {
  for (const auto* t : m.list())
    if (t->task.scene_id != task.scene_id && is_two_room(archetype_of_scene_id(t->task.scene_id)) ==
                                                 is_two_room(archetype_of_scene_id(task.scene_id)))
      return t;
  return nullptr;
}

}  // namespace

TEST_CASE("hints carry interaction poses") {
  const Lab& lab = default_lab();
  for (const auto* t : lab.train_memory.list()) {
    const auto a = abstract_trajectory(*t, t->task);
    const auto h = extract_hints(a);
    CHECK(h.waypoints.size() == a.milestones.size());
    for (std::size_t i = 0; i < t->actions.size(); ++i) {
      if (t->actions[i].kind != ActionKind::PickUp) continue;
      const Cell at = t->observations[i + 1].pose.cell;
      const bool found = std::any_of(h.waypoints.begin(), h.waypoints.end(), [&](const Waypoint& w) {
        return w.cell == at && w.interaction == ActionKind::PickUp;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("raw hints turn every pose into a waypoint") {
  const Lab& lab = default_lab();
  const auto* t = lab.test_memory.list().front();
  const auto r = raw_view(*t, t->task);
  const auto h = extract_hints(r);
  CHECK(h.raw);
  REQUIRE(h.waypoints.size() == r.milestones.size());
  for (std::size_t i = 0; i < h.waypoints.size(); ++i)
    CHECK(h.waypoints[i].cell == t->observations[i].pose.cell);
}

TEST_CASE("goto hints without interactions hold start and goal only") {
  const Lab& lab = default_lab();
  for (const auto* t : lab.train_memory.list()) {
    if (t->task.family != TaskFamily::Goto) continue;
    const auto h = extract_hints(abstract_trajectory(*t, t->task));
    CHECK(h.skeleton.empty());
    for (const auto& w : h.waypoints) CHECK_FALSE(w.interaction.has_value());
    CHECK(h.waypoints.size() <= 3);  // start, first sighting, goal
  }
}

TEST_CASE("visible target one cell ahead is picked up") {
  Scene s = empty_room("k", 5, 5);
  const int counter = add_object(s, ObjType::CounterTop, {3, 1});
  const int cup = add_child(s, ObjType::Cup, counter, false);
  add_object(s, ObjType::Shelf, {5, 5});
  const Task t = make_task("t", TaskFamily::PickAndPlace, ObjType::Cup, ObjType::Shelf, s.scene_id);
  Env env(s);
  const auto obs = env.reset_at(t, {{3, 2}, 0, 0, {}});
  AgentBelief b(s.width, s.height);
  update_belief(b, std::nullopt, obs, std::nullopt);
  CHECK(next_action(b, t, {}, obs) == Action::with(ActionKind::PickUp, cup));
}

TEST_CASE("self reflection and the blacklist") {
  Observation prev;
  prev.pose = {{2, 2}, 0, 0, {}};
  CHECK_FALSE(self_reflection(Action::simple(ActionKind::MoveAhead), prev, "OK. You see: nothing.").has_value());
  const auto note = self_reflection(Action::simple(ActionKind::MoveAhead), prev, "Failed: blocked. You see: nothing.");
  REQUIRE(note.has_value());
  CHECK(note->reason == "blocked");
  CHECK(note->pose == prev.pose);

  // An agent facing a wall bumps once, then never repeats the move there.
  Scene s = empty_room("r", 4, 4);
  add_object(s, ObjType::Sofa, {4, 4});
  const Task t = make_task("t", TaskFamily::Goto, ObjType::Sofa, std::nullopt, s.scene_id);
  Env env(s);
  Observation obs = env.reset_at(t, {{1, 1}, 0, 0, {}});
  AgentBelief b(s.width, s.height);
  update_belief(b, std::nullopt, obs, std::nullopt);
  const Action bump = Action::simple(ActionKind::MoveAhead);
  const Observation after = env.step(bump);
  update_belief(b, bump, after, self_reflection(bump, obs, after.feedback));
  CHECK(b.blacklisted(after.pose, bump));
  CHECK_FALSE(next_action(b, t, {}, after) == bump);
}

TEST_CASE("two consecutive failures force a new plan") {
  Scene s = empty_room("r", 8, 8);
  add_object(s, ObjType::Person, {8, 8});
  const Task t = make_task("t", TaskFamily::Goto, ObjType::Person, std::nullopt, s.scene_id);
  Env env(s);
  Observation obs = env.reset_at(t, {{1, 1}, 180, 0, {}});
  AgentBelief b(s.width, s.height);
  update_belief(b, std::nullopt, obs, std::nullopt);
  // Walk until the policy holds a navigation plan.
  for (int i = 0; i < 10 && !b.plan; ++i) {
    const Action a = next_action(b, t, {}, obs);
    const Observation o = env.step(a);
    update_belief(b, a, o, self_reflection(a, obs, o.feedback));
    obs = o;
  }
  REQUIRE(b.plan != nullptr);
  const int before = b.plan->id;
  // Two failed actions in a row at the same pose.
  for (const auto& a : {Action::with(ActionKind::Open, 1), Action::with(ActionKind::PickUp, 1)}) {
    const Observation o = env.step(a);
    REQUIRE(o.feedback.rfind("Failed:", 0) == 0);
    update_belief(b, a, o, self_reflection(a, obs, o.feedback));
    obs = o;
  }
  CHECK(b.force_replan);
  next_action(b, t, {}, obs);
  REQUIRE(b.plan != nullptr);
  CHECK(b.plan->id != before);
}

TEST_CASE("episodes are deterministic") {
  const Lab& lab = default_lab();
  const Task& task = lab.test.tasks.front();
  const Scene& scene = lab.test.scenes.at(task.scene_id);
  const auto* ref = lab.test_memory.list().front();
  const auto a = abstract_trajectory(*ref, task);
  const auto r1 = execute_episode(scene, task, &a, 123, lab.config.sim);
  const auto r2 = execute_episode(scene, task, &a, 123, lab.config.sim);
  CHECK(r1.trajectory == r2.trajectory);
  CHECK(Json(r1).dump() == Json(r2).dump());
  CHECK(r1.subtask_successes.size() == task.subtasks.size());
  if (!r1.success) CHECK(r1.steps == task.total_horizon());
}

TEST_CASE("policy invariants: no blacklisted action, knowledge never reverts") {
  const Lab& lab = default_lab();
  int steps = 0;
  for (std::size_t i = 0; i < lab.test.tasks.size(); i += 3) {
    const Task& task = lab.test.tasks[i];
    const Scene& scene = lab.test.scenes.at(task.scene_id);
    const auto* ref = first_other_scene(lab.test_memory, task);
    const auto hints = ref ? extract_hints(abstract_trajectory(*ref, task)) : ReferenceHints{};
    Env env(scene, lab.config.sim);
    Observation obs = env.reset(task, derive_seed(5, 0, i));
    AgentBelief b(scene.width, scene.height);
    update_belief(b, std::nullopt, obs, std::nullopt);
    for (int s = 0; s < task.total_horizon(); ++s) {
      b.current_subtask_index = 0;
      while (b.current_subtask_index < static_cast<int>(task.subtasks.size()) &&
             check_goal(env.state(), task.subtasks[b.current_subtask_index].goal))
        ++b.current_subtask_index;
      if (b.current_subtask_index == static_cast<int>(task.subtasks.size())) break;
      const Action a = next_action(b, task, hints, obs);
      CHECK_FALSE(b.blacklisted(obs.pose, a));
      if (a.kind == ActionKind::Stop) break;
      const auto known_before = b.known_map;
      const Observation next = env.step(a);
      update_belief(b, a, next, self_reflection(a, obs, next.feedback));
      for (std::size_t c = 0; c < known_before.size(); ++c)
        if (known_before[c] != Knowledge::Unknown) CHECK(b.known_map[c] != Knowledge::Unknown);
      obs = next;
      ++steps;
    }
  }
  CHECK(steps > 100);
}

TEST_CASE("own expert reference succeeds and stays close to expert length") {
  const Lab& lab = default_lab();
  int episodes = 0, wins = 0, close = 0;
  for (std::size_t i = 0; i < lab.test.tasks.size(); ++i) {
    const Task& task = lab.test.tasks[i];
    const Scene& scene = lab.test.scenes.at(task.scene_id);
    const std::uint64_t seed = derive_seed(77, 0, i);
    const auto expert = plan_expert(scene, task, seed, lab.config.sim);
    const auto a = abstract_trajectory(expert, task);
    const auto r = execute_episode(scene, task, &a, seed, lab.config.sim);
    ++episodes;
    wins += r.success;
    close += r.success && r.steps <= expert.steps + 10;
  }
  MESSAGE("self-reference success " << wins << "/" << episodes << ", within expert+10: " << close);
  CHECK(wins >= 0.9 * episodes);
  CHECK(close >= 0.8 * episodes);
}

TEST_CASE("matching reference beats a wrong-scene one on a two-room task") {
  const Lab& lab = default_lab();
  const Task* task = nullptr;
  for (const auto& t : lab.test.tasks)
    if (is_two_room(archetype_of_scene_id(t.scene_id)) && t.family == TaskFamily::AnswerWhere &&
        lab.test_memory.find(t.task_id)) {
      task = &t;
      break;
    }
  REQUIRE(task != nullptr);
  const Scene& scene = lab.test.scenes.at(task->scene_id);
  const auto own = abstract_trajectory(*lab.test_memory.find(task->task_id), *task);
  const auto* other = first_other_scene(lab.test_memory, *task);
  REQUIRE(other != nullptr);
  const auto wrong = abstract_trajectory(*other, *task);
  int match = 0, cross = 0, none = 0;
  for (int s = 0; s < 20; ++s) {
    const auto seed = derive_seed(31, 0, s);
    match += execute_episode(scene, *task, &own, seed, lab.config.sim).success;
    cross += execute_episode(scene, *task, &wrong, seed, lab.config.sim).success;
    none += execute_episode(scene, *task, nullptr, seed, lab.config.sim).success;
  }
  MESSAGE("matching " << match << ", wrong scene " << cross << ", none " << none << " of 20");
  CHECK(match > cross);
  CHECK(none <= match);
}
