#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "trajlab/abstraction/abstraction.hpp"

using namespace trajlab;
using namespace trajlab::testing;

namespace {

std::set<int> steps_of(const AbstractTrajectory& a) {
  std::set<int> s;
  for (const auto& m : a.milestones) s.insert(m.step_index);
  return s;
}

// First step whose observation lists an object of `type`, or -1.
int first_seen(const Trajectory& t, ObjType type) {
  for (std::size_t i = 0; i < t.observations.size(); ++i)
    for (const auto& v : t.observations[i].visible)
      if (v.type == type) return static_cast<int>(i);
  return -1;
}

Task retarget(const Trajectory& t, ObjType target) {
  return make_task("probe", TaskFamily::Goto, target, std::nullopt, t.task.scene_id);
}

}  // namespace

TEST_CASE("milestones are ordered and keep every interaction") {
  const Lab& lab = default_lab();
  for (const auto* store : {&lab.train_memory, &lab.test_memory})
    for (const auto* t : store->list()) {
      const auto a = abstract_trajectory(*t, t->task);
      REQUIRE(!a.milestones.empty());
      CHECK(a.milestones.front().step_index == 0);
      CHECK(static_cast<int>(a.milestones.size()) <= std::max(1, t->steps));
      for (std::size_t i = 1; i < a.milestones.size(); ++i)
        CHECK(a.milestones[i - 1].step_index < a.milestones[i].step_index);
      const auto kept = steps_of(a);
      for (std::size_t i = 0; i < t->actions.size(); ++i)
        if (is_interaction(t->actions[i].kind)) CHECK(kept.count(static_cast<int>(i) + 1) == 1);
    }
}

TEST_CASE("compression over the default test memory") {
  const Lab& lab = default_lab();
  double milestones = 0, steps = 0;
  for (const auto* t : lab.test_memory.list()) {
    milestones += abstract_trajectory(*t, t->task).milestones.size();
    steps += t->steps;
  }
  CHECK(milestones / steps <= 0.5);
}

TEST_CASE("long pick-and-place trajectories compress to a few milestones") {
  const Lab& lab = default_lab();
  int seen = 0;
  for (const auto* store : {&lab.train_memory, &lab.test_memory})
    for (const auto* t : store->list()) {
      if (t->task.family != TaskFamily::PickAndPlace || t->steps < 30) continue;
      CHECK(abstract_trajectory(*t, t->task).milestones.size() <= 8);
      ++seen;
    }
  CHECK(seen > 0);
}

TEST_CASE("goto without the current target in view keeps start and goal only") {
  const Lab& lab = default_lab();
  int seen = 0;
  for (const auto* store : {&lab.train_memory, &lab.test_memory})
    for (const auto* t : store->list()) {
      if (t->task.family != TaskFamily::Goto) continue;
      // Pick a type never visible anywhere in the trajectory.
      for (int k = 0; k < kNumObjTypes; ++k) {
        const auto type = static_cast<ObjType>(k);
        if (first_seen(*t, type) >= 0) continue;
        const auto a = abstract_trajectory(*t, retarget(*t, type));
        const auto goal = subtask_completion_steps(*t).back();
        CHECK(steps_of(a) == std::set<int>{0, goal});
        ++seen;
        break;
      }
    }
  CHECK(seen > 0);
}

TEST_CASE("retargeting adds exactly the first sighting of the new target") {
  const Lab& lab = default_lab();
  int probes = 0;
  for (const auto* t : lab.test_memory.list()) {
    const auto base = steps_of(abstract_trajectory(*t, retarget(*t, ObjType::Person)));
    if (first_seen(*t, ObjType::Person) >= 0) continue;
    for (int k = 0; k < kNumObjTypes; ++k) {
      const auto type = static_cast<ObjType>(k);
      const int first = first_seen(*t, type);
      if (first <= 0) continue;
      auto expect = base;
      expect.insert(first);
      CHECK(steps_of(abstract_trajectory(*t, retarget(*t, type))) == expect);
      ++probes;
    }
  }
  CHECK(probes > 20);
}

TEST_CASE("raw view keeps every step up to the limit") {
  const Lab& lab = default_lab();
  const auto* t = lab.test_memory.list().front();
  const auto r = raw_view(*t, t->task, 8);
  CHECK(r.raw);
  const int expect = std::min<int>(8, static_cast<int>(t->observations.size()));
  REQUIRE(static_cast<int>(r.milestones.size()) == expect);
  for (int i = 0; i < expect; ++i) CHECK(r.milestones[i].step_index == i);
}

TEST_CASE("action summaries") {
  const std::vector<Action> a = {Action::simple(ActionKind::MoveAhead), Action::simple(ActionKind::TurnLeft),
                                 Action::simple(ActionKind::MoveAhead), Action::with(ActionKind::PickUp, 3)};
  const auto s = summarize_actions(a, 0, a.size());
  CHECK(s.find("PickUp(3)") != std::string::npos);
  CHECK(s.find("2 cells") != std::string::npos);
}

TEST_CASE("abstract JSON round trip") {
  const Lab& lab = default_lab();
  const auto* t = lab.train_memory.list().back();
  const auto a = abstract_trajectory(*t, t->task);
  CHECK(Json::parse(Json(a).dump()).get<AbstractTrajectory>() == a);
}
