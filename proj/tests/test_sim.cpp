#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "trajlab/common.hpp"
#include "trajlab/sim/world.hpp"

using namespace trajlab;
using namespace trajlab::testing;

namespace {

// Cone, range and pitch band in floating point; independent of the integer
// test the simulator uses.
bool oracle_visible(const WorldState& w, const ObjectInstance& o) {
  if (w.pose.held && *w.pose.held == o.id) return false;
  const int pitch = w.pose.pitch;
  const bool band = o.elevation == Elevation::Mid || (o.elevation == Elevation::Low && pitch == -30) ||
                    (o.elevation == Elevation::High && pitch == 30);
  if (!band) return false;
  const double dx = o.position.x - w.pose.cell.x;
  const double dy = o.position.y - w.pose.cell.y;
  if (dx == 0 && dy == 0) return false;
  if (std::hypot(dx, dy) > w.params.view_range + 1e-9) return false;
  const double bearing = std::atan2(dx, -dy) * 180.0 / M_PI - w.pose.heading;
  const double rel = std::remainder(bearing, 360.0);
  if (std::abs(rel) > 45.0 + 1e-9) return false;
  if (!line_of_sight(*w.scene, w.pose.cell, o.position)) return false;
  // Walk up the containment chain by hand.
  for (const ObjectInstance* cur = &o; cur->relation.kind != Relation::Kind::Floor;) {
    const ObjectInstance* p = w.find(cur->relation.parent);
    if (cur->relation.kind == Relation::Kind::In && p->openable && !p->is_open) return false;
    cur = p;
  }
  return true;
}

Task task_for(const Scene& s, TaskFamily f, ObjType target, std::optional<ObjType> rec = std::nullopt) {
  return make_task("t0", f, target, rec, s.scene_id);
}

}  // namespace

TEST_CASE("generate_scene is a pure function of archetype and seed") {
  const Scene a = generate_scene(Archetype::Kitchen1Room, 7);
  const Scene b = generate_scene(Archetype::Kitchen1Room, 7);
  CHECK(Json(a).dump() == Json(b).dump());
  const Scene c = generate_scene(Archetype::Kitchen1Room, 8);
  CHECK(Json(a.objects).dump() != Json(c.objects).dump());
}

TEST_CASE("two-room kitchens carry the required appliances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene s = generate_scene(Archetype::Kitchen2Room, seed);
    CHECK(s.has_type(ObjType::Microwave));
    CHECK(s.has_type(ObjType::Fridge));
    CHECK(s.has_type(ObjType::Sink));
    CHECK(s.objects.size() >= 12);
    CHECK(s.objects.size() <= 20);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene s = generate_scene(Archetype::Livingroom2Room, seed);
    CHECK(s.objects.size() >= 8);
    CHECK(s.objects.size() <= 14);
  }
}

TEST_CASE("scene JSON round trip") {
  const Scene s = generate_scene(Archetype::Livingroom2Room, 3);
  const Scene back = Json::parse(Json(s).dump()).get<Scene>();
  CHECK(back == s);
}

TEST_CASE("reset draws seeded start poses") {
  const Scene s = generate_scene(Archetype::Kitchen2Room, 11);
  const Task t = task_for(s, TaskFamily::Goto, ObjType::Fridge);
  Env env(s);
  CHECK(env.reset(t, 5) == env.reset(t, 5));
  std::set<std::tuple<int, int, int>> poses;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto o = env.reset(t, seed);
    poses.insert({o.pose.cell.x, o.pose.cell.y, o.pose.heading});
  }
  CHECK(poses.size() >= 2);
  const auto o = env.reset(t, 1);
  CHECK(o.feedback.find("You see:") != std::string::npos);
  for (std::size_t i = 1; i < o.visible.size(); ++i) CHECK(o.visible[i - 1].id < o.visible[i].id);
}

TEST_CASE("reset_at rejects a task from another scene") {
  const Scene s = generate_scene(Archetype::Kitchen1Room, 1);
  Task t = task_for(s, TaskFamily::Goto, ObjType::Fridge);
  t.scene_id = "elsewhere";
  Env env(s);
  CHECK_THROWS_AS(env.reset(t, 0), ValidationError);
}

TEST_CASE("moving into a wall fails and leaves the pose unchanged") {
  Scene s = empty_room("room", 3, 3);
  add_object(s, ObjType::Person, {3, 3});
  Env env(s);
  const Task t = task_for(s, TaskFamily::Goto, ObjType::Person);
  const Pose start{{1, 1}, 0, 0, {}};
  env.reset_at(t, start);
  const auto o = env.step(Action::simple(ActionKind::MoveAhead));
  CHECK(o.feedback.rfind("Failed: blocked.", 0) == 0);
  CHECK(o.pose == start);
}

TEST_CASE("a closed microwave that is on heats what is inside") {
  Scene s = empty_room("k", 5, 5);
  const int mw = add_object(s, ObjType::Microwave, {3, 1});
  const int potato = add_child(s, ObjType::Potato, mw, true);
  Env env(s);
  const Task t = task_for(s, TaskFamily::PickHeatThenPlace, ObjType::Potato, ObjType::Microwave);
  env.reset_at(t, {{3, 2}, 0, 30, {}});
  CHECK(env.step(Action::with(ActionKind::ToggleOn, mw)).feedback.rfind("OK", 0) == 0);
  env.step(Action::simple(ActionKind::TurnLeft));
  CHECK(env.state().find(potato)->temperature == Temperature::Hot);
}

TEST_CASE("objects in a closed cabinet cannot be picked up") {
  Scene s = empty_room("k", 5, 5);
  const int cab = add_object(s, ObjType::Cabinet, {3, 1});
  const int cup = add_child(s, ObjType::Cup, cab, true);
  Env env(s);
  const Task t = task_for(s, TaskFamily::PickAndPlace, ObjType::Cup, ObjType::Cabinet);
  env.reset_at(t, {{3, 2}, 0, -30, {}});
  const auto o = env.step(Action::with(ActionKind::PickUp, cup));
  CHECK(o.feedback.rfind("Failed: no such object.", 0) == 0);
  CHECK(env.step(Action::with(ActionKind::Open, cab)).feedback.rfind("OK", 0) == 0);
  CHECK(env.step(Action::with(ActionKind::PickUp, cup)).feedback.rfind("OK", 0) == 0);
  CHECK(env.state().pose.held == cup);
}

TEST_CASE("check_goal examples") {
  Scene s = empty_room("k", 5, 5);
  const int counter = add_object(s, ObjType::CounterTop, {1, 3});
  const int sink = add_object(s, ObjType::Sink, {5, 3});
  const int potato = add_child(s, ObjType::Potato, counter, false);
  const int cup = add_child(s, ObjType::Cup, sink, true);
  const int mw = add_object(s, ObjType::Microwave, {3, 1});
  const int table = add_object(s, ObjType::Table, {3, 5});
  (void)cup;
  Env env(s);
  const Task t = task_for(s, TaskFamily::PickHeatThenPlace, ObjType::Potato, ObjType::Table);
  env.reset_at(t, {{2, 3}, 270, 0, {}});

  CHECK_FALSE(check_goal(env.state(), {ObjType::Cup, {Condition::Placed}, ObjType::CounterTop}));
  CHECK(check_goal(env.state(), {ObjType::Cup, {Condition::Placed}, ObjType::Sink}));

  REQUIRE(env.step(Action::with(ActionKind::PickUp, potato)).feedback.rfind("OK", 0) == 0);
  CHECK(check_goal(env.state(), {ObjType::Potato, {Condition::Held}, std::nullopt}));

  // Scripted heat-then-place; the final goal holds only after both parts.
  const GoalPredicate final_goal = t.subtasks.back().goal;
  const std::vector<Action> script = {
      Action::simple(ActionKind::TurnRight), Action::simple(ActionKind::MoveAhead),
      Action::simple(ActionKind::LookUp),    Action::with(ActionKind::Open, mw),
      Action::with(ActionKind::Put, mw),     Action::with(ActionKind::Close, mw),
      Action::with(ActionKind::ToggleOn, mw), Action::with(ActionKind::ToggleOff, mw),
      Action::with(ActionKind::Open, mw),    Action::with(ActionKind::PickUp, potato),
      Action::simple(ActionKind::LookDown),  Action::simple(ActionKind::TurnRight),
      Action::simple(ActionKind::TurnRight), Action::simple(ActionKind::MoveAhead),
      Action::simple(ActionKind::MoveAhead), Action::with(ActionKind::Put, table)};
  std::vector<bool> holds;
  for (const auto& a : script) {
    const auto o = env.step(a);
    REQUIRE_MESSAGE(o.feedback.rfind("Failed", 0) != 0, to_string(a) << ": " << o.feedback);
    holds.push_back(check_goal(env.state(), final_goal));
  }
  const auto* p = env.state().find(potato);
  CHECK(p->temperature == Temperature::Hot);
  CHECK(p->relation == Relation::on(table));
  CHECK(holds.back());
  CHECK(std::count(holds.begin(), holds.end(), true) == 1);
}

TEST_CASE("decompose template counts") {
  CHECK(decompose(TaskFamily::PickHeatThenPlace, ObjType::Potato, ObjType::Table).size() == 3);
  CHECK(decompose(TaskFamily::Goto, ObjType::Person, std::nullopt).size() == 1);
  CHECK(decompose(TaskFamily::PickAndPlace, ObjType::Cup, ObjType::Shelf).size() == 2);
}

TEST_CASE("visibility agrees with a brute-force oracle") {
  int checked = 0, visible = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Scene s = generate_scene(static_cast<Archetype>(seed % kNumArchetypes), seed);
    const Task t = task_for(s, TaskFamily::Goto, s.objects.front().type);
    Env env(s);
    Rng rng(seed);
    for (int trial = 0; trial < 30; ++trial) {
      env.reset(t, rng.next());
      auto& st = env.mutable_state();
      st.pose.pitch = 30 * (static_cast<int>(rng.below(3)) - 1);
      for (auto& o : st.objects)
        if (o.openable) o.is_open = rng.below(2) == 1;
      for (const auto& o : st.objects) {
        const bool want = oracle_visible(st, o);
        CHECK(is_visible(st, o) == want);
        ++checked;
        visible += want;
      }
    }
  }
  CHECK(checked > 1000);
  CHECK(visible > 50);
}

TEST_CASE("walls block line of sight along an axis") {
  Scene s = empty_room("r", 7, 3);
  s.grid[2][4] = '#';
  CHECK_FALSE(line_of_sight(s, {1, 2}, {7, 2}));
  CHECK(line_of_sight(s, {1, 1}, {7, 1}));
  CHECK(line_of_sight(s, {1, 2}, {3, 2}));
}

TEST_CASE("same action sequence gives identical observations") {
  const Scene s = generate_scene(Archetype::Kitchen2Room, 4);
  const Task t = task_for(s, TaskFamily::Goto, ObjType::Fridge);
  auto run = [&] {
    Env env(s);
    std::vector<Observation> out{env.reset(t, 9)};
    const ActionKind ks[] = {ActionKind::MoveAhead, ActionKind::TurnLeft, ActionKind::MoveAhead,
                             ActionKind::LookDown, ActionKind::TurnRight, ActionKind::MoveAhead};
    for (auto k : ks) out.push_back(env.step(Action::simple(k)));
    return Json(out).dump();
  };
  CHECK(run() == run());
}
