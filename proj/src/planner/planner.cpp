#include "trajlab/planner/planner.hpp"

#include <climits>
#include <functional>

#include "trajlab/common.hpp"
#include "trajlab/planner/navigation.hpp"

namespace trajlab {

namespace {

// Raised inside candidate evaluation; converted to PlanFailure at the top.
struct ScriptError {
  std::string what;
};

class ExpertRunner {
 public:
  ExpertRunner(const Scene& scene, const Task& task, SimParams params)
      : env_(scene, params), task_(&task) {}

  void start(std::uint64_t seed) { record_start(env_.reset(*task_, seed)); }
  void start_at(const Pose& pose) { record_start(env_.reset_at(*task_, pose)); }
  void record_start(const Observation& obs) {
    plan_.trajectory.observations.push_back(obs);
    plan_.trajectory.feedbacks.push_back(obs.feedback);
  }

  bool finished() const { return subtask_ >= task_->subtasks.size(); }
  std::size_t subtask() const { return subtask_; }
  bool subtask_done(std::size_t k) const { return subtask_ > k; }
  const WorldState& world() const { return env_.state(); }
  int steps() const { return static_cast<int>(plan_.trajectory.actions.size()); }
  ExpertPlan take() { return std::move(plan_); }

  void act(const Action& a) {
    const auto obs = env_.step(a);
    if (obs.feedback.rfind("Failed:", 0) == 0)
      throw ScriptError{"scripted " + to_string(a) + " failed: " + obs.feedback};
    auto& t = plan_.trajectory;
    t.actions.push_back(a);
    t.observations.push_back(obs);
    t.feedbacks.push_back(obs.feedback);
    while (!finished() && check_goal(env_.state(), task_->subtasks[subtask_].goal)) ++subtask_;
  }

  void go_to(const ObjectInstance& obj, bool sight_only) {
    const auto& w = env_.state();
    NavProblem p;
    p.width = w.scene->width;
    p.height = w.scene->height;
    p.passable = [&w](Cell c) { return w.walkable(c); };
    const int reach = sight_only ? w.params.view_range : w.params.interaction_range;
    for (int y = obj.position.y - reach; y <= obj.position.y + reach; ++y)
      for (int x = obj.position.x - reach; x <= obj.position.x + reach; ++x) {
        const Cell c{x, y};
        if (!w.walkable(c) || chebyshev(c, obj.position) > reach) continue;
        if (!line_of_sight(*w.scene, c, obj.position)) continue;
        for (int h = 0; h < 360; h += 90)
          if (in_view_cone({c, h, 0, {}}, obj.position, w.params.view_range)) p.goals.push_back({c, h});
      }
    const NavPose from{w.pose.cell, w.pose.heading};
    const auto path = plan_path(p, from);
    if (!path) throw ScriptError{"no path to " + std::string(to_string(obj.type)) + " " + std::to_string(obj.id)};
    plan_.segments.push_back({w.pose, steps(), obj.id, sight_only, static_cast<int>(path->size())});
    for (const auto k : *path) act(Action::simple(k));
  }

  void face(const ObjectInstance& obj) {
    int pitch = env_.state().pose.pitch;
    const int want = pitch_for(obj.elevation, pitch);
    while (pitch < want) {
      act(Action::simple(ActionKind::LookUp));
      pitch += 30;
    }
    while (pitch > want) {
      act(Action::simple(ActionKind::LookDown));
      pitch -= 30;
    }
  }

  // Walks up to the object and makes it visible.
  void approach(int id, bool sight_only = false) {
    const ObjectInstance obj = *world().find(id);
    go_to(obj, sight_only);
    face(obj);
  }

 private:
  Env env_;
  const Task* task_;
  ExpertPlan plan_;
  std::size_t subtask_ = 0;
};

using Script = std::function<void(ExpertRunner&, int)>;

const ObjectInstance* closed_parent(const WorldState& w, const ObjectInstance& o) {
  if (o.relation.kind != Relation::Kind::In) return nullptr;
  const auto* p = w.find(o.relation.parent);
  return p && p->openable && !p->is_open ? p : nullptr;
}

// Runs `script` for every instance of `type` on a copy of the runner and
// commits the cheapest (ties: smaller id). Returns the chosen id.
int run_cheapest(ExpertRunner& runner, ObjType type, const Script& script) {
  std::optional<ExpertRunner> best;
  int best_id = 0;
  int best_steps = INT_MAX;
  std::string last_error = "no " + std::string(to_string(type)) + " in scene";
  for (const auto& o : runner.world().objects) {
    if (o.type != type) continue;
    if (runner.world().pose.held && *runner.world().pose.held == o.id) continue;
    ExpertRunner trial = runner;
    try {
      script(trial, o.id);
    } catch (const ScriptError& e) {
      last_error = e.what;
      continue;
    }
    if (trial.steps() < best_steps) {
      best_steps = trial.steps();
      best_id = o.id;
      best.emplace(std::move(trial));
    }
  }
  if (!best) throw ScriptError{last_error};
  runner = std::move(*best);
  return best_id;
}

void pick_script(ExpertRunner& r, int id) {
  const std::size_t k = r.subtask();
  if (const auto* c = closed_parent(r.world(), *r.world().find(id))) {
    const int cid = c->id;
    r.approach(cid);
    r.act(Action::with(ActionKind::Open, cid));
  }
  if (r.subtask_done(k)) return;
  r.approach(id);
  r.act(Action::with(ActionKind::PickUp, id));
}

void declare_script(ExpertRunner& r, int id) {
  if (const auto* c = closed_parent(r.world(), *r.world().find(id))) {
    const int cid = c->id;
    r.approach(cid);
    r.act(Action::with(ActionKind::Open, cid));
    r.face(*r.world().find(id));
  } else {
    r.approach(id, true);
  }
  r.act(Action::with(ActionKind::Declare, id));
}

// Appliance cycle: open if needed, put inside, close, run, reopen, take out.
void appliance_script(ExpertRunner& r, int appliance, int item, bool needs_toggle) {
  r.approach(appliance);
  if (!r.world().find(appliance)->is_open) r.act(Action::with(ActionKind::Open, appliance));
  r.act(Action::with(ActionKind::Put, appliance));
  r.act(Action::with(ActionKind::Close, appliance));
  const auto* obj = r.world().find(item);
  if (needs_toggle && obj->temperature != Temperature::Hot && !r.world().find(appliance)->is_on)
    r.act(Action::with(ActionKind::ToggleOn, appliance));
  r.act(Action::with(ActionKind::Open, appliance));
  r.face(*r.world().find(item));
  r.act(Action::with(ActionKind::PickUp, item));
}

void clean_script(ExpertRunner& r, int sink, int item) {
  r.approach(sink);
  r.act(Action::with(ActionKind::Put, sink));
  if (r.world().find(item)->cleanliness != Cleanliness::Clean) {
    int faucet = 0;
    for (const auto& o : r.world().objects)
      if (o.type == ObjType::Faucet && o.position == r.world().find(sink)->position) faucet = o.id;
    if (faucet == 0) throw ScriptError{"sink without faucet"};
    r.face(*r.world().find(faucet));
    r.act(Action::with(ActionKind::ToggleOn, faucet));
  }
  r.face(*r.world().find(item));
  r.act(Action::with(ActionKind::PickUp, item));
}

void place_script(ExpertRunner& r, int receptacle) {
  r.approach(receptacle);
  const auto* rec = r.world().find(receptacle);
  if (rec->openable && !rec->is_open) r.act(Action::with(ActionKind::Open, receptacle));
  r.act(Action::with(ActionKind::Put, receptacle));
}

ExpertPlan run_plan(ExpertRunner& runner, const Task& task) {
  try {
    int item = 0;
    for (std::size_t k = 0; k < task.subtasks.size(); ++k) {
      if (runner.subtask_done(k)) continue;
      const SubTask& st = task.subtasks[k];
      const ObjType target = st.goal.subject;
      switch (st.kind) {
        case SubTaskKind::Navigate:
          run_cheapest(runner, target, [](ExpertRunner& r, int id) { r.approach(id); });
          break;
        case SubTaskKind::LocateAndDeclare:
          run_cheapest(runner, target, declare_script);
          break;
        case SubTaskKind::FindAndPick:
          item = run_cheapest(runner, target, pick_script);
          break;
        case SubTaskKind::Heat:
          run_cheapest(runner, ObjType::Microwave,
                       [item](ExpertRunner& r, int id) { appliance_script(r, id, item, true); });
          break;
        case SubTaskKind::Cool:
          run_cheapest(runner, ObjType::Fridge,
                       [item](ExpertRunner& r, int id) { appliance_script(r, id, item, false); });
          break;
        case SubTaskKind::Clean:
          run_cheapest(runner, ObjType::Sink,
                       [item](ExpertRunner& r, int id) { clean_script(r, id, item); });
          break;
        case SubTaskKind::Place:
          run_cheapest(runner, *st.goal.receptacle, place_script);
          break;
      }
      if (!runner.subtask_done(k))
        throw ScriptError{"subtask '" + st.description + "' not satisfied by its script"};
    }
  } catch (const ScriptError& e) {
    throw PlanFailure(task.task_id, "task " + task.task_id + ": " + e.what);
  }
  ExpertPlan plan = runner.take();
  auto& t = plan.trajectory;
  t.traj_id = task.task_id;
  t.task = task;
  t.steps = static_cast<int>(t.actions.size());
  t.success = true;
  return plan;
}

}  // namespace

ExpertPlan plan_expert_detailed(const Scene& scene, const Task& task, std::uint64_t episode_seed,
                                SimParams params) {
  ExpertRunner runner(scene, task, params);
  runner.start(episode_seed);
  return run_plan(runner, task);
}

ExpertPlan plan_expert_from(const Scene& scene, const Task& task, const Pose& start, SimParams params) {
  ExpertRunner runner(scene, task, params);
  runner.start_at(start);
  return run_plan(runner, task);
}

}  // namespace trajlab
