#include "trajlab/agent/agent.hpp"
#include "trajlab/common.hpp"

namespace trajlab {

EpisodeResult execute_episode(const Scene& scene, const Task& task, const AbstractTrajectory* reference,
                              std::uint64_t episode_seed, SimParams params) {
  Env env(scene, params);
  Observation obs = env.reset(task, episode_seed);
  const ReferenceHints hints = reference ? extract_hints(*reference) : ReferenceHints{};
  AgentBelief belief(scene.width, scene.height);
  update_belief(belief, std::nullopt, obs, std::nullopt);

  EpisodeResult r;
  Trajectory& t = r.trajectory;
  t.traj_id = task.task_id + "/" + hex64(episode_seed);
  t.task = task;
  t.split = Split::Test;
  t.observations.push_back(obs);
  t.feedbacks.push_back(obs.feedback);

  const int budget = task.horizon_per_subtask;
  const std::size_t n = task.subtasks.size();
  r.subtask_successes.assign(n, false);
  r.subtask_steps.assign(n, budget);
  std::size_t k = 0;
  int used = 0;
  const auto advance = [&] {
    while (k < n && check_goal(env.state(), task.subtasks[k].goal)) {
      r.subtask_successes[k] = true;
      r.subtask_steps[k] = used;
      used = 0;
      ++k;
    }
  };
  advance();
  while (k < n && used < budget && env.active()) {
    belief.current_subtask_index = static_cast<int>(k);
    const Action a = next_action(belief, task, hints, obs);
    const Observation prev = obs;
    obs = env.step(a);
    ++used;
    t.actions.push_back(a);
    t.observations.push_back(obs);
    t.feedbacks.push_back(obs.feedback);
    update_belief(belief, a, obs, self_reflection(a, prev, obs.feedback));
    advance();
  }

  r.raw_steps = static_cast<int>(t.actions.size());
  r.success = k == n;
  t.steps = r.raw_steps;
  t.success = r.success;
  r.steps = r.success ? r.raw_steps : task.total_horizon();
  return r;
}

void to_json(Json& j, const EpisodeResult& r) {
  j = Json{{"success", r.success},
           {"steps", r.steps},
           {"raw_steps", r.raw_steps},
           {"subtask_successes", r.subtask_successes},
           {"subtask_steps", r.subtask_steps}};
}

}  // namespace trajlab
