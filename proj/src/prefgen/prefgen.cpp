#include "trajlab/prefgen/prefgen.hpp"

#include <algorithm>
#include <sstream>

#include "trajlab/agent/agent.hpp"
#include "trajlab/common.hpp"
#include "trajlab/parallel.hpp"

namespace trajlab {

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& task_id, int trial) {
  return derive_seed(derive_seed(master_seed, streams::kTrial, fnv1a(task_id)), 0,
                     static_cast<std::uint64_t>(trial));
}

Observation initial_observation(const Scene& scene, const Task& task, std::uint64_t master_seed) {
  Env env(scene);
  return env.reset(task, trial_seed(master_seed, task.task_id, 0));
}

std::vector<const Trajectory*> sample_candidates(const MemoryStore& memory, const Task& task, int k,
                                                 std::uint64_t seed) {
  if (k < 0 || static_cast<std::size_t>(k) > memory.size())
    throw ValidationError("cannot sample " + std::to_string(k) + " candidates from a memory of " +
                          std::to_string(memory.size()));
  std::vector<const Trajectory*> pool = memory.list();
  Rng rng(derive_seed(seed, streams::kSample, fnv1a(task.task_id)));
  std::vector<const Trajectory*> out;
  if (k == 0) return out;

  const auto take = [&](const Trajectory* t) {
    out.push_back(t);
    pool.erase(std::find(pool.begin(), pool.end(), t));
  };
  // One pick from the candidates matching `pred`, uniformly.
  const auto take_one = [&](auto pred) {
    std::vector<const Trajectory*> match;
    for (const auto* t : pool)
      if (pred(*t)) match.push_back(t);
    if (!match.empty() && out.size() < static_cast<std::size_t>(k)) take(match[rng.below(match.size())]);
  };
  const auto same_scene = [&](const Trajectory& t) { return t.task.scene_id == task.scene_id; };
  if (const Trajectory* own = memory.find(task.task_id)) take(own);
  take_one(same_scene);
  take_one([&](const Trajectory& t) { return !same_scene(t) && t.task.instruction == task.instruction; });
  rng.shuffle(pool);
  for (std::size_t i = 0; out.size() < static_cast<std::size_t>(k); ++i) out.push_back(pool[i]);
  return out;
}

std::vector<ScoredCandidate> measure_effectiveness(const Scene& scene, const Task& task,
                                                   const std::vector<const Trajectory*>& candidates,
                                                   int trials, std::uint64_t master_seed, int jobs,
                                                   SimParams params) {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  std::vector<AbstractTrajectory> abstracts;
  abstracts.reserve(candidates.size());
  for (const auto* c : candidates) abstracts.push_back(abstract_trajectory(*c, task));
  const std::size_t n = candidates.size() * static_cast<std::size_t>(trials);
  const auto wins = parallel_map<int>(n, jobs, [&](std::size_t i) {
    const std::size_t c = i / trials;
    const int trial = static_cast<int>(i % trials);
    return execute_episode(scene, task, &abstracts[c], trial_seed(master_seed, task.task_id, trial), params)
                   .success
               ? 1
               : 0;
  });
  std::vector<ScoredCandidate> out(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    out[c].traj_id = candidates[c]->traj_id;
    out[c].trials = trials;
    for (int t = 0; t < trials; ++t) out[c].successes += wins[c * trials + t];
  }
  return out;
}

std::vector<PreferencePair> make_pairs(const std::string& task_id, const Observation& initial_obs,
                                       const std::vector<AbstractTrajectory>& abstracts,
                                       const std::vector<ScoredCandidate>& scores) {
  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      const auto& a = scores[i];
      const auto& b = scores[j];
      if (a.sr() == b.sr()) continue;
      const bool a_wins = a.sr() > b.sr();
      PreferencePair p;
      p.task_id = task_id;
      p.initial_observation = initial_obs;
      p.winner = abstracts[a_wins ? i : j];
      p.loser = abstracts[a_wins ? j : i];
      p.winner_sr = (a_wins ? a : b).sr();
      p.loser_sr = (a_wins ? b : a).sr();
      p.trials = std::max(a.trials, b.trials);
      out.push_back(std::move(p));
    }
  return out;
}

std::vector<PreferencePair> generate_preferences(const std::vector<Task>& tasks, const SceneIndex& scenes,
                                                 const MemoryStore& memory, const PrefConfig& config,
                                                 std::uint64_t master_seed, int jobs, SimParams params) {
  std::vector<std::vector<const Trajectory*>> cands(tasks.size());
  std::vector<std::vector<AbstractTrajectory>> abstracts(tasks.size());
  std::vector<Observation> firsts(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto it = scenes.find(tasks[t].scene_id);
    if (it == scenes.end()) throw ValidationError("task " + tasks[t].task_id + " has no scene");
    cands[t] = sample_candidates(memory, tasks[t], config.k, master_seed);
    for (const auto* c : cands[t]) abstracts[t].push_back(abstract_trajectory(*c, tasks[t]));
    firsts[t] = initial_observation(it->second, tasks[t], master_seed);
  }

  // Flatten (task, candidate, trial) so the pool stays busy across tasks.
  struct Cell {
    std::size_t task, cand;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < tasks.size(); ++t)
    for (std::size_t c = 0; c < cands[t].size(); ++c)
      for (int r = 0; r < config.trials; ++r) cells.push_back({t, c, r});
  const auto wins = parallel_map<int>(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Task& task = tasks[cell.task];
    return execute_episode(scenes.at(task.scene_id), task, &abstracts[cell.task][cell.cand],
                           trial_seed(master_seed, task.task_id, cell.trial), params)
                   .success
               ? 1
               : 0;
  });

  std::vector<PreferencePair> out;
  std::size_t i = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::vector<ScoredCandidate> scores(cands[t].size());
    for (std::size_t c = 0; c < cands[t].size(); ++c) {
      scores[c].traj_id = cands[t][c]->traj_id;
      scores[c].trials = config.trials;
      for (int r = 0; r < config.trials; ++r) scores[c].successes += wins[i++];
    }
    auto pairs = make_pairs(tasks[t].task_id, firsts[t], abstracts[t], scores);
    for (auto& p : pairs) out.push_back(std::move(p));
  }
  return out;
}

void to_json(Json& j, const PreferencePair& p) {
  j = Json{{"task_id", p.task_id},
           {"initial_observation", p.initial_observation},
           {"winner", p.winner},
           {"loser", p.loser},
           {"winner_sr", p.winner_sr},
           {"loser_sr", p.loser_sr},
           {"trials", p.trials}};
}

void from_json(const Json& j, PreferencePair& p) {
  p.task_id = j.at("task_id").get<std::string>();
  p.initial_observation = j.at("initial_observation").get<Observation>();
  p.winner = j.at("winner").get<AbstractTrajectory>();
  p.loser = j.at("loser").get<AbstractTrajectory>();
  p.winner_sr = j.at("winner_sr").get<double>();
  p.loser_sr = j.at("loser_sr").get<double>();
  p.trials = j.at("trials").get<int>();
  if (!(p.winner_sr > p.loser_sr)) throw ValidationError("pair for " + p.task_id + " is not strictly ordered");
}

std::string prefs_to_jsonl(const std::vector<PreferencePair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += Json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<PreferencePair> prefs_from_jsonl(const std::string& text) {
  std::vector<PreferencePair> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<PreferencePair>());
    } catch (const Json::exception& e) {
      throw ValidationError("prefs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace trajlab
