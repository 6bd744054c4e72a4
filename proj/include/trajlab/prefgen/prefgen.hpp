#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajlab/abstraction/abstraction.hpp"
#include "trajlab/memory/memory.hpp"

namespace trajlab {

struct PreferencePair {
  std::string task_id;
  Observation initial_observation;
  AbstractTrajectory winner;
  AbstractTrajectory loser;
  double winner_sr = 0.0;
  double loser_sr = 0.0;
  int trials = 0;
  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

struct ScoredCandidate {
  std::string traj_id;
  int successes = 0;
  int trials = 0;
  double sr() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct PrefConfig {
  int k = 4;
  int trials = 5;
};

/// Episode seed of trial `trial` for `task_id`; shared by all candidates so
/// their success rates are measured on the same start poses.
std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& task_id, int trial);

/// Observation o1 used as the retriever input for a training task.
Observation initial_observation(const Scene& scene, const Task& task, std::uint64_t master_seed);

/// k distinct trajectories, stratified: the task's own trajectory when
/// stored, one other from the same scene, one with the same instruction from
/// another scene, then uniform without replacement for the rest. Strata that
/// are empty are skipped. Throws ValidationError when k exceeds the store.
std::vector<const Trajectory*> sample_candidates(const MemoryStore& memory, const Task& task, int k,
                                                 std::uint64_t seed);

/// Success counts over `trials` episodes per candidate, each run with the
/// candidate's abstract (conditioned on `task`) as reference.
std::vector<ScoredCandidate> measure_effectiveness(const Scene& scene, const Task& task,
                                                   const std::vector<const Trajectory*>& candidates,
                                                   int trials, std::uint64_t master_seed, int jobs = 1,
                                                   SimParams params = {});

/// Every strictly ordered pair; equal success counts are dropped.
std::vector<PreferencePair> make_pairs(const std::string& task_id, const Observation& initial_obs,
                                       const std::vector<AbstractTrajectory>& abstracts,
                                       const std::vector<ScoredCandidate>& scores);

/// Full dataset over the training tasks. Output order follows `tasks`, then
/// candidate order; independent of `jobs`.
std::vector<PreferencePair> generate_preferences(const std::vector<Task>& tasks, const SceneIndex& scenes,
                                                 const MemoryStore& memory, const PrefConfig& config,
                                                 std::uint64_t master_seed, int jobs = 1,
                                                 SimParams params = {});

void to_json(Json& j, const PreferencePair& p);
void from_json(const Json& j, PreferencePair& p);

std::string prefs_to_jsonl(const std::vector<PreferencePair>& pairs);
std::vector<PreferencePair> prefs_from_jsonl(const std::string& text);

}  // namespace trajlab
