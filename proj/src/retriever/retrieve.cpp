#include "trajlab/retriever/retrieve.hpp"

#include <algorithm>
#include <numeric>

#include "trajlab/common.hpp"
#include "trajlab/parallel.hpp"

namespace trajlab {
namespace {

double similarity_parts(const std::string& task_instruction, const Observation& o1,
                        const std::string& traj_instruction, const Observation& first, SimilarityWeights w) {
  const double text = cosine(instruction_bag(task_instruction), instruction_bag(traj_instruction));
  const double vis = cosine(observation_histogram(o1), observation_histogram(first));
  return w.text * text + w.vis * vis;
}

void check_scorer(const Scorer& s, ScorerKind kind) {
  if (kind == ScorerKind::Trained && s.model == nullptr) throw ValidationError("trained scorer has no model");
  if (kind == ScorerKind::YesNo && s.yesno == nullptr) throw ValidationError("yes/no scorer has no model");
  if (kind == ScorerKind::SimTopKThen) {
    if (s.inner == ScorerKind::SimTopKThen) throw ValidationError("nested top-k scorer");
    if (s.k < 1) throw ValidationError("top-k needs k >= 1");
    check_scorer(s, s.inner);
  }
}

double score_one(const Scorer& s, ScorerKind kind, const Task& task, const Observation& o1,
                 const AbstractTrajectory& view) {
  switch (kind) {
    case ScorerKind::Trained: return score(*s.model, featurize(task, o1, view));
    case ScorerKind::YesNo: return yesno_score(*s.yesno, featurize(task, o1, view));
    case ScorerKind::Similarity: return similarity_score(task, o1, view, s.weights);
    case ScorerKind::SimTopKThen: break;
  }
  throw ValidationError("unsupported scorer kind");
}

template <typename ForEach>
Retrieval run(const Scorer& scorer, const MemoryStore& memory, const Task& task, const Observation& o1,
              ForEach&& for_each) {
  if (memory.empty()) throw ValidationError("cannot retrieve from an empty memory");
  check_scorer(scorer, scorer.kind);
  const auto list = memory.list();
  const std::size_t n = list.size();
  std::vector<AbstractTrajectory> views(n);
  for_each(n, [&](std::size_t i) { views[i] = reference_view(*list[i], task, scorer.raw); });

  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  ScorerKind kind = scorer.kind;
  if (kind == ScorerKind::SimTopKThen) {
    std::vector<double> sim(n);
    for_each(n, [&](std::size_t i) { sim[i] = score_one(scorer, ScorerKind::Similarity, task, o1, views[i]); });
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
    pool.resize(std::min<std::size_t>(pool.size(), scorer.k));
    std::sort(pool.begin(), pool.end());
    kind = scorer.inner;
  }
  std::vector<double> scores(pool.size());
  for_each(pool.size(), [&](std::size_t i) { scores[i] = score_one(scorer, kind, task, o1, views[pool[i]]); });
  const std::size_t best = pool[argmax_first(scores)];
  return {list[best]->traj_id, std::move(views[best]), scores[argmax_first(scores)]};
}

}  // namespace

double similarity_score(const Task& task, const Observation& initial_obs, const AbstractTrajectory& abstract,
                        SimilarityWeights weights) {
  const Observation empty;
  const Observation& first = abstract.milestones.empty() ? empty : abstract.milestones.front().observation;
  return similarity_parts(task.instruction, initial_obs, abstract.source_instruction, first, weights);
}

double similarity_score(const Task& task, const Observation& initial_obs, const Trajectory& traj,
                        SimilarityWeights weights) {
  const Observation empty;
  const Observation& first = traj.observations.empty() ? empty : traj.observations.front();
  return similarity_parts(task.instruction, initial_obs, traj.task.instruction, first, weights);
}

AbstractTrajectory reference_view(const Trajectory& traj, const Task& task, bool raw) {
  return raw ? raw_view(traj, task) : abstract_trajectory(traj, task);
}

std::size_t argmax_first(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

Retrieval retrieve(const Scorer& scorer, const MemoryStore& memory, const Task& task,
                   const Observation& initial_obs, int jobs) {
  return run(scorer, memory, task, initial_obs,
             [jobs](std::size_t n, const auto& body) { parallel_for(n, jobs, body); });
}

Retrieval retrieve_serial(const Scorer& scorer, const MemoryStore& memory, const Task& task,
                          const Observation& initial_obs) {
  return run(scorer, memory, task, initial_obs, [](std::size_t n, const auto& body) { serial_for(n, body); });
}

std::vector<FeaturePair> feature_pairs(const std::vector<PreferencePair>& prefs,
                                       const std::map<std::string, Task>& tasks, const MemoryStore* raw_memory) {
  std::vector<FeaturePair> out;
  out.reserve(prefs.size());
  std::map<std::string, int> per_task;
  for (const auto& p : prefs) {
    const auto it = tasks.find(p.task_id);
    if (it == tasks.end()) throw ValidationError("preference pair names unknown task " + p.task_id);
    const Task& task = it->second;
    FeaturePair f;
    f.task_id = p.task_id;
    f.id = p.task_id + "#" + std::to_string(per_task[p.task_id]++);
    if (raw_memory == nullptr) {
      f.winner = featurize(task, p.initial_observation, p.winner);
      f.loser = featurize(task, p.initial_observation, p.loser);
    } else {
      const auto view = [&](const AbstractTrajectory& a) {
        const Trajectory* t = raw_memory->find(a.source_traj_id);
        if (t == nullptr) throw ValidationError("pair references missing trajectory " + a.source_traj_id);
        return featurize(task, p.initial_observation, raw_view(*t, task));
      };
      f.winner = view(p.winner);
      f.loser = view(p.loser);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace trajlab
