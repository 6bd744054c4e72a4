#pragma once

#include <map>
#include <string>
#include <vector>

#include "trajlab/memory/memory.hpp"
#include "trajlab/prefgen/prefgen.hpp"
#include "trajlab/retriever/model.hpp"

namespace trajlab {

struct SimilarityWeights {
  double text = 0.5;
  double vis = 0.5;
};

/// text * cos(instruction bags) + vis * cos(first-observation histograms).
/// The trajectory side is read from the abstract's source instruction and
/// first milestone, which is always step 0.
double similarity_score(const Task& task, const Observation& initial_obs, const AbstractTrajectory& abstract,
                        SimilarityWeights weights = {});
double similarity_score(const Task& task, const Observation& initial_obs, const Trajectory& traj,
                        SimilarityWeights weights = {});

enum class ScorerKind { Trained, Similarity, YesNo, SimTopKThen };

struct Scorer {
  ScorerKind kind = ScorerKind::Similarity;
  ScorerKind inner = ScorerKind::Trained;  // SimTopKThen only
  int k = 5;
  bool raw = false;  // featurize raw step sequences instead of abstracts
  const ScorerModel* model = nullptr;
  const YesNoModel* yesno = nullptr;
  SimilarityWeights weights;
};

struct Retrieval {
  std::string traj_id;
  AbstractTrajectory abstract;
  double score = 0.0;
};

/// The view of `traj` that the scorer sees and the agent receives.
AbstractTrajectory reference_view(const Trajectory& traj, const Task& task, bool raw);

/// Scores every memory entry and returns the argmax, smallest traj_id on
/// ties. Candidates are scored on up to `jobs` threads; the result does not
/// depend on `jobs`. Throws ValidationError on an empty memory or a missing model.
Retrieval retrieve(const Scorer& scorer, const MemoryStore& memory, const Task& task,
                   const Observation& initial_obs, int jobs = 1);

/// Plain loop over the same scoring; kept as the reference for `retrieve`.
Retrieval retrieve_serial(const Scorer& scorer, const MemoryStore& memory, const Task& task,
                          const Observation& initial_obs);

/// Index of the best score, first index on ties (callers pass ids in ascending order).
std::size_t argmax_first(const std::vector<double>& scores);

/// Featurizes preference pairs. With `raw_memory` set, the winner and loser are
/// re-read from that store as raw step sequences.
std::vector<FeaturePair> feature_pairs(const std::vector<PreferencePair>& prefs,
                                       const std::map<std::string, Task>& tasks,
                                       const MemoryStore* raw_memory = nullptr);

}  // namespace trajlab
