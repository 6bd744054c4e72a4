#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajlab/harness/config.hpp"
#include "trajlab/memory/memory.hpp"

namespace trajlab {

struct Suite {
  Split split = Split::Train;
  SceneIndex scenes;
  std::vector<Task> tasks;     // scene order, then task order
  std::vector<std::uint64_t> scene_seeds;
};

/// Procedural scenes and tasks of one split. Both splits draw tasks from the
/// same per-class signature pools, so test instructions repeat train ones
/// while the scenes never do.
Suite build_suite(Split split, const SuiteConfig& config, std::uint64_t master_seed);

std::map<std::string, Task> task_index(const std::vector<Task>& tasks);

enum class Method { PA, LP, SL, RapSim, SimFtm, Mart, MartNoAbstraction };
inline constexpr Method kAllMethods[] = {Method::PA,     Method::LP,   Method::SL,
                                         Method::RapSim, Method::SimFtm, Method::Mart,
                                         Method::MartNoAbstraction};

std::string_view to_string(Method m);
Method parse_method(std::string_view s);  // ValidationError on unknown names
bool needs_checkpoint(Method m);
bool needs_raw_checkpoint(Method m);

/// Scorers a method may use; pointers may be null when not needed.
struct Models {
  const ScorerModel* trained = nullptr;
  const ScorerModel* trained_raw = nullptr;
  const YesNoModel* yesno = nullptr;
};

/// Retrieval setup of a method; nullopt for PA.
std::optional<Scorer> method_scorer(Method m, const Models& models, const LabConfig& config);

std::uint64_t eval_seed(std::uint64_t master_seed, const std::string& task_id, int repeat);

struct EpisodeRecord {
  std::string task_id;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> retrieved;
  double retrieval_score = 0.0;
  bool success = false;
  int steps = 0;
  std::vector<bool> subtask_successes;
  std::vector<int> subtask_steps;
};

struct EvalReport {
  std::string method;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  int repeats = 0;
  std::vector<EpisodeRecord> records;  // task order, then repeat
  double sr = 0.0;
  double as = 0.0;
  double sr_sub = 0.0;
  double as_sub = 0.0;
};

/// Fills sr/as/sr_sub/as_sub from the records.
void aggregate(EvalReport& report);

/// Runs every (task, repeat) cell: o1 from a reset with the cell seed,
/// retrieval (none for PA), then an episode with the same seed. Throws
/// ValidationError when the method's checkpoint is missing.
EvalReport evaluate(Method method, const std::vector<Task>& tasks, const SceneIndex& scenes,
                    const MemoryStore& memory, const Models& models, const LabConfig& config,
                    std::uint64_t master_seed, int jobs = 1);

Json report_to_json(const EvalReport& r);
std::string report_table(const std::vector<EvalReport>& reports);

struct CorrelationRow {
  std::string task_id;
  std::string traj_id;
  double score_sim = 0.0;
  double score_trained = 0.0;
  double sr = 0.0;
};

struct CorrelationResult {
  std::vector<CorrelationRow> rows;
  std::optional<double> r_sim;      // nullopt when a column is constant
  std::optional<double> r_trained;
};

/// Pearson correlation; nullopt when either column has zero variance or
/// fewer than two entries.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Candidates per test task via sample_candidates, scored by similarity and
/// the trained model, then measured over `trials` episodes each.
/// Throws ValidationError below 30 sampled pairs.
CorrelationResult correlation_study(const std::vector<Task>& tasks, const SceneIndex& scenes,
                                    const MemoryStore& memory, const ScorerModel& trained,
                                    const LabConfig& config, std::uint64_t master_seed, int jobs = 1);

std::string correlation_csv(const CorrelationResult& r);
Json correlation_summary(const CorrelationResult& r);

}  // namespace trajlab
