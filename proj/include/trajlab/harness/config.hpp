#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "trajlab/prefgen/prefgen.hpp"
#include "trajlab/retriever/model.hpp"
#include "trajlab/retriever/retrieve.hpp"
#include "trajlab/sim/world.hpp"

namespace trajlab {

/// Scenes per archetype (kitchen 1/2 room, living room 1/2 room) and tasks per scene.
struct SuiteConfig {
  std::array<int, kNumArchetypes> train_scenes{3, 3, 2, 2};
  std::array<int, kNumArchetypes> test_scenes{2, 2, 2, 2};
  int tasks_per_scene = 4;
  int kitchen_pool = 14;
  int livingroom_pool = 14;
  int horizon_per_subtask = 50;
};

struct EvalConfig {
  int repeats = 5;
  int correlation_candidates = 3;  // per test task
  int correlation_trials = 5;
};

/// Every tunable default of the pipeline. Loaded from one JSON document in
/// which every key is optional and unknown keys are rejected.
struct LabConfig {
  SuiteConfig suite;
  SimParams sim;
  PrefConfig prefs;
  TrainConfig train;
  SimilarityWeights similarity;
  int top_k = 5;
  EvalConfig eval;
};

/// Throws ValidationError on unknown keys, wrong types or out-of-range values.
LabConfig config_from_json(const Json& j);
Json config_to_json(const LabConfig& c);
LabConfig load_config(const std::string& text);

/// Hash over the canonical JSON of the config.
std::string config_hash(const LabConfig& c);

}  // namespace trajlab
