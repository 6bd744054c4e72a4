#pragma once

#include <cstdint>
#include <vector>

#include "trajlab/memory/trajectory.hpp"
#include "trajlab/sim/world.hpp"

namespace trajlab {

/// One navigation leg of an expert plan, kept so tests can compare its
/// length with an independent shortest-path search.
struct NavSegment {
  Pose start;
  int start_step = 0;  // actions taken before the leg
  int object_id = 0;
  bool sight_only = false;  // goal is any pose that sees the object, not only adjacent ones
  int length = 0;           // moves + turns
};

struct ExpertPlan {
  Trajectory trajectory;
  std::vector<NavSegment> segments;
};

/// Full-knowledge expert. Navigation legs are shortest paths over the true
/// grid; interactions follow the subtask templates. Throws PlanFailure when a
/// required object is unreachable or a scripted action fails.
ExpertPlan plan_expert_detailed(const Scene& scene, const Task& task, std::uint64_t episode_seed,
                                SimParams params = {});

/// Same expert from an explicit start pose instead of a seeded reset.
ExpertPlan plan_expert_from(const Scene& scene, const Task& task, const Pose& start, SimParams params = {});

inline Trajectory plan_expert(const Scene& scene, const Task& task, std::uint64_t episode_seed,
                              SimParams params = {}) {
  return plan_expert_detailed(scene, task, episode_seed, params).trajectory;
}

}  // namespace trajlab
