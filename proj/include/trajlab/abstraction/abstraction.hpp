#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajlab/memory/trajectory.hpp"

namespace trajlab {

/// Why a step was kept. A step may carry several triggers.
enum class Trigger : std::uint8_t {
  Start = 1 << 0,        // step 0
  Interaction = 1 << 1,  // PickUp/Put/Open/Close/Toggle*/Declare
  Goal = 1 << 2,         // a subtask goal of the source task first holds
  TargetSeen = 1 << 3,   // the current task's target first appears
  Notable = 1 << 4,      // feedback carries more than "OK." and the listing
};

constexpr std::uint8_t operator|(Trigger a, Trigger b) {
  return static_cast<std::uint8_t>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
inline bool has(std::uint8_t mask, Trigger t) { return (mask & static_cast<std::uint8_t>(t)) != 0; }

struct Milestone {
  int step_index = 0;
  std::uint8_t triggers = 0;
  std::string description;
  Observation observation;
  std::string feedback;
  std::optional<Action> action;             // the action that produced this step
  std::optional<ObjType> action_object;     // type of the action's object, when known
  std::string overarching_actions;          // summary of the actions up to the next milestone
  friend bool operator==(const Milestone&, const Milestone&) = default;
};

struct AbstractTrajectory {
  std::string source_traj_id;
  std::string source_scene_id;
  std::string source_instruction;
  std::string conditioning_task_id;
  bool raw = false;  // every step kept (abstraction disabled)
  std::vector<Milestone> milestones;
  friend bool operator==(const AbstractTrajectory&, const AbstractTrajectory&) = default;
};

/// Rule-based milestone selection conditioned on `current`. Step indices are
/// strictly increasing; every interaction step is kept.
AbstractTrajectory abstract_trajectory(const Trajectory& traj, const Task& current);

/// Abstraction disabled: the first `limit` steps are all kept, in order.
AbstractTrajectory raw_view(const Trajectory& traj, const Task& current, int limit = 64);

/// "navigate 6 cells, 2 turns, then PickUp(3)" style summary of actions[begin, end).
std::string summarize_actions(const std::vector<Action>& actions, std::size_t begin, std::size_t end);

void to_json(Json& j, const Milestone& m);
void from_json(const Json& j, Milestone& m);
void to_json(Json& j, const AbstractTrajectory& a);
void from_json(const Json& j, AbstractTrajectory& a);

}  // namespace trajlab
