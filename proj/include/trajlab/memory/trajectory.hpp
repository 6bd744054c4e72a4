#pragma once

#include <string>
#include <vector>

#include "trajlab/sim/task.hpp"
#include "trajlab/sim/types.hpp"

namespace trajlab {

enum class Split : std::uint8_t { Train, Test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

/// One recorded episode. observations[0] and feedbacks[0] come from reset;
/// action i produces observations[i + 1] and feedbacks[i + 1].
struct Trajectory {
  std::string traj_id;
  Task task;
  std::vector<Observation> observations;
  std::vector<Action> actions;
  std::vector<std::string> feedbacks;
  int steps = 0;
  bool success = false;
  Split split = Split::Train;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Throws ValidationError when the sequence lengths are inconsistent.
void validate(const Trajectory& t);

/// Step index at which each subtask goal of `t.task` first holds, evaluated
/// from the recorded observations, actions and feedback alone (no scene
/// needed). Unreached subtasks are reported as -1.
std::vector<int> subtask_completion_steps(const Trajectory& t);

void to_json(Json& j, const Trajectory& t);
void from_json(const Json& j, Trajectory& t);

}  // namespace trajlab
