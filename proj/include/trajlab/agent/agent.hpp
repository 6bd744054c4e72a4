#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trajlab/abstraction/abstraction.hpp"
#include "trajlab/planner/navigation.hpp"
#include "trajlab/sim/world.hpp"

namespace trajlab {

// ---------------------------------------------------------------- hints

struct Waypoint {
  Cell cell;
  int heading = 0;
  int pitch = 0;
  std::optional<ActionKind> interaction;  // interaction performed at this pose
  std::optional<ObjType> object;          // its object type
  std::vector<ObjType> seen_types;        // types visible from this pose, ascending
  int step_index = 0;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct ReferenceHints {
  std::vector<Waypoint> waypoints;     // milestone order
  std::vector<ObjType> object_hints;   // types acted upon, ascending, unique
  std::vector<ActionKind> skeleton;    // interaction kinds in order
  bool raw = false;                    // untagged, follow strictly in order
  std::map<Cell, char> layout;         // terrain recorded in the reference's views
  bool empty() const { return waypoints.empty(); }
};

ReferenceHints extract_hints(const AbstractTrajectory& abstract);

// ---------------------------------------------------------------- belief

enum class Knowledge : std::uint8_t { Unknown, Free, Wall };

struct SeenObject {
  ObjType type = ObjType::Cup;
  Cell cell;
  Relation relation;
  int pitch = 0;  // pitch at the last sighting
  int last_step = 0;
};

struct ReflectionNote {
  Pose pose;
  Action action;
  std::string reason;
  int epoch = 0;  // world-change epoch the note applies to
};

/// Navigation plan toward one goal set; `id` changes on every recompute.
struct NavPlan {
  int id = 0;
  std::string goal_key;
  std::vector<ActionKind> actions;
  std::size_t next = 0;
};

struct AgentBelief {
  int width = 0;
  int height = 0;
  std::vector<Knowledge> known_map;  // row-major
  std::map<int, SeenObject> seen_objects;
  std::vector<ReflectionNote> reflection_notes;
  int current_subtask_index = 0;

  // Bookkeeping of the agent's own actions.
  int step = 0;
  int epoch = 0;  // bumped on every successful interaction
  int consecutive_failures = 0;
  std::optional<int> held;
  std::optional<int> item;        // object the task is about once picked up
  std::set<int> opened;           // containers known to be open
  std::set<int> switched_on;      // toggleables known to be on
  std::map<int, int> put_into;    // object -> receptacle it was put into
  std::set<int> hot, cold, clean;
  std::set<int> unreachable;      // objects with no known path
  std::set<int> lost;             // expected at a pose but not seen there
  std::vector<bool> waypoint_done;
  std::shared_ptr<NavPlan> plan;
  int plans_made = 0;
  bool force_replan = false;
  bool reference_rejected = false;  // the reference's layout contradicted an observation
  int frontier_pitch = 30;
  std::optional<Cell> frontier_goal;
  std::map<int, std::set<int>> pitch_tries;  // object -> pitches tried at the current pose
  NavPose last_pose;

  AgentBelief() = default;
  AgentBelief(int w, int h);

  Knowledge at(Cell c) const;
  void mark(Cell c, Knowledge k);
  bool known_free(Cell c) const { return at(c) == Knowledge::Free; }
  bool passable(Cell c) const;  // free or optimistically unknown
  bool blacklisted(const Pose& pose, const Action& a) const;
};

/// Returns a note iff `feedback` reports a failure.
std::optional<ReflectionNote> self_reflection(const Action& prev_action, const Observation& prev_obs,
                                              const std::string& feedback);

/// Folds one observation (and the action that led to it) into the belief.
void update_belief(AgentBelief& b, const std::optional<Action>& prev_action, const Observation& obs,
                   const std::optional<ReflectionNote>& note);

/// The scripted policy. Never returns an action blacklisted at the current pose.
Action next_action(AgentBelief& belief, const Task& task, const ReferenceHints& hints,
                   const Observation& obs);

// ---------------------------------------------------------------- episodes

struct EpisodeResult {
  bool success = false;
  int steps = 0;      // actions taken; failed episodes report the full horizon
  int raw_steps = 0;  // actions actually taken
  std::vector<bool> subtask_successes;
  std::vector<int> subtask_steps;  // failed subtasks count the full budget
  Trajectory trajectory;
};

/// Runs the policy on a fresh episode. Each subtask gets its own step
/// budget; the episode ends at the first subtask that runs out of budget.
EpisodeResult execute_episode(const Scene& scene, const Task& task,
                              const AbstractTrajectory* reference, std::uint64_t episode_seed,
                              SimParams params = {});

void to_json(Json& j, const EpisodeResult& r);

}  // namespace trajlab
