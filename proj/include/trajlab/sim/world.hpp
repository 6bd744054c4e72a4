#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trajlab/sim/scene.hpp"
#include "trajlab/sim/task.hpp"

namespace trajlab {

struct SimParams {
  int view_range = 5;         // Euclidean, cells
  int interaction_range = 1;  // Chebyshev, cells
};

/// Mutable state of one episode over an immutable scene.
struct WorldState {
  const Scene* scene = nullptr;
  std::vector<ObjectInstance> objects;  // index = id - 1
  Pose pose;
  std::set<int> declared;
  bool declare_allowed = false;
  SimParams params;

  const ObjectInstance* find(int id) const {
    return id >= 1 && id <= static_cast<int>(objects.size()) ? &objects[id - 1] : nullptr;
  }
  ObjectInstance* find(int id) {
    return id >= 1 && id <= static_cast<int>(objects.size()) ? &objects[id - 1] : nullptr;
  }
  bool walkable(Cell c) const;

  Json to_json() const;
};

/// True iff some ancestor of `obj` is a closed container.
bool hidden_in_closed(const WorldState& w, const ObjectInstance& obj);

/// Line of sight between cell centres; intermediate cells must not be walls.
bool line_of_sight(const Scene& scene, Cell from, Cell to);

/// Inside the 90 degree cone of `pose` and within `range` (Euclidean).
bool in_view_cone(const Pose& pose, Cell target, int range);

/// FOV cone, range, line of sight, closed-container occlusion and
/// pitch/elevation band. Held objects are never visible.
bool is_visible(const WorldState& w, const ObjectInstance& obj);

std::vector<VisibleObject> visible_objects(const WorldState& w);
std::vector<ViewCell> view_cells(const WorldState& w);
std::string listing(const std::vector<VisibleObject>& visible);
Observation observe(const WorldState& w, std::string feedback_head);

/// Pure function of the world state; true iff every conjunct holds for one
/// instance of the subject type. Missing types yield false.
bool check_goal(const WorldState& w, const GoalPredicate& goal);

/// Single-threaded environment instance. Owns its state; all randomness
/// comes from the episode seed passed to reset.
class Env {
 public:
  explicit Env(const Scene& scene, SimParams params = {});

  /// Restores the initial objects and draws a uniform start pose from
  /// `episode_seed`. Starts that already satisfy the first subtask goal are
  /// redrawn. Throws ValidationError when the scene has no walkable cell.
  Observation reset(const Task& task, std::uint64_t episode_seed);

  /// Applies one action. Failed actions leave the state unchanged.
  Observation step(const Action& action);

  /// Reset to an explicit pose (tests and scripted fixtures).
  Observation reset_at(const Task& task, const Pose& pose);

  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }
  bool active() const { return active_; }
  const Scene& scene() const { return *scene_; }

 private:
  std::optional<std::string> apply(const Action& a);
  void apply_physics(std::string& extra);

  const Scene* scene_;
  WorldState state_;
  bool active_ = false;
};

}  // namespace trajlab
