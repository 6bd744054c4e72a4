#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajlab/sim/scene.hpp"

namespace trajlab {

enum class TaskFamily : std::uint8_t {
  Goto,
  AnswerWhere,
  PickAndPlace,
  PickCleanThenPlace,
  PickCoolThenPlace,
  PickHeatThenPlace,
};
inline constexpr int kNumFamilies = 6;

std::string_view to_string(TaskFamily f);
TaskFamily parse_family(std::string_view s);

/// One conjunct over a single object instance (the existential subject).
enum class Condition : std::uint8_t { Near, Held, Hot, Cold, Clean, Placed, Declared };

std::string_view to_string(Condition c);
Condition parse_condition(std::string_view s);

/// Satisfied iff some instance of `subject` meets every condition.
/// `Placed` requires the instance's parent to be of `receptacle` type.
struct GoalPredicate {
  ObjType subject = ObjType::Cup;
  std::vector<Condition> conditions;
  std::optional<ObjType> receptacle;
  friend bool operator==(const GoalPredicate&, const GoalPredicate&) = default;
};

/// What the agent has to do to finish the subtask; drives both the expert
/// planner and the scripted policy.
enum class SubTaskKind : std::uint8_t { Navigate, LocateAndDeclare, FindAndPick, Heat, Cool, Clean, Place };

std::string_view to_string(SubTaskKind k);
SubTaskKind parse_subtask_kind(std::string_view s);

struct SubTask {
  SubTaskKind kind = SubTaskKind::Navigate;
  std::string description;
  GoalPredicate goal;
  friend bool operator==(const SubTask&, const SubTask&) = default;
};

struct Task {
  std::string task_id;
  TaskFamily family = TaskFamily::Goto;
  std::string instruction;
  ObjType target_type = ObjType::Cup;
  std::optional<ObjType> receptacle_type;
  std::string scene_id;
  int horizon_per_subtask = 50;
  std::vector<SubTask> subtasks;

  int total_horizon() const { return horizon_per_subtask * static_cast<int>(subtasks.size()); }
  friend bool operator==(const Task&, const Task&) = default;
};

/// Fixed template table; instructions are regenerable from the signature.
std::string make_instruction(TaskFamily f, ObjType target, std::optional<ObjType> receptacle);

/// Template decomposition with one-step fragments already merged into
/// their neighbours.
std::vector<SubTask> decompose(TaskFamily f, ObjType target, std::optional<ObjType> receptacle);
inline std::vector<SubTask> decompose(const Task& t) {
  return decompose(t.family, t.target_type, t.receptacle_type);
}

Task make_task(std::string task_id, TaskFamily f, ObjType target,
               std::optional<ObjType> receptacle, std::string scene_id,
               int horizon_per_subtask = 50);

/// (family, target, receptacle) key shared by instructions.
struct TaskSignature {
  TaskFamily family;
  ObjType target;
  std::optional<ObjType> receptacle;
  friend auto operator<=>(const TaskSignature&, const TaskSignature&) = default;
};

inline TaskSignature signature_of(const Task& t) {
  return {t.family, t.target_type, t.receptacle_type};
}

/// True when the signature can be posed in the scene: all named types exist,
/// and no target instance already rests on/in the receptacle type.
bool signature_solvable(const Scene& scene, const TaskSignature& sig);

/// Candidate signature pool for an archetype class (kitchens share one pool,
/// living rooms another), drawn from `seed`.
std::vector<TaskSignature> signature_pool(bool kitchen, int size, std::uint64_t seed);

/// Draws `count` distinct solvable signatures from `pool` for the scene.
std::vector<Task> generate_tasks(const Scene& scene, const std::vector<TaskSignature>& pool,
                                 int count, std::string_view id_prefix, std::uint64_t seed,
                                 int horizon_per_subtask = 50);

void to_json(Json& j, const GoalPredicate& g);
void from_json(const Json& j, GoalPredicate& g);
void to_json(Json& j, const SubTask& s);
void from_json(const Json& j, SubTask& s);
void to_json(Json& j, const Task& t);
void from_json(const Json& j, Task& t);

}  // namespace trajlab
