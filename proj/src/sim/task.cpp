#include "trajlab/sim/task.hpp"

#include <algorithm>
#include <array>

#include "trajlab/common.hpp"

namespace trajlab {

namespace {

constexpr std::array<std::string_view, kNumFamilies> kFamilyNames = {
    "goto",  "answer_where", "pick_and_place", "pick_clean_then_place",
    "pick_cool_then_place", "pick_heat_then_place"};

constexpr std::array<std::string_view, 7> kConditionNames = {
    "near", "held", "hot", "cold", "clean", "placed", "declared"};

constexpr std::array<std::string_view, 7> kSubTaskNames = {
    "navigate", "locate_and_declare", "find_and_pick", "heat", "cool", "clean", "place"};

const char* article(ObjType t) {
  const auto n = to_string(t);
  return (n[0] == 'A' || n[0] == 'E' || n[0] == 'I' || n[0] == 'O' || n[0] == 'U') ? "an" : "a";
}

std::string placement_word(ObjType receptacle) {
  return traits(receptacle).openable ? "in" : "on";
}

std::string name(ObjType t) { return std::string(to_string(t)); }

}  // namespace

std::string_view to_string(TaskFamily f) { return kFamilyNames[static_cast<int>(f)]; }

TaskFamily parse_family(std::string_view s) {
  for (int i = 0; i < kNumFamilies; ++i)
    if (kFamilyNames[i] == s) return static_cast<TaskFamily>(i);
  throw ValidationError("unknown task family: " + std::string(s));
}

std::string_view to_string(Condition c) { return kConditionNames[static_cast<int>(c)]; }

Condition parse_condition(std::string_view s) {
  for (std::size_t i = 0; i < kConditionNames.size(); ++i)
    if (kConditionNames[i] == s) return static_cast<Condition>(i);
  throw ValidationError("unknown goal condition: " + std::string(s));
}

std::string_view to_string(SubTaskKind k) { return kSubTaskNames[static_cast<int>(k)]; }

SubTaskKind parse_subtask_kind(std::string_view s) {
  for (std::size_t i = 0; i < kSubTaskNames.size(); ++i)
    if (kSubTaskNames[i] == s) return static_cast<SubTaskKind>(i);
  throw ValidationError("unknown subtask kind: " + std::string(s));
}

std::string make_instruction(TaskFamily f, ObjType target, std::optional<ObjType> receptacle) {
  const std::string t = name(target);
  const std::string r = receptacle ? name(*receptacle) : std::string();
  const std::string where = receptacle ? placement_word(*receptacle) : std::string();
  switch (f) {
    case TaskFamily::Goto: return "Come to the " + t + ".";
    case TaskFamily::AnswerWhere: return "Where is the " + t + "?";
    case TaskFamily::PickAndPlace:
      return std::string("Put ") + article(target) + " " + t + " " + where + " the " + r + ".";
    case TaskFamily::PickCleanThenPlace:
      return std::string("Clean ") + article(target) + " " + t + " and put it " + where + " the " + r + ".";
    case TaskFamily::PickCoolThenPlace:
      return std::string("Cool ") + article(target) + " " + t + " and put it " + where + " the " + r + ".";
    case TaskFamily::PickHeatThenPlace:
      return std::string("Heat ") + article(target) + " " + t + " and put it " + where + " the " + r + ".";
  }
  return {};
}

std::vector<SubTask> decompose(TaskFamily f, ObjType target, std::optional<ObjType> receptacle) {
  const std::string t = name(target);
  auto pick = [&] {
    return SubTask{SubTaskKind::FindAndPick, "Find and pick up " + std::string(article(target)) + " " + t + ".",
                   {target, {Condition::Held}, std::nullopt}};
  };
  auto place = [&](std::optional<Condition> state) {
    GoalPredicate g{target, {}, receptacle};
    if (state) g.conditions.push_back(*state);
    g.conditions.push_back(Condition::Placed);
    return SubTask{SubTaskKind::Place,
                   "Put the " + t + " " + placement_word(*receptacle) + " the " + name(*receptacle) + ".", g};
  };
  switch (f) {
    case TaskFamily::Goto:
      return {{SubTaskKind::Navigate, "Go to the " + t + ".", {target, {Condition::Near}, std::nullopt}}};
    case TaskFamily::AnswerWhere:
      return {{SubTaskKind::LocateAndDeclare, "Find the " + t + " and say where it is.",
               {target, {Condition::Declared}, std::nullopt}}};
    case TaskFamily::PickAndPlace:
      if (!receptacle) throw ValidationError("pick_and_place needs a receptacle");
      return {pick(), place(std::nullopt)};
    case TaskFamily::PickCleanThenPlace:
      if (!receptacle) throw ValidationError("pick_clean_then_place needs a receptacle");
      return {pick(),
              {SubTaskKind::Clean, "Clean the " + t + " in the Sink and take it out.",
               {target, {Condition::Clean, Condition::Held}, std::nullopt}},
              place(Condition::Clean)};
    case TaskFamily::PickCoolThenPlace:
      if (!receptacle) throw ValidationError("pick_cool_then_place needs a receptacle");
      return {pick(),
              {SubTaskKind::Cool, "Cool the " + t + " in the Fridge and take it out.",
               {target, {Condition::Cold, Condition::Held}, std::nullopt}},
              place(Condition::Cold)};
    case TaskFamily::PickHeatThenPlace:
      if (!receptacle) throw ValidationError("pick_heat_then_place needs a receptacle");
      return {pick(),
              {SubTaskKind::Heat, "Heat the " + t + " in the Microwave and take it out.",
               {target, {Condition::Hot, Condition::Held}, std::nullopt}},
              place(Condition::Hot)};
  }
  return {};
}

Task make_task(std::string task_id, TaskFamily f, ObjType target,
               std::optional<ObjType> receptacle, std::string scene_id, int horizon_per_subtask) {
  Task t;
  t.task_id = std::move(task_id);
  t.family = f;
  t.target_type = target;
  t.receptacle_type = receptacle;
  t.instruction = make_instruction(f, target, receptacle);
  t.scene_id = std::move(scene_id);
  t.horizon_per_subtask = horizon_per_subtask;
  t.subtasks = decompose(f, target, receptacle);
  return t;
}

bool signature_solvable(const Scene& scene, const TaskSignature& sig) {
  if (!scene.has_type(sig.target)) return false;
  switch (sig.family) {
    case TaskFamily::Goto:
    case TaskFamily::AnswerWhere: return true;
    case TaskFamily::PickCleanThenPlace:
      if (!scene.has_type(ObjType::Sink) || !scene.has_type(ObjType::Faucet)) return false;
      break;
    case TaskFamily::PickCoolThenPlace:
      if (!scene.has_type(ObjType::Fridge)) return false;
      for (const auto& o : scene.objects)
        if (o.type == sig.target && o.temperature == Temperature::Cold) return false;
      break;
    case TaskFamily::PickHeatThenPlace:
      if (!scene.has_type(ObjType::Microwave)) return false;
      break;
    case TaskFamily::PickAndPlace: break;
  }
  if (!sig.receptacle || !scene.has_type(*sig.receptacle)) return false;
  for (const auto& o : scene.objects) {
    if (o.type != sig.target || o.relation.kind == Relation::Kind::Floor) continue;
    if (scene.find(o.relation.parent)->type == *sig.receptacle) return false;
  }
  return true;
}

std::vector<TaskSignature> signature_pool(bool kitchen, int size, std::uint64_t seed) {
  std::vector<TaskSignature> all;
  if (kitchen) {
    const std::array<ObjType, 4> recs = {ObjType::CounterTop, ObjType::Table, ObjType::Shelf,
                                         ObjType::Cabinet};
    for (auto r : recs) {
      for (auto t : {ObjType::Cup, ObjType::Plate, ObjType::Potato, ObjType::Apple,
                     ObjType::DishSponge, ObjType::Knife})
        all.push_back({TaskFamily::PickAndPlace, t, r});
      for (auto t : {ObjType::Potato, ObjType::Apple, ObjType::Cup, ObjType::Plate}) {
        all.push_back({TaskFamily::PickHeatThenPlace, t, r});
        all.push_back({TaskFamily::PickCoolThenPlace, t, r});
      }
      for (auto t : {ObjType::Cup, ObjType::Plate, ObjType::DishSponge, ObjType::Knife})
        all.push_back({TaskFamily::PickCleanThenPlace, t, r});
    }
  } else {
    for (auto t : {ObjType::Person, ObjType::Sofa, ObjType::Table, ObjType::Shelf})
      all.push_back({TaskFamily::Goto, t, std::nullopt});
    for (auto t : {ObjType::Cup, ObjType::Apple, ObjType::Plate, ObjType::Knife,
                   ObjType::DishSponge, ObjType::Potato})
      all.push_back({TaskFamily::AnswerWhere, t, std::nullopt});
    for (auto r : {ObjType::Sofa, ObjType::Table, ObjType::Shelf})
      for (auto t : {ObjType::Cup, ObjType::Apple, ObjType::Plate})
        all.push_back({TaskFamily::PickAndPlace, t, r});
  }
  Rng rng(derive_seed(seed, streams::kTasks, kitchen ? 1 : 2));
  rng.shuffle(all);
  if (static_cast<int>(all.size()) > size) all.resize(size);
  return all;
}

std::vector<Task> generate_tasks(const Scene& scene, const std::vector<TaskSignature>& pool,
                                 int count, std::string_view id_prefix, std::uint64_t seed,
                                 int horizon_per_subtask) {
  auto order = pool;
  Rng rng(derive_seed(seed, streams::kTasks, fnv1a(scene.scene_id)));
  rng.shuffle(order);
  std::vector<Task> out;
  for (const auto& sig : order) {
    if (static_cast<int>(out.size()) == count) break;
    if (!signature_solvable(scene, sig)) continue;
    out.push_back(make_task(std::string(id_prefix) + "-t" + std::to_string(out.size()), sig.family,
                            sig.target, sig.receptacle, scene.scene_id, horizon_per_subtask));
  }
  return out;
}

void to_json(Json& j, const GoalPredicate& g) {
  Json conds = Json::array();
  for (auto c : g.conditions) conds.push_back(to_string(c));
  j = Json{{"subject", to_string(g.subject)}, {"conditions", conds}};
  j["receptacle"] = g.receptacle ? Json(to_string(*g.receptacle)) : Json(nullptr);
}

void from_json(const Json& j, GoalPredicate& g) {
  g.subject = parse_obj_type(j.at("subject").get<std::string>());
  g.conditions.clear();
  for (const auto& c : j.at("conditions")) g.conditions.push_back(parse_condition(c.get<std::string>()));
  const auto& r = j.at("receptacle");
  g.receptacle = r.is_null() ? std::nullopt : std::optional(parse_obj_type(r.get<std::string>()));
}

void to_json(Json& j, const SubTask& s) {
  j = Json{{"kind", to_string(s.kind)}, {"description", s.description}, {"goal", s.goal}};
}

void from_json(const Json& j, SubTask& s) {
  s.kind = parse_subtask_kind(j.at("kind").get<std::string>());
  s.description = j.at("description").get<std::string>();
  s.goal = j.at("goal").get<GoalPredicate>();
}

void to_json(Json& j, const Task& t) {
  j = Json{{"task_id", t.task_id},
           {"family", to_string(t.family)},
           {"instruction", t.instruction},
           {"target_type", to_string(t.target_type)}};
  j["receptacle_type"] = t.receptacle_type ? Json(to_string(*t.receptacle_type)) : Json(nullptr);
  j["scene_id"] = t.scene_id;
  j["horizon_per_subtask"] = t.horizon_per_subtask;
  j["subtasks"] = t.subtasks;
}

void from_json(const Json& j, Task& t) {
  t.task_id = j.at("task_id").get<std::string>();
  t.family = parse_family(j.at("family").get<std::string>());
  t.instruction = j.at("instruction").get<std::string>();
  t.target_type = parse_obj_type(j.at("target_type").get<std::string>());
  const auto& r = j.at("receptacle_type");
  t.receptacle_type = r.is_null() ? std::nullopt : std::optional(parse_obj_type(r.get<std::string>()));
  t.scene_id = j.at("scene_id").get<std::string>();
  t.horizon_per_subtask = j.at("horizon_per_subtask").get<int>();
  t.subtasks = j.at("subtasks").get<std::vector<SubTask>>();
  if (t.instruction != make_instruction(t.family, t.target_type, t.receptacle_type))
    throw ValidationError("task " + t.task_id + ": instruction does not match its template");
  if (t.subtasks.empty()) throw ValidationError("task " + t.task_id + ": no subtasks");
}

}  // namespace trajlab
