#include "trajlab/memory/memory.hpp"

#include <sstream>

#include "trajlab/common.hpp"
#include "trajlab/io.hpp"
#include "trajlab/parallel.hpp"
#include "trajlab/planner/planner.hpp"

namespace trajlab {

std::vector<const Trajectory*> MemoryStore::list() const {
  std::vector<const Trajectory*> out;
  out.reserve(trajectories.size());
  for (const auto& [id, t] : trajectories) out.push_back(&t);
  return out;
}

MemoryStore collect_memory(const std::vector<Task>& tasks, const SceneIndex& scenes, Split split,
                           std::uint64_t master_seed, SimParams params, int jobs) {
  for (const auto& t : tasks)
    if (!scenes.count(t.scene_id))
      throw ValidationError("task " + t.task_id + " references unknown scene " + t.scene_id);
  auto trajs = parallel_map<Trajectory>(tasks.size(), jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto seed = derive_seed(master_seed, streams::kCollect, fnv1a(task.task_id));
    Trajectory t = plan_expert(scenes.at(task.scene_id), task, seed, params);
    t.split = split;
    return t;
  });
  MemoryStore store;
  store.split = split;
  for (auto& t : trajs) {
    const auto id = t.traj_id;
    if (!store.trajectories.emplace(id, std::move(t)).second)
      throw ValidationError("duplicate task id " + id);
  }
  for (const auto& [id, s] : scenes) store.provenance.scene_seeds.push_back(s.seed);
  return filter_redundant(store);
}

std::string redundancy_key(const Trajectory& t) {
  std::string key(to_string(t.task.family));
  key += "|" + std::string(to_string(t.task.target_type));
  key += "|" + (t.task.receptacle_type ? std::string(to_string(*t.task.receptacle_type)) : "-");
  key += "|" + std::string(to_string(archetype_of_scene_id(t.task.scene_id)));
  return key;
}

MemoryStore filter_redundant(const MemoryStore& store) {
  std::map<std::string, const Trajectory*> keep;
  for (const auto& [id, t] : store.trajectories) {  // ascending id, so ties keep the smaller
    auto& slot = keep[redundancy_key(t)];
    if (slot == nullptr || t.steps < slot->steps) slot = &t;
  }
  MemoryStore out;
  out.split = store.split;
  out.provenance = store.provenance;
  for (const auto& [key, t] : keep) out.trajectories.emplace(t->traj_id, *t);
  return out;
}

std::string to_jsonl(const MemoryStore& store) {
  std::string out;
  for (const auto& [id, t] : store.trajectories) {
    out += Json(t).dump();
    out += '\n';
  }
  return out;
}

MemoryStore from_jsonl(const std::string& text, Split split) {
  MemoryStore store;
  store.split = split;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Trajectory t;
    try {
      t = Json::parse(line).get<Trajectory>();
    } catch (const Json::exception& e) {
      throw ValidationError("memory line " + std::to_string(lineno) + ": " + e.what());
    }
    if (t.split != split)
      throw ValidationError("memory line " + std::to_string(lineno) + ": wrong split");
    const auto id = t.traj_id;
    store.trajectories.emplace(id, std::move(t));
  }
  return store;
}

void write_memory(const std::filesystem::path& path, const MemoryStore& store) {
  write_text(path, to_jsonl(store));
}

MemoryStore read_memory(const std::filesystem::path& path, Split split) {
  return from_jsonl(read_text(path), split);
}

std::string store_hash(const MemoryStore& store) { return content_hash(to_jsonl(store)); }

}  // namespace trajlab
