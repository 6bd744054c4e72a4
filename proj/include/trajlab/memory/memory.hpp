#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "trajlab/memory/trajectory.hpp"
#include "trajlab/sim/scene.hpp"
#include "trajlab/sim/world.hpp"

namespace trajlab {

struct Provenance {
  std::vector<std::uint64_t> scene_seeds;
  std::string config_hash;
};

/// Expert trajectories of one split, keyed and ordered by traj_id.
/// Immutable once built; concurrent readers are fine.
struct MemoryStore {
  Split split = Split::Train;
  std::map<std::string, Trajectory> trajectories;
  Provenance provenance;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  const Trajectory* find(const std::string& id) const {
    const auto it = trajectories.find(id);
    return it == trajectories.end() ? nullptr : &it->second;
  }
  std::vector<const Trajectory*> list() const;
};

using SceneIndex = std::map<std::string, Scene>;

/// One expert trajectory per task, then redundancy filtering. Episode seeds
/// derive from `master_seed` and the task id, so `jobs` does not change the
/// result. PlanFailure propagates with the offending task id.
MemoryStore collect_memory(const std::vector<Task>& tasks, const SceneIndex& scenes, Split split,
                           std::uint64_t master_seed, SimParams params = {}, int jobs = 1);

/// Redundancy key: (family, target, receptacle, scene archetype).
std::string redundancy_key(const Trajectory& t);

/// Keeps the shortest trajectory per redundancy key (ties: smaller traj_id).
MemoryStore filter_redundant(const MemoryStore& store);

std::string to_jsonl(const MemoryStore& store);
MemoryStore from_jsonl(const std::string& text, Split split);

void write_memory(const std::filesystem::path& path, const MemoryStore& store);
MemoryStore read_memory(const std::filesystem::path& path, Split split);

/// FNV-1a over the JSONL serialization.
std::string store_hash(const MemoryStore& store);

}  // namespace trajlab
