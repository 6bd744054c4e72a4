#pragma once

#include <map>
#include <string>
#include <vector>

#include "trajlab/common.hpp"
#include "trajlab/harness/harness.hpp"
#include "trajlab/prefgen/prefgen.hpp"

namespace trajlab::testing {

/// Closed rectangular room of `inner_w` x `inner_h` floor cells; objects
/// are placed by the caller.
inline Scene empty_room(const std::string& id, int inner_w, int inner_h) {
  Scene s;
  s.scene_id = id;
  s.width = inner_w + 2;
  s.height = inner_h + 2;
  for (int y = 0; y < s.height; ++y) {
    std::string row(s.width, '.');
    if (y == 0 || y == s.height - 1) row.assign(s.width, '#');
    row.front() = row.back() = '#';
    s.grid.push_back(row);
  }
  return s;
}

inline int add_object(Scene& s, ObjType type, Cell pos) {
  const int id = static_cast<int>(s.objects.size()) + 1;
  s.objects.push_back(make_object(id, type, pos));
  return id;
}

/// Small object resting on / inside `parent`, inheriting its cell and elevation.
inline int add_child(Scene& s, ObjType type, int parent, bool inside) {
  const auto& p = s.objects[parent - 1];
  const int id = add_object(s, type, p.position);
  auto& o = s.objects.back();
  o.elevation = p.elevation;
  o.relation = inside ? Relation::in(parent) : Relation::on(parent);
  return id;
}

/// Default-config suites and memories at seed 42, built once per process.
struct Lab {
  LabConfig config;
  std::uint64_t seed = 42;
  Suite train, test;
  MemoryStore train_memory, test_memory;
};

inline const Lab& default_lab() {
  static const Lab lab = [] {
    Lab l;
    l.train = build_suite(Split::Train, l.config.suite, l.seed);
    l.test = build_suite(Split::Test, l.config.suite, l.seed);
    l.train_memory = collect_memory(l.train.tasks, l.train.scenes, Split::Train, l.seed, l.config.sim);
    l.test_memory = collect_memory(l.test.tasks, l.test.scenes, Split::Test, l.seed, l.config.sim);
    return l;
  }();
  return lab;
}

inline const std::vector<PreferencePair>& default_prefs() {
  static const std::vector<PreferencePair> prefs = [] {
    const Lab& l = default_lab();
    return generate_preferences(l.train.tasks, l.train.scenes, l.train_memory, l.config.prefs, l.seed, 1,
                                l.config.sim);
  }();
  return prefs;
}

}  // namespace trajlab::testing

namespace trajlab::testing {

/// Abstract and raw retrievers trained on the default preference dataset.
struct TrainedModels {
  ScorerModel trained, trained_raw;
  YesNoModel yesno;
  TrainReport report;
  Models view() const { return {&trained, &trained_raw, &yesno}; }
};

inline const TrainedModels& default_models() {
  static const TrainedModels m = [] {
    const Lab& l = default_lab();
    const auto tasks = task_index(l.train.tasks);
    TrainConfig tc = l.config.train;
    tc.seed = l.seed;
    TrainedModels out;
    auto main = train_retriever(feature_pairs(default_prefs(), tasks), tc);
    out.trained = std::move(main.model);
    out.report = std::move(main.report);
    out.trained_raw = train_retriever(feature_pairs(default_prefs(), tasks, &l.train_memory), tc).model;
    out.yesno = YesNoModel::random(fv::kDim, tc.hidden, kYesNoSeed);
    return out;
  }();
  return m;
}

}  // namespace trajlab::testing
