#include "trajlab/harness/config.hpp"

#include <set>

#include "trajlab/common.hpp"
#include "trajlab/io.hpp"

namespace trajlab {
namespace {

// Reads an object section, rejecting keys outside `allowed`.
class Section {
 public:
  Section(const Json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config: " + path_ + " must be an object");
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) throw ValidationError("config: unknown key " + path_ + "." + key);
  }

  template <typename T>
  void read(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception&) {
      throw ValidationError("config: wrong type for " + path_ + "." + key);
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const { return j_.at(key); }
  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("config: " + what);
}

}  // namespace

LabConfig config_from_json(const Json& j) {
  LabConfig c;
  const Section root(j, "config", {"suite", "sim", "prefs", "train", "similarity", "top_k", "eval"});
  if (root.has("suite")) {
    const Section s(root.at("suite"), "suite",
                    {"train_scenes", "test_scenes", "tasks_per_scene", "kitchen_pool", "livingroom_pool",
                     "horizon_per_subtask"});
    s.read("train_scenes", c.suite.train_scenes);
    s.read("test_scenes", c.suite.test_scenes);
    s.read("tasks_per_scene", c.suite.tasks_per_scene);
    s.read("kitchen_pool", c.suite.kitchen_pool);
    s.read("livingroom_pool", c.suite.livingroom_pool);
    s.read("horizon_per_subtask", c.suite.horizon_per_subtask);
  }
  if (root.has("sim")) {
    const Section s(root.at("sim"), "sim", {"view_range", "interaction_range"});
    s.read("view_range", c.sim.view_range);
    s.read("interaction_range", c.sim.interaction_range);
  }
  if (root.has("prefs")) {
    const Section s(root.at("prefs"), "prefs", {"k", "trials"});
    s.read("k", c.prefs.k);
    s.read("trials", c.prefs.trials);
  }
  if (root.has("train")) {
    const Section s(root.at("train"), "train", {"epochs", "lr", "batch", "val_frac", "hidden"});
    s.read("epochs", c.train.epochs);
    s.read("lr", c.train.lr);
    s.read("batch", c.train.batch);
    s.read("val_frac", c.train.val_frac);
    s.read("hidden", c.train.hidden);
  }
  if (root.has("similarity")) {
    const Section s(root.at("similarity"), "similarity", {"w_text", "w_vis"});
    s.read("w_text", c.similarity.text);
    s.read("w_vis", c.similarity.vis);
  }
  root.read("top_k", c.top_k);
  if (root.has("eval")) {
    const Section s(root.at("eval"), "eval", {"repeats", "correlation_candidates", "correlation_trials"});
    s.read("repeats", c.eval.repeats);
    s.read("correlation_candidates", c.eval.correlation_candidates);
    s.read("correlation_trials", c.eval.correlation_trials);
  }

  for (int n : c.suite.train_scenes) require(n >= 0, "suite.train_scenes entries must be >= 0");
  for (int n : c.suite.test_scenes) require(n >= 0, "suite.test_scenes entries must be >= 0");
  require(c.suite.tasks_per_scene >= 1, "suite.tasks_per_scene must be >= 1");
  require(c.suite.kitchen_pool >= 1 && c.suite.livingroom_pool >= 1, "signature pools must be nonempty");
  require(c.suite.horizon_per_subtask >= 1, "suite.horizon_per_subtask must be >= 1");
  require(c.sim.view_range >= 1 && c.sim.interaction_range >= 1, "sim ranges must be >= 1");
  require(c.prefs.k >= 1 && c.prefs.trials >= 1, "prefs.k and prefs.trials must be >= 1");
  require(c.train.epochs >= 1 && c.train.batch >= 1 && c.train.lr > 0 && c.train.hidden >= 1,
          "train epochs, batch, lr and hidden must be positive");
  require(c.train.val_frac >= 0 && c.train.val_frac < 1, "train.val_frac must be in [0, 1)");
  require(c.similarity.text >= 0 && c.similarity.vis >= 0 &&
              std::abs(c.similarity.text + c.similarity.vis - 1.0) < 1e-9,
          "similarity weights must be nonnegative and sum to 1");
  require(c.top_k >= 1, "top_k must be >= 1");
  require(c.eval.repeats >= 1 && c.eval.correlation_candidates >= 1 && c.eval.correlation_trials >= 1,
          "eval counts must be >= 1");
  return c;
}

Json config_to_json(const LabConfig& c) {
  return Json{{"suite",
               {{"train_scenes", c.suite.train_scenes},
                {"test_scenes", c.suite.test_scenes},
                {"tasks_per_scene", c.suite.tasks_per_scene},
                {"kitchen_pool", c.suite.kitchen_pool},
                {"livingroom_pool", c.suite.livingroom_pool},
                {"horizon_per_subtask", c.suite.horizon_per_subtask}}},
              {"sim", {{"view_range", c.sim.view_range}, {"interaction_range", c.sim.interaction_range}}},
              {"prefs", {{"k", c.prefs.k}, {"trials", c.prefs.trials}}},
              {"train",
               {{"epochs", c.train.epochs},
                {"lr", c.train.lr},
                {"batch", c.train.batch},
                {"val_frac", c.train.val_frac},
                {"hidden", c.train.hidden}}},
              {"similarity", {{"w_text", c.similarity.text}, {"w_vis", c.similarity.vis}}},
              {"top_k", c.top_k},
              {"eval",
               {{"repeats", c.eval.repeats},
                {"correlation_candidates", c.eval.correlation_candidates},
                {"correlation_trials", c.eval.correlation_trials}}}};
}

LabConfig load_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const LabConfig& c) { return content_hash(config_to_json(c).dump()); }

}  // namespace trajlab
