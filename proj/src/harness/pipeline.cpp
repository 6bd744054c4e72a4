#include "trajlab/harness/pipeline.hpp"

#include <algorithm>

#include "trajlab/common.hpp"
#include "trajlab/io.hpp"

namespace trajlab {
namespace fs = std::filesystem;
namespace {

constexpr const char* kSuiteTrain = "suite_train.json";
constexpr const char* kSuiteTest = "suite_test.json";
constexpr const char* kMemoryTrain = "memory_train.jsonl";
constexpr const char* kMemoryTest = "memory_test.jsonl";
constexpr const char* kPrefs = "prefs.jsonl";
constexpr const char* kCheckpoint = "checkpoint.json";
constexpr const char* kCheckpointRaw = "checkpoint_raw.json";
constexpr const char* kTrainReport = "train_report.json";
constexpr const char* kCorrelationCsv = "correlation.csv";
constexpr const char* kCorrelationJson = "correlation.json";

std::string suite_file(Split s) { return s == Split::Train ? kSuiteTrain : kSuiteTest; }
std::string memory_file(Split s) { return s == Split::Train ? kMemoryTrain : kMemoryTest; }

std::string method_slug(Method m) {
  std::string s(to_string(m));
  for (auto& c : s)
    if (c == '/' || c == '+') c = '-';
  return s;
}

std::string eval_file(Method m, Split s, const char* ext) {
  return "eval_" + std::string(to_string(s)) + "_" + method_slug(m) + ext;
}

// Records what a stage read and wrote.
class Manifest {
 public:
  Manifest(const StageContext& ctx, std::string stage) : ctx_(ctx), stage_(std::move(stage)) {}

  void input(const std::string& file) { inputs_[file] = file_hash(ctx_.workdir / file); }
  void output(const std::string& file, const std::string& text) {
    write_text(ctx_.workdir / file, text);
    outputs_[file] = content_hash(text);
  }
  void option(const std::string& key, Json value) { options_[key] = std::move(value); }

  void write() const {
    const Json j{{"stage", stage_},     {"config_hash", config_hash(ctx_.config)},
                 {"seed", ctx_.seed},   {"options", options_},
                 {"inputs", inputs_},   {"outputs", outputs_}};
    write_text(ctx_.workdir / (stage_ + ".manifest.json"), j.dump(2) + "\n");
  }

 private:
  const StageContext& ctx_;
  std::string stage_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
  Json options_ = Json::object();
};

// Reads `file` after checking that `producer` wrote it under the current
// config and seed and that it has not changed since.
std::string checked_input(const StageContext& ctx, const std::string& producer, const std::string& file,
                          Manifest& reader) {
  const fs::path mpath = ctx.workdir / (producer + ".manifest.json");
  if (!fs::exists(mpath))
    throw StageInputError(producer, "missing " + file + "; run `" + producer + "` first");
  Json m;
  try {
    m = Json::parse(read_text(mpath));
  } catch (const Json::exception&) {
    throw StageInputError(producer, "unreadable manifest " + mpath.string() + "; rerun `" + producer + "`");
  }
  if (m.value("config_hash", std::string()) != config_hash(ctx.config))
    throw StageInputError(producer, file + " was produced under a different config; rerun `" + producer + "`");
  if (m.value("seed", std::uint64_t{0}) != ctx.seed)
    throw StageInputError(producer, file + " was produced with a different seed; rerun `" + producer + "`");
  if (!m.contains("outputs") || !m["outputs"].contains(file))
    throw StageInputError(producer, "manifest of `" + producer + "` does not list " + file);
  const fs::path path = ctx.workdir / file;
  if (!fs::exists(path)) throw StageInputError(producer, "missing " + file + "; run `" + producer + "` first");
  const std::string text = read_text(path);
  if (content_hash(text) != m["outputs"][file].get<std::string>())
    throw StageInputError(producer, file + " changed since `" + producer + "` wrote it; rerun `" + producer + "`");
  reader.input(file);
  return text;
}

Suite read_suite(const StageContext& ctx, Split split, Manifest& reader) {
  const std::string text = checked_input(ctx, "gen-scenes", suite_file(split), reader);
  return suite_from_json(Json::parse(text));
}

MemoryStore read_store(const StageContext& ctx, Split split, Manifest& reader) {
  return from_jsonl(checked_input(ctx, "collect", memory_file(split), reader), split);
}

Json train_report_json(const TrainReport& r) {
  return Json{{"train_pairs", r.train_pairs},       {"val_pairs", r.val_pairs},
              {"val_tasks", r.val_tasks},           {"train_accuracy", r.train_accuracy},
              {"val_accuracy", r.val_accuracy},     {"final_loss", r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back()},
              {"epoch_loss", r.epoch_loss}};
}

TrainConfig train_config(const StageContext& ctx) {
  TrainConfig c = ctx.config.train;
  c.seed = ctx.seed;
  return c;
}

}  // namespace

Json suite_to_json(const Suite& s) {
  Json scenes = Json::array();
  for (const auto& [id, scene] : s.scenes) scenes.push_back(scene);
  return Json{{"split", to_string(s.split)}, {"scene_seeds", s.scene_seeds}, {"scenes", scenes}, {"tasks", s.tasks}};
}

Suite suite_from_json(const Json& j) {
  try {
    Suite s;
    s.split = parse_split(j.at("split").get<std::string>());
    s.scene_seeds = j.at("scene_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& sj : j.at("scenes")) {
      Scene scene = sj.get<Scene>();
      const std::string id = scene.scene_id;
      s.scenes.emplace(id, std::move(scene));
    }
    s.tasks = j.at("tasks").get<std::vector<Task>>();
    return s;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed suite: ") + e.what());
  }
}

void stage_gen_scenes(const StageContext& ctx) {
  Manifest m(ctx, "gen-scenes");
  for (Split split : {Split::Train, Split::Test}) {
    const Suite s = build_suite(split, ctx.config.suite, ctx.seed);
    m.output(suite_file(split), suite_to_json(s).dump() + "\n");
  }
  m.write();
}

void stage_collect(const StageContext& ctx) {
  Manifest m(ctx, "collect");
  for (Split split : {Split::Train, Split::Test}) {
    const Suite s = read_suite(ctx, split, m);
    const MemoryStore store = collect_memory(s.tasks, s.scenes, split, ctx.seed, ctx.config.sim, ctx.jobs);
    m.output(memory_file(split), to_jsonl(store));
  }
  m.write();
}

void stage_gen_prefs(const StageContext& ctx) {
  Manifest m(ctx, "gen-prefs");
  PrefConfig pc = ctx.config.prefs;
  if (ctx.k) pc.k = *ctx.k;
  if (ctx.trials) pc.trials = *ctx.trials;
  if (pc.k < 1 || pc.trials < 1) throw ValidationError("gen-prefs: --k and --trials must be >= 1");
  m.option("k", pc.k);
  m.option("trials", pc.trials);
  const Suite s = read_suite(ctx, Split::Train, m);
  const MemoryStore store = read_store(ctx, Split::Train, m);
  const auto prefs = generate_preferences(s.tasks, s.scenes, store, pc, ctx.seed, ctx.jobs, ctx.config.sim);
  m.output(kPrefs, prefs_to_jsonl(prefs));
  m.write();
}

void stage_train(const StageContext& ctx) {
  Manifest m(ctx, "train");
  const Suite s = read_suite(ctx, Split::Train, m);
  const MemoryStore store = read_store(ctx, Split::Train, m);
  const auto prefs = prefs_from_jsonl(checked_input(ctx, "gen-prefs", kPrefs, m));
  const auto tasks = task_index(s.tasks);
  const TrainConfig tc = train_config(ctx);
  const auto main = train_retriever(feature_pairs(prefs, tasks), tc);
  const auto raw = train_retriever(feature_pairs(prefs, tasks, &store), tc);
  m.output(kCheckpoint, checkpoint_text(main.model));
  m.output(kCheckpointRaw, checkpoint_text(raw.model));
  const Json report{{"abstract", train_report_json(main.report)}, {"raw", train_report_json(raw.report)}};
  m.output(kTrainReport, report.dump(2) + "\n");
  m.write();
}

std::vector<EvalReport> stage_eval(const StageContext& ctx, const std::vector<Method>& methods, Split split) {
  std::vector<Method> todo = methods;
  if (todo.empty()) todo.assign(std::begin(kAllMethods), std::end(kAllMethods));
  Manifest m(ctx, "eval-" + std::string(to_string(split)));
  const Suite s = read_suite(ctx, split, m);
  const MemoryStore store = read_store(ctx, split, m);

  const bool want_main = std::any_of(todo.begin(), todo.end(), needs_checkpoint);
  const bool want_raw = std::any_of(todo.begin(), todo.end(), needs_raw_checkpoint);
  std::optional<ScorerModel> main, raw;
  if (want_main) main = parse_checkpoint(checked_input(ctx, "train", kCheckpoint, m));
  if (want_raw) raw = parse_checkpoint(checked_input(ctx, "train", kCheckpointRaw, m));
  const YesNoModel yesno = YesNoModel::random(fv::kDim, ctx.config.train.hidden, kYesNoSeed);
  const Models models{main ? &*main : nullptr, raw ? &*raw : nullptr, &yesno};

  std::vector<EvalReport> out;
  for (Method method : todo) {
    EvalReport r = evaluate(method, s.tasks, s.scenes, store, models, ctx.config, ctx.seed, ctx.jobs);
    m.output(eval_file(method, split, ".json"), report_to_json(r).dump(2) + "\n");
    m.output(eval_file(method, split, ".txt"), report_table({r}));
    out.push_back(std::move(r));
  }
  std::string names;
  for (Method method : todo) names += (names.empty() ? "" : ",") + std::string(to_string(method));
  m.option("methods", names);
  m.write();
  return out;
}

CorrelationResult stage_correlate(const StageContext& ctx) {
  Manifest m(ctx, "correlate");
  const Suite s = read_suite(ctx, Split::Test, m);
  const MemoryStore store = read_store(ctx, Split::Test, m);
  const ScorerModel model = parse_checkpoint(checked_input(ctx, "train", kCheckpoint, m));
  auto r = correlation_study(s.tasks, s.scenes, store, model, ctx.config, ctx.seed, ctx.jobs);
  m.output(kCorrelationCsv, correlation_csv(r));
  m.output(kCorrelationJson, correlation_summary(r).dump(2) + "\n");
  m.write();
  return r;
}

std::string stage_report(const StageContext& ctx) {
  Manifest m(ctx, "report");
  std::vector<EvalReport> reports;
  Json summary = Json::array();
  for (Split split : {Split::Test, Split::Train})
    for (Method method : kAllMethods) {
      const std::string file = eval_file(method, split, ".json");
      if (!fs::exists(ctx.workdir / file)) continue;
      const Json j = Json::parse(read_text(ctx.workdir / file));
      m.input(file);
      if (j.at("config_hash").get<std::string>() != config_hash(ctx.config) ||
          j.at("seed").get<std::uint64_t>() != ctx.seed)
        throw StageInputError("eval", file + " is stale; rerun `eval`");
      EvalReport r;
      r.method = std::string(to_string(split)) + ":" + j.at("method").get<std::string>();
      r.sr = j.at("SR").get<double>();
      r.as = j.at("AS").get<double>();
      r.sr_sub = j.at("SR_Sub").get<double>();
      r.as_sub = j.at("AS_Sub").get<double>();
      r.records.resize(j.at("records").size());
      summary.push_back(Json{{"split", to_string(split)}, {"method", j.at("method")}, {"SR", r.sr},
                             {"AS", r.as}, {"SR_Sub", r.sr_sub}, {"AS_Sub", r.as_sub},
                             {"episodes", r.records.size()}});
      reports.push_back(std::move(r));
    }
  if (reports.empty()) throw StageInputError("eval", "no eval reports in workdir; run `eval` first");
  std::string table = report_table(reports);
  if (fs::exists(ctx.workdir / kCorrelationJson)) {
    const Json c = Json::parse(read_text(ctx.workdir / kCorrelationJson));
    m.input(kCorrelationJson);
    const auto fmt = [](const Json& v) { return v.is_null() ? std::string("undefined") : v.dump(); };
    table += "\ncorrelation with measured SR over " + c.at("pairs").dump() +
             " pairs: similarity r = " + fmt(c.at("r_similarity")) + ", trained r = " + fmt(c.at("r_trained")) + "\n";
  }
  m.output("report.txt", table);
  m.output("report.json", Json{{"config_hash", config_hash(ctx.config)}, {"seed", ctx.seed}, {"methods", summary}}
                              .dump(2) + "\n");
  m.write();
  return table;
}

void run_pipeline(const StageContext& ctx) {
  stage_gen_scenes(ctx);
  stage_collect(ctx);
  stage_gen_prefs(ctx);
  stage_train(ctx);
  stage_eval(ctx, {}, Split::Test);
  stage_correlate(ctx);
  stage_report(ctx);
}

}  // namespace trajlab
