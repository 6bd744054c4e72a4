#include "trajlab/harness/harness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "trajlab/agent/agent.hpp"
#include "trajlab/common.hpp"
#include "trajlab/parallel.hpp"

namespace trajlab {
namespace {

constexpr std::uint64_t kSplitStride = 100000;

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Suite build_suite(Split split, const SuiteConfig& config, std::uint64_t master_seed) {
  Suite s;
  s.split = split;
  const auto& counts = split == Split::Train ? config.train_scenes : config.test_scenes;
  const std::uint64_t base = static_cast<std::uint64_t>(split) * kSplitStride;
  const auto kitchen_pool = signature_pool(true, config.kitchen_pool, derive_seed(master_seed, streams::kTasks, 1));
  const auto living_pool =
      signature_pool(false, config.livingroom_pool, derive_seed(master_seed, streams::kTasks, 2));
  for (int a = 0; a < kNumArchetypes; ++a)
    for (int i = 0; i < counts[a]; ++i) {
      const std::uint64_t index = base + static_cast<std::uint64_t>(a) * 1000 + static_cast<std::uint64_t>(i);
      const std::uint64_t seed = derive_seed(master_seed, streams::kScene, index);
      Scene scene = generate_scene(static_cast<Archetype>(a), seed);
      const auto& pool = is_kitchen(scene.archetype) ? kitchen_pool : living_pool;
      auto tasks = generate_tasks(scene, pool, config.tasks_per_scene, scene.scene_id,
                                  derive_seed(master_seed, streams::kTasks, 10 + index),
                                  config.horizon_per_subtask);
      for (auto& t : tasks) s.tasks.push_back(std::move(t));
      s.scene_seeds.push_back(seed);
      s.scenes.emplace(scene.scene_id, std::move(scene));
    }
  return s;
}

std::map<std::string, Task> task_index(const std::vector<Task>& tasks) {
  std::map<std::string, Task> out;
  for (const auto& t : tasks) out.emplace(t.task_id, t);
  return out;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::PA: return "PA";
    case Method::LP: return "LP";
    case Method::SL: return "SL";
    case Method::RapSim: return "RAP-sim";
    case Method::SimFtm: return "Sim+FTM";
    case Method::Mart: return "MART";
    case Method::MartNoAbstraction: return "MART-w/o-Abstraction";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  throw ValidationError("unknown method '" + std::string(s) +
                        "' (expected PA, LP, SL, RAP-sim, Sim+FTM, MART or MART-w/o-Abstraction)");
}

bool needs_checkpoint(Method m) { return m == Method::SimFtm || m == Method::Mart; }
bool needs_raw_checkpoint(Method m) { return m == Method::MartNoAbstraction; }

std::optional<Scorer> method_scorer(Method m, const Models& models, const LabConfig& config) {
  Scorer s;
  s.weights = config.similarity;
  s.k = config.top_k;
  s.model = models.trained;
  s.yesno = models.yesno;
  switch (m) {
    case Method::PA: return std::nullopt;
    case Method::LP: s.kind = ScorerKind::YesNo; break;
    case Method::SL:
      s.kind = ScorerKind::SimTopKThen;
      s.inner = ScorerKind::YesNo;
      break;
    case Method::RapSim: s.kind = ScorerKind::Similarity; break;
    case Method::SimFtm:
      s.kind = ScorerKind::SimTopKThen;
      s.inner = ScorerKind::Trained;
      break;
    case Method::Mart: s.kind = ScorerKind::Trained; break;
    case Method::MartNoAbstraction:
      s.kind = ScorerKind::Trained;
      s.model = models.trained_raw;
      s.raw = true;
      break;
  }
  return s;
}

std::uint64_t eval_seed(std::uint64_t master_seed, const std::string& task_id, int repeat) {
  return derive_seed(derive_seed(master_seed, streams::kEval, fnv1a(task_id)), 0,
                     static_cast<std::uint64_t>(repeat));
}

void aggregate(EvalReport& r) {
  r.sr = r.as = r.sr_sub = r.as_sub = 0.0;
  if (r.records.empty()) return;
  std::size_t subs = 0, sub_wins = 0;
  double sub_steps = 0.0;
  for (const auto& e : r.records) {
    r.sr += e.success ? 1.0 : 0.0;
    r.as += e.steps;
    for (std::size_t i = 0; i < e.subtask_successes.size(); ++i) {
      ++subs;
      sub_wins += e.subtask_successes[i] ? 1 : 0;
      sub_steps += e.subtask_steps[i];
    }
  }
  const double n = static_cast<double>(r.records.size());
  r.sr /= n;
  r.as /= n;
  if (subs > 0) {
    r.sr_sub = static_cast<double>(sub_wins) / static_cast<double>(subs);
    r.as_sub = sub_steps / static_cast<double>(subs);
  }
}

EvalReport evaluate(Method method, const std::vector<Task>& tasks, const SceneIndex& scenes,
                    const MemoryStore& memory, const Models& models, const LabConfig& config,
                    std::uint64_t master_seed, int jobs) {
  if (needs_checkpoint(method) && models.trained == nullptr)
    throw ValidationError(std::string(to_string(method)) + " needs a trained checkpoint; run `train` first");
  if (needs_raw_checkpoint(method) && models.trained_raw == nullptr)
    throw ValidationError(std::string(to_string(method)) +
                          " needs the raw-sequence checkpoint; run `train` first");
  const auto scorer = method_scorer(method, models, config);
  if (scorer && memory.empty()) throw ValidationError("evaluation memory is empty");
  for (const auto& t : tasks)
    if (!scenes.count(t.scene_id)) throw ValidationError("task " + t.task_id + " has no scene");

  EvalReport report;
  report.method = std::string(to_string(method));
  report.config_hash = config_hash(config);
  report.master_seed = master_seed;
  report.repeats = config.eval.repeats;
  const std::size_t reps = static_cast<std::size_t>(config.eval.repeats);
  report.records = parallel_map<EpisodeRecord>(tasks.size() * reps, jobs, [&](std::size_t i) {
    const Task& task = tasks[i / reps];
    const Scene& scene = scenes.at(task.scene_id);
    EpisodeRecord rec;
    rec.task_id = task.task_id;
    rec.repeat = static_cast<int>(i % reps);
    rec.seed = eval_seed(master_seed, task.task_id, rec.repeat);
    std::optional<Retrieval> ref;
    if (scorer) {
      Env env(scene, config.sim);
      const Observation o1 = env.reset(task, rec.seed);
      ref = retrieve_serial(*scorer, memory, task, o1);
      rec.retrieved = ref->traj_id;
      rec.retrieval_score = ref->score;
    }
    const auto res = execute_episode(scene, task, ref ? &ref->abstract : nullptr, rec.seed, config.sim);
    rec.success = res.success;
    rec.steps = res.steps;
    rec.subtask_successes = res.subtask_successes;
    rec.subtask_steps = res.subtask_steps;
    return rec;
  });
  aggregate(report);
  return report;
}

Json report_to_json(const EvalReport& r) {
  Json records = Json::array();
  for (const auto& e : r.records) {
    Json j{{"task_id", e.task_id}, {"repeat", e.repeat}, {"seed", hex64(e.seed)}};
    if (e.retrieved) {
      j["retrieved"] = *e.retrieved;
      j["retrieval_score"] = e.retrieval_score;
    }
    j["success"] = e.success;
    j["steps"] = e.steps;
    j["subtask_successes"] = e.subtask_successes;
    j["subtask_steps"] = e.subtask_steps;
    records.push_back(std::move(j));
  }
  return Json{{"method", r.method},       {"config_hash", r.config_hash}, {"seed", r.master_seed},
              {"repeats", r.repeats},     {"SR", r.sr},                   {"AS", r.as},
              {"SR_Sub", r.sr_sub},       {"AS_Sub", r.as_sub},           {"records", records}};
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.method.size());
  std::ostringstream out;
  const auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << pad("method") << "  SR     AS      SR_Sub  AS_Sub  episodes\n";
  for (const auto& r : reports) {
    out << pad(r.method) << "  " << fixed(r.sr, 3) << "  " << fixed(r.as, 2);
    out << std::string(r.as < 10 ? 3 : r.as < 100 ? 2 : 1, ' ');
    out << " " << fixed(r.sr_sub, 3) << "   " << fixed(r.as_sub, 2);
    out << std::string(r.as_sub < 10 ? 3 : 2, ' ') << " " << r.records.size() << "\n";
  }
  return out.str();
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CorrelationResult correlation_study(const std::vector<Task>& tasks, const SceneIndex& scenes,
                                    const MemoryStore& memory, const ScorerModel& trained,
                                    const LabConfig& config, std::uint64_t master_seed, int jobs) {
  const int k = std::min<int>(config.eval.correlation_candidates, static_cast<int>(memory.size()));
  CorrelationResult out;
  for (const auto& task : tasks) {
    const Scene& scene = scenes.at(task.scene_id);
    const auto cands = sample_candidates(memory, task, k, derive_seed(master_seed, streams::kCorrelate, 0));
    const std::uint64_t trials_seed = derive_seed(master_seed, streams::kCorrelate, 1);
    const Observation o1 = initial_observation(scene, task, trials_seed);
    const auto measured =
        measure_effectiveness(scene, task, cands, config.eval.correlation_trials, trials_seed, jobs, config.sim);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const auto view = abstract_trajectory(*cands[c], task);
      CorrelationRow row;
      row.task_id = task.task_id;
      row.traj_id = cands[c]->traj_id;
      row.score_sim = similarity_score(task, o1, view, config.similarity);
      row.score_trained = score(trained, featurize(task, o1, view));
      row.sr = measured[c].sr();
      out.rows.push_back(std::move(row));
    }
  }
  if (out.rows.size() < 30)
    throw ValidationError("correlation study needs at least 30 pairs, got " + std::to_string(out.rows.size()));
  std::vector<double> sim, tr, sr;
  for (const auto& r : out.rows) {
    sim.push_back(r.score_sim);
    tr.push_back(r.score_trained);
    sr.push_back(r.sr);
  }
  out.r_sim = pearson(sim, sr);
  out.r_trained = pearson(tr, sr);
  return out;
}

std::string correlation_csv(const CorrelationResult& r) {
  std::string out = "task_id,traj_id,score_sim,score_trained,sr\n";
  char buf[96];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", row.score_sim, row.score_trained, row.sr);
    out += row.task_id + "," + row.traj_id + buf;
  }
  return out;
}

Json correlation_summary(const CorrelationResult& r) {
  const auto val = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"pairs", r.rows.size()},
              {"r_similarity", val(r.r_sim)},
              {"r_trained", val(r.r_trained)},
              {"r_similarity_defined", r.r_sim.has_value()},
              {"r_trained_defined", r.r_trained.has_value()}};
}

}  // namespace trajlab
