#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "trajlab/retriever/retrieve.hpp"

using namespace trajlab;
using namespace trajlab::testing;

namespace {

// score(x) = w * tanh(x0): the winner at x0 = 1 scores `diff`, the loser at 0 scores 0.
ScorerModel one_unit(double diff, double bias) {
  ScorerModel m = ScorerModel::zeros(1, 1);
  m.W1 = {1.0};
  m.w_head = {diff / std::tanh(1.0)};
  m.b_head = bias;
  return m;
}

FeaturePair scalar_pair(double w, double l) { return {"p", "t", {w}, {l}}; }

// Winner carries flag 1 at index 0 and loser 0; both share the same random
// context, as the two sides of a real pair share task and o1.
std::vector<FeaturePair> separable(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeaturePair> out;
  for (int k = 0; k < n; ++k) {
    FeaturePair p{"p" + std::to_string(k), "t" + std::to_string(k % 20), FeatureVector(dim), FeatureVector(dim)};
    for (int i = 1; i < dim; ++i) p.winner[i] = p.loser[i] = rng.normal();
    p.winner[0] = 1.0;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("Bradley-Terry closed forms") {
  CHECK(std::abs(bt_pair_loss(0.0) - std::log(2.0)) < 1e-9);
  CHECK(std::abs(bt_pair_loss(2.0) - std::log1p(std::exp(-2.0))) < 1e-9);
  CHECK(std::abs(bt_pair_loss(2.0) - 0.126928) < 1e-6);
  CHECK(std::isfinite(bt_pair_loss(-800.0)));
  CHECK(bt_pair_loss(800.0) >= 0.0);

  const FeaturePair p = scalar_pair(1.0, 0.0);
  CHECK(std::abs(bt_loss(ScorerModel::zeros(1, 1), {&p}).loss - std::log(2.0)) < 1e-9);
  CHECK(std::abs(bt_loss(one_unit(2.0, 0.0), {&p}).loss - std::log1p(std::exp(-2.0))) < 1e-9);
  // Only the score difference matters.
  CHECK(std::abs(bt_loss(one_unit(2.0, 5.0), {&p}).loss - std::log1p(std::exp(-2.0))) < 1e-9);
  CHECK_THROWS_AS(bt_loss(ScorerModel::zeros(1, 1), {}), ValidationError);
}

TEST_CASE("analytic gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = gradient_case(seed);
    const double err = max_gradient_error(c.model, c.batch());
    CHECK_MESSAGE(err < 1e-4, "seed " << seed << " error " << err);
  }
}

TEST_CASE("score contracts") {
  const FeatureVector x(fv::kDim, 0.3);
  CHECK(score(ScorerModel::zeros(fv::kDim, 64), x) == 0.0);
  const auto m = ScorerModel::random(fv::kDim, 64, 3);
  CHECK(score(m, x) == score(ScorerModel::random(fv::kDim, 64, 3), x));
  CHECK_THROWS_AS(score(m, FeatureVector(10)), ValidationError);
  // Lipschitz probe: a perturbation of size eps moves the score by O(eps).
  FeatureVector y = x;
  y[17] += 1e-6;
  CHECK(std::abs(score(m, y) - score(m, x)) < 1e-4);
}

TEST_CASE("separable synthetic pairs reach full held-out accuracy within 50 epochs") {
  const auto pairs = separable(200, 12, 4);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.hidden = 8;
  cfg.seed = 11;
  const auto r = train_retriever(pairs, cfg);
  CHECK(r.report.val_pairs > 0);
  CHECK(r.report.val_accuracy == 1.0);
  CHECK(r.report.epoch_loss.size() == 50);
  CHECK(r.report.epoch_loss.back() <= std::log(2.0));
  // No task straddles the split.
  const std::set<std::string> held(r.report.val_tasks.begin(), r.report.val_tasks.end());
  CHECK(held.size() == 4);  // round(0.2 * 20)
  CHECK(r.report.train_pairs + r.report.val_pairs == pairs.size());
  const auto again = train_retriever(pairs, cfg);
  CHECK(again.model == r.model);
}

TEST_CASE("training input checks") {
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train_retriever(separable(19, 4, 1), cfg), ValidationError);
  auto bad = separable(30, 4, 1);
  bad[3].winner[2] = std::nan("");
  try {
    train_retriever(bad, cfg);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("p3") != std::string::npos);
  }
}

TEST_CASE("yes/no probability") {
  CHECK(yes_probability(1.3, 1.3) == doctest::Approx(0.5));
  CHECK(yes_probability(std::log(0.9), std::log(0.1)) == doctest::Approx(0.9));
  const auto m = YesNoModel::random(fv::kDim, 64, kYesNoSeed);
  const double s = yesno_score(m, FeatureVector(fv::kDim, 0.1));
  CHECK(s > 0.0);
  CHECK(s < 1.0);
}

TEST_CASE("similarity score examples") {
  const Lab& lab = default_lab();
  // A trajectory whose first view is not empty; an empty histogram has cosine 0.
  const Trajectory* t = nullptr;
  for (const auto* u : lab.test_memory.list())
    if (!u->observations.front().visible.empty()) t = u;
  REQUIRE(t != nullptr);
  const auto& o1 = t->observations.front();
  const auto own = abstract_trajectory(*t, t->task);
  CHECK(similarity_score(t->task, o1, own) == doctest::Approx(1.0));
  CHECK(cosine({0, 0}, {1, 2}) == 0.0);
  CHECK(cosine({1, 0}, {0, 3}) == 0.0);

  // Same instruction, another scene: text term 1, visual term below 1.
  int probes = 0;
  for (const auto* other : lab.train_memory.list()) {
    if (other->task.instruction != t->task.instruction) continue;
    const auto a = abstract_trajectory(*other, t->task);
    const double text = similarity_score(t->task, o1, a, {1.0, 0.0});
    const double vis = similarity_score(t->task, o1, a, {0.0, 1.0});
    CHECK(text == doctest::Approx(1.0));
    if (observation_histogram(o1) != observation_histogram(other->observations.front())) {
      CHECK(vis < 1.0);
      CHECK(similarity_score(t->task, o1, a) < 1.0);
    }
    ++probes;
  }
  CHECK(probes > 0);
}

TEST_CASE("feature layout properties") {
  const Lab& lab = default_lab();
  const auto list = lab.test_memory.list();
  const auto* t = list.front();
  const auto a = abstract_trajectory(*t, t->task);
  const auto x = featurize(t->task, t->observations.front(), a);
  CHECK(x.size() == fv::kDim);
  CHECK(x == featurize(t->task, t->observations.front(), a));
  for (int i = fv::kUsed; i < fv::kDim; ++i) CHECK(x[i] == 0.0);

  // Identical templated instruction in two scenes.
  for (const auto* u : list) {
    if (u->task.instruction != t->task.instruction || u->task.scene_id == t->task.scene_id) continue;
    const auto y = featurize(u->task, u->observations.front(), abstract_trajectory(*u, u->task));
    CHECK(std::equal(x.begin() + fv::kInstr, x.begin() + fv::kInstr + fv::kInstrBins, y.begin() + fv::kInstr));
    CHECK_FALSE(std::equal(x.begin() + fv::kObsHist, x.begin() + fv::kObsHist + fv::kObsBins,
                           y.begin() + fv::kObsHist));
  }

  // Reordering milestones leaves the bag blocks and the overlap scalars alone.
  for (const auto* u : list) {
    auto b = abstract_trajectory(*u, t->task);
    if (b.milestones.size() < 3) continue;
    const auto before = featurize(t->task, t->observations.front(), b);
    std::reverse(b.milestones.begin() + 1, b.milestones.end());
    const auto after = featurize(t->task, t->observations.front(), b);
    for (int i = fv::kCount; i < fv::kUsed; ++i) CHECK_MESSAGE(before[i] == after[i], "index " << i);
  }
}

TEST_CASE("argmax tie-break and singleton memory") {
  CHECK(argmax_first({0.2, 0.9, 0.9}) == 1);
  CHECK(argmax_first({-1.0}) == 0);

  const Lab& lab = default_lab();
  MemoryStore one;
  one.split = Split::Test;
  const auto* t = lab.test_memory.list().back();
  one.trajectories.emplace(t->traj_id, *t);
  const Task& task = lab.test.tasks.front();
  const auto o1 = Env(lab.test.scenes.at(task.scene_id)).reset(task, 1);
  const Scorer sim;
  CHECK(retrieve(sim, one, task, o1).traj_id == t->traj_id);
  CHECK_THROWS_AS(retrieve(sim, MemoryStore{}, task, o1), ValidationError);
  Scorer trained;
  trained.kind = ScorerKind::Trained;
  CHECK_THROWS_AS(retrieve(trained, one, task, o1), ValidationError);
}

TEST_CASE("retrieval is invariant to affine score changes and to the thread count") {
  const Lab& lab = default_lab();
  const auto m = ScorerModel::random(fv::kDim, 64, 5);
  ScorerModel shifted = m;
  for (auto& w : shifted.w_head) w *= 3.0;
  shifted.b_head += 7.0;
  const auto yn = YesNoModel::random(fv::kDim, 64, kYesNoSeed);
  for (const auto& task : lab.test.tasks) {
    const auto o1 = Env(lab.test.scenes.at(task.scene_id)).reset(task, 4);
    Scorer a;
    a.kind = ScorerKind::Trained;
    a.model = &m;
    Scorer b = a;
    b.model = &shifted;
    CHECK(retrieve(a, lab.test_memory, task, o1).traj_id == retrieve(b, lab.test_memory, task, o1).traj_id);
    for (const auto kind : {ScorerKind::Trained, ScorerKind::Similarity, ScorerKind::YesNo, ScorerKind::SimTopKThen}) {
      Scorer s;
      s.kind = kind;
      s.model = &m;
      s.yesno = &yn;
      const auto p = retrieve(s, lab.test_memory, task, o1, 4);
      const auto q = retrieve_serial(s, lab.test_memory, task, o1);
      CHECK(p.traj_id == q.traj_id);
      CHECK(p.score == q.score);
    }
  }
}

TEST_CASE("top-k-then-rerank stays inside the similarity shortlist") {
  const Lab& lab = default_lab();
  const auto m = ScorerModel::random(fv::kDim, 64, 8);
  for (const auto& task : lab.test.tasks) {
    const auto o1 = Env(lab.test.scenes.at(task.scene_id)).reset(task, 2);
    std::vector<std::pair<double, std::string>> sims;
    for (const auto* t : lab.test_memory.list())
      sims.push_back({-similarity_score(task, o1, reference_view(*t, task, false)), t->traj_id});
    std::stable_sort(sims.begin(), sims.end(), [](auto& x, auto& y) { return x.first < y.first; });
    std::set<std::string> shortlist;
    for (int i = 0; i < 5; ++i) shortlist.insert(sims[i].second);
    Scorer s;
    s.kind = ScorerKind::SimTopKThen;
    s.model = &m;
    CHECK(shortlist.count(retrieve(s, lab.test_memory, task, o1).traj_id) == 1);
  }
}

TEST_CASE("checkpoint round trip and validation") {
  auto m = ScorerModel::random(fv::kDim, 64, 21);
  m.config_hash = "abc";
  const std::string text = checkpoint_text(m);
  const auto back = parse_checkpoint(text);
  CHECK(back == m);
  CHECK(checkpoint_text(back) == text);
  CHECK_THROWS_AS(parse_checkpoint("{}"), ValidationError);
  CHECK_THROWS_AS(parse_checkpoint("not json"), ValidationError);
  Json j = Json::parse(text);
  j["W1"].erase(j["W1"].begin());
  CHECK_THROWS_AS(parse_checkpoint(j.dump()), ValidationError);
}
