#include "trajlab/retriever/model.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "trajlab/common.hpp"
#include "trajlab/io.hpp"

namespace trajlab {
namespace {

void check_dim(int expected, const FeatureVector& x) {
  if (static_cast<int>(x.size()) != expected)
    throw ValidationError("feature dimension " + std::to_string(x.size()) + " does not match model input " +
                          std::to_string(expected));
}

// tanh(W1^T x + b1) into `a`.
void hidden_layer(const std::vector<double>& W1, const std::vector<double>& b1, int hidden,
                  const FeatureVector& x, std::vector<double>& a) {
  a.assign(b1.begin(), b1.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = &W1[i * hidden];
    for (int h = 0; h < hidden; ++h) a[h] += xi * row[h];
  }
  for (auto& v : a) v = std::tanh(v);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_array(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt17(v[i]);
  }
  out += ']';
}

std::string config_hash_of(const TrainConfig& c, int input_dim) {
  const std::string text = "epochs=" + std::to_string(c.epochs) + ";lr=" + fmt17(c.lr) +
                           ";batch=" + std::to_string(c.batch) + ";seed=" + std::to_string(c.seed) +
                           ";val_frac=" + fmt17(c.val_frac) + ";hidden=" + std::to_string(c.hidden) +
                           ";input=" + std::to_string(input_dim);
  return content_hash(text);
}

}  // namespace

ScorerModel ScorerModel::zeros(int input_dim, int hidden) {
  if (input_dim <= 0 || hidden <= 0) throw ValidationError("model dimensions must be positive");
  ScorerModel m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.W1.assign(static_cast<std::size_t>(input_dim) * hidden, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w_head.assign(hidden, 0.0);
  return m;
}

ScorerModel ScorerModel::random(int input_dim, int hidden, std::uint64_t seed) {
  ScorerModel m = zeros(input_dim, hidden);
  m.seed = seed;
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& w : m.W1) w = rng.normal() * s1;
  for (auto& w : m.w_head) w = rng.normal() * s2;
  return m;
}

double& ScorerModel::parameter(std::size_t i) {
  if (i < W1.size()) return W1[i];
  i -= W1.size();
  if (i < b1.size()) return b1[i];
  i -= b1.size();
  if (i < w_head.size()) return w_head[i];
  return b_head;
}

double ScorerModel::parameter(std::size_t i) const { return const_cast<ScorerModel&>(*this).parameter(i); }

double score(const ScorerModel& model, const FeatureVector& x) {
  check_dim(model.input_dim, x);
  std::vector<double> a;
  hidden_layer(model.W1, model.b1, model.hidden, x, a);
  double s = model.b_head;
  for (int h = 0; h < model.hidden; ++h) s += model.w_head[h] * a[h];
  return s;
}

double score_backward(const ScorerModel& model, const FeatureVector& x, double weight, ScorerModel& grads) {
  check_dim(model.input_dim, x);
  const int H = model.hidden;
  std::vector<double> a;
  hidden_layer(model.W1, model.b1, H, x, a);
  double s = model.b_head;
  for (int h = 0; h < H; ++h) s += model.w_head[h] * a[h];

  grads.b_head += weight;
  std::vector<double> g(H);
  for (int h = 0; h < H; ++h) {
    grads.w_head[h] += weight * a[h];
    g[h] = weight * model.w_head[h] * (1.0 - a[h] * a[h]);
    grads.b1[h] += g[h];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* row = &grads.W1[i * H];
    for (int h = 0; h < H; ++h) row[h] += xi * g[h];
  }
  return s;
}

double bt_pair_loss(double diff) {
  // softplus(-d) = log(1 + exp(-d))
  return diff > 0 ? std::log1p(std::exp(-diff)) : -diff + std::log1p(std::exp(diff));
}

LossAndGrads bt_loss(const ScorerModel& model, const std::vector<const FeaturePair*>& batch) {
  if (batch.empty()) throw ValidationError("bt_loss needs a nonempty batch");
  LossAndGrads out;
  out.grads = ScorerModel::zeros(model.input_dim, model.hidden);
  const double inv = 1.0 / static_cast<double>(batch.size());
  ScorerModel gw = out.grads, gl = out.grads;
  for (const auto* p : batch) {
    std::fill(gw.W1.begin(), gw.W1.end(), 0.0);
    std::fill(gw.b1.begin(), gw.b1.end(), 0.0);
    std::fill(gw.w_head.begin(), gw.w_head.end(), 0.0);
    gw.b_head = 0.0;
    gl = gw;
    const double sw = score_backward(model, p->winner, 1.0, gw);
    const double sl = score_backward(model, p->loser, 1.0, gl);
    if (!std::isfinite(sw) || !std::isfinite(sl)) throw TrainingError("non-finite score on pair " + p->id);
    const double d = sw - sl;
    out.loss += bt_pair_loss(d) * inv;
    // dL/dd = -sigmoid(-d)
    const double dd = -1.0 / (1.0 + std::exp(d)) * inv;
    for (std::size_t i = 0; i < out.grads.parameter_count(); ++i)
      out.grads.parameter(i) += dd * (gw.parameter(i) - gl.parameter(i));
  }
  out.grads.seed = model.seed;
  return out;
}

std::vector<std::string> validation_tasks(const std::vector<FeaturePair>& pairs, double val_frac,
                                          std::uint64_t seed) {
  if (!(val_frac >= 0.0 && val_frac < 1.0)) throw ValidationError("val_frac must be in [0, 1)");
  std::set<std::string> ids;
  for (const auto& p : pairs) ids.insert(p.task_id);
  std::vector<std::string> tasks(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, streams::kTrain, 2));
  rng.shuffle(tasks);
  const auto n = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(tasks.size())));
  tasks.resize(std::min(n, tasks.size()));
  std::sort(tasks.begin(), tasks.end());
  return tasks;
}

double pairwise_accuracy(const std::vector<const FeaturePair*>& pairs,
                         const std::function<double(const FeaturePair&, bool winner)>& scorer) {
  if (pairs.empty()) return 0.0;
  std::size_t right = 0;
  for (const auto* p : pairs) right += scorer(*p, true) > scorer(*p, false) ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(pairs.size());
}

TrainResult train_retriever(const std::vector<FeaturePair>& pairs, const TrainConfig& config) {
  if (pairs.size() < 20)
    throw ValidationError("training needs at least 20 pairs, got " + std::to_string(pairs.size()));
  if (config.epochs < 1 || config.batch < 1 || !(config.lr > 0.0))
    throw ValidationError("epochs, batch and lr must be positive");
  const int dim = static_cast<int>(pairs.front().winner.size());

  TrainResult result;
  auto& report = result.report;
  report.val_tasks = validation_tasks(pairs, config.val_frac, config.seed);
  const std::set<std::string> held(report.val_tasks.begin(), report.val_tasks.end());
  std::vector<const FeaturePair*> train, val;
  for (const auto& p : pairs) (held.count(p.task_id) ? val : train).push_back(&p);
  if (train.empty()) throw ValidationError("validation split left no training pairs");
  report.train_pairs = train.size();
  report.val_pairs = val.size();

  ScorerModel model = ScorerModel::random(dim, config.hidden, derive_seed(config.seed, streams::kTrain, 0));
  model.config_hash = config_hash_of(config, dim);
  const std::size_t n = model.parameter_count();
  const std::size_t decayed = model.W1.size();
  std::vector<double> m1(n, 0.0), m2(n, 0.0);
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double p1 = 1.0, p2 = 1.0;

  Rng rng(derive_seed(config.seed, streams::kTrain, 1));
  std::vector<const FeaturePair*> order = train;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      const std::vector<const FeaturePair*> batch(order.begin() + start, order.begin() + end);
      const auto lg = bt_loss(model, batch);
      if (!std::isfinite(lg.loss)) throw TrainingError("non-finite loss in epoch " + std::to_string(epoch));
      p1 *= b1;
      p2 *= b2;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = lg.grads.parameter(i);
        m1[i] = b1 * m1[i] + (1 - b1) * g;
        m2[i] = b2 * m2[i] + (1 - b2) * g * g;
        const double mh = m1[i] / (1 - p1);
        const double vh = m2[i] / (1 - p2);
        double& w = model.parameter(i);
        if (i < decayed) w -= config.lr * config.weight_decay * w;
        w -= config.lr * mh / (std::sqrt(vh) + eps);
      }
    }
    report.epoch_loss.push_back(bt_loss(model, train).loss);
  }

  const auto by_model = [&](const FeaturePair& p, bool w) { return score(model, w ? p.winner : p.loser); };
  report.train_accuracy = pairwise_accuracy(train, by_model);
  report.val_accuracy = pairwise_accuracy(val, by_model);
  result.model = std::move(model);
  return result;
}

YesNoModel YesNoModel::random(int input_dim, int hidden, std::uint64_t seed) {
  YesNoModel m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.seed = seed;
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  m.W1.resize(static_cast<std::size_t>(input_dim) * hidden);
  for (auto& w : m.W1) w = rng.normal() * s1;
  m.b1.assign(hidden, 0.0);
  m.W_head.resize(static_cast<std::size_t>(hidden) * 2);
  for (auto& w : m.W_head) w = rng.normal() * s2;
  m.b_head.assign(2, 0.0);
  return m;
}

std::pair<double, double> yesno_logits(const YesNoModel& model, const FeatureVector& x) {
  check_dim(model.input_dim, x);
  std::vector<double> a;
  hidden_layer(model.W1, model.b1, model.hidden, x, a);
  double yes = model.b_head[0], no = model.b_head[1];
  for (int h = 0; h < model.hidden; ++h) {
    yes += model.W_head[h * 2] * a[h];
    no += model.W_head[h * 2 + 1] * a[h];
  }
  return {yes, no};
}

double yes_probability(double yes_logit, double no_logit) {
  // softmax over two logits, written as a logistic of the difference
  return 1.0 / (1.0 + std::exp(no_logit - yes_logit));
}

double yesno_score(const YesNoModel& model, const FeatureVector& x) {
  const auto [yes, no] = yesno_logits(model, x);
  return yes_probability(yes, no);
}

std::string checkpoint_text(const ScorerModel& model) {
  std::string out = "{\n  \"dims\": {\"input\": " + std::to_string(model.input_dim) +
                    ", \"hidden\": " + std::to_string(model.hidden) + "},\n";
  out += "  \"seed\": " + std::to_string(model.seed) + ",\n";
  out += "  \"config_hash\": " + Json(model.config_hash).dump() + ",\n";
  out += "  \"W1\": ";
  append_array(out, model.W1);
  out += ",\n  \"b1\": ";
  append_array(out, model.b1);
  out += ",\n  \"w_head\": ";
  append_array(out, model.w_head);
  out += ",\n  \"b_head\": " + fmt17(model.b_head) + "\n}\n";
  return out;
}

ScorerModel parse_checkpoint(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ScorerModel m = ScorerModel::zeros(j.at("dims").at("input").get<int>(), j.at("dims").at("hidden").get<int>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.W1 = j.at("W1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w_head = j.at("w_head").get<std::vector<double>>();
    m.b_head = j.at("b_head").get<double>();
    if (m.W1.size() != static_cast<std::size_t>(m.input_dim) * m.hidden ||
        m.b1.size() != static_cast<std::size_t>(m.hidden) || m.w_head.size() != static_cast<std::size_t>(m.hidden))
      throw ValidationError("checkpoint weight arrays do not match dims");
    return m;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ScorerModel& model) {
  write_text(path, checkpoint_text(model));
}

ScorerModel load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_text(path)); }

}  // namespace trajlab
