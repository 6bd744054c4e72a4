#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "trajlab/retriever/features.hpp"

namespace trajlab {

/// q_theta: score = w_head . tanh(W1^T x + b1) + b_head.
/// W1 is stored row-major as input x hidden.
struct ScorerModel {
  int input_dim = 0;
  int hidden = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<double> W1;
  std::vector<double> b1;
  std::vector<double> w_head;
  double b_head = 0.0;

  static ScorerModel zeros(int input_dim, int hidden);
  /// W1 ~ N(0, 1/input_dim), w_head ~ N(0, 1/hidden), biases zero.
  static ScorerModel random(int input_dim, int hidden, std::uint64_t seed);

  std::size_t parameter_count() const { return W1.size() + b1.size() + w_head.size() + 1; }
  /// Flat view in checkpoint order: W1, b1, w_head, b_head.
  double& parameter(std::size_t i);
  double parameter(std::size_t i) const;
  friend bool operator==(const ScorerModel&, const ScorerModel&) = default;
};

/// Throws ValidationError on a dimension mismatch.
double score(const ScorerModel& model, const FeatureVector& x);

/// Score plus d score / d theta accumulated into `grads` scaled by `weight`.
double score_backward(const ScorerModel& model, const FeatureVector& x, double weight, ScorerModel& grads);

/// One training example: featurized winner and loser for a task.
struct FeaturePair {
  std::string id;
  std::string task_id;
  FeatureVector winner;
  FeatureVector loser;
};

struct LossAndGrads {
  double loss = 0.0;
  ScorerModel grads;  // same shapes as the model
};

/// Mean of -log sigmoid(s_w - s_l) over the batch with exact gradients.
/// Throws ValidationError on an empty batch, TrainingError on a non-finite score.
LossAndGrads bt_loss(const ScorerModel& model, const std::vector<const FeaturePair*>& batch);

/// -log sigmoid(d), stable for large |d|.
double bt_pair_loss(double diff);

struct TrainConfig {
  int epochs = 200;
  double lr = 1e-3;
  int batch = 32;
  std::uint64_t seed = 0;
  double val_frac = 0.2;
  int hidden = 64;
  double weight_decay = 0.0;  // decoupled, applied to W1
};

struct TrainReport {
  std::size_t train_pairs = 0;
  std::size_t val_pairs = 0;
  std::vector<std::string> val_tasks;  // sorted
  std::vector<double> epoch_loss;      // mean training loss after each epoch
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ScorerModel model;
  TrainReport report;
};

/// Task ids held out for validation: a seeded shuffle of the distinct task
/// ids, of which the first round(val_frac * count) go to validation.
std::vector<std::string> validation_tasks(const std::vector<FeaturePair>& pairs, double val_frac,
                                          std::uint64_t seed);

/// Adam (0.9, 0.999, 1e-8) over seeded minibatches; single-threaded and
/// deterministic. Throws ValidationError below 20 pairs.
TrainResult train_retriever(const std::vector<FeaturePair>& pairs, const TrainConfig& config);

/// Fraction of pairs with f(winner) > f(loser); 0 for no pairs.
double pairwise_accuracy(const std::vector<const FeaturePair*>& pairs,
                         const std::function<double(const FeaturePair&, bool winner)>& scorer);

/// Untrained two-logit judge: tanh hidden layer feeding (yes, no) logits.
struct YesNoModel {
  int input_dim = 0;
  int hidden = 0;
  std::uint64_t seed = 0;
  std::vector<double> W1;  // input x hidden
  std::vector<double> b1;
  std::vector<double> W_head;  // hidden x 2
  std::vector<double> b_head;  // 2

  static YesNoModel random(int input_dim, int hidden, std::uint64_t seed);
};

inline constexpr std::uint64_t kYesNoSeed = 0x59657341734e6f31ULL;

std::pair<double, double> yesno_logits(const YesNoModel& model, const FeatureVector& x);

/// p(yes) / (p(yes) + p(no)) from two softmax logits.
double yes_probability(double yes_logit, double no_logit);

double yesno_score(const YesNoModel& model, const FeatureVector& x);

std::string checkpoint_text(const ScorerModel& model);
ScorerModel parse_checkpoint(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const ScorerModel& model);
ScorerModel load_checkpoint(const std::filesystem::path& path);

}  // namespace trajlab
