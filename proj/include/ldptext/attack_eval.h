//
// Copyright 2026 The ldptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDPTEXT_ATTACK_EVAL_H_
#define LDPTEXT_ATTACK_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ldptext/types.h"

namespace ldptext {

enum class Adaptivity { kStatic, kAdaptive };
enum class Access { kEmbedding, kText };

// Static attackers train on clean data and are tested on sanitized data;
// adaptive attackers train, validate and test on sanitized data.
struct AttackScenario {
  Adaptivity adaptivity = Adaptivity::kAdaptive;
  Access access = Access::kText;

  // "static-embedding", "static-text", "adaptive-embedding", "adaptive-text".
  std::string name() const;
  static AttackScenario Parse(std::string_view name);
  static std::vector<AttackScenario> All();

  friend bool operator==(const AttackScenario&, const AttackScenario&) = default;
};

// One document as seen by the attacker. 'embedding' is required only for
// embedding-access scenarios.
struct Sample {
  std::string doc_id;
  std::string text;
  std::vector<double> embedding;
  int author = 0;
  int utility = 0;
  bool sanitized = false;
};

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct ScenarioSplits {
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

// Splits doc ids stratified by author (each author's documents are divided
// by largest-remainder rounding, so every author is within one document of
// its proportional share), then fills the splits from the clean or sanitized
// side according to the scenario. 'sanitized' must hold a counterpart for
// every clean doc_id.
ScenarioSplits BuildScenarioSplits(std::span<const Sample> clean,
                                   std::span<const Sample> sanitized,
                                   AttackScenario scenario,
                                   const SplitRatios& ratios,
                                   std::uint64_t seed);

// Sparse row, entries sorted by feature index.
struct SparseVector {
  std::vector<std::pair<std::int32_t, double>> entries;
};

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  std::size_t dim = 0;
};

// Unigram + bigram tf-idf with smoothed idf
//
//   idf(t) = ln((1 + n) / (1 + df(t))) + 1
//
// where n is the number of fitted documents; a term present in every
// document gets the minimum idf of 1. Rows are raw term counts times idf,
// L2-normalized. Terms not seen during Fit are dropped.
class TfidfVectorizer {
 public:
  void Fit(std::span<const std::string> texts);
  bool fitted() const { return fitted_; }
  // Throws std::logic_error before Fit.
  SparseVector Transform(std::string_view text) const;
  FeatureMatrix Transform(std::span<const Sample> samples) const;
  std::size_t num_features() const { return idf_.size(); }
  std::optional<double> idf(std::string_view term) const;
  std::optional<std::int32_t> index(std::string_view term) const;

  static std::vector<std::string> Terms(std::string_view text);

 private:
  bool fitted_ = false;
  std::unordered_map<std::string, std::int32_t> index_;
  std::vector<double> idf_;
};

struct ScenarioFeatures {
  FeatureMatrix train;
  FeatureMatrix val;
  FeatureMatrix test;
};

// Text access: tf-idf fitted on the train split only. Embedding access:
// the provided vectors, unchanged. Throws InvalidInputError when an
// embedding is missing or dimensions disagree.
ScenarioFeatures ExtractFeatures(const ScenarioSplits& splits, Access access);

struct ClassifierOptions {
  int epochs = 40;
  // 0 means full-batch gradient descent.
  int batch_size = 32;
  double learning_rate = 1.0;
  double l2 = 1e-4;
  // Stop after this many epochs without a val macro-F1 improvement and keep
  // the best epoch's weights. 0 disables early stopping.
  int patience = 8;
  std::uint64_t seed = 0;
};

// Multinomial logistic regression trained by mini-batch gradient descent on
// the mean cross-entropy plus l2/2 * ||W||^2 (bias not penalized).
class LogisticRegression {
 public:
  // Throws InvalidInputError when fewer than two classes occur in 'labels'.
  static LogisticRegression Train(const FeatureMatrix& train,
                                  std::span<const int> labels,
                                  const FeatureMatrix& val,
                                  std::span<const int> val_labels,
                                  int num_classes,
                                  const ClassifierOptions& options);

  int Predict(const SparseVector& x) const;
  std::vector<int> Predict(const FeatureMatrix& x) const;
  int num_classes() const { return num_classes_; }
  std::size_t dim() const { return dim_; }
  // Row-major num_classes x dim.
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  int epochs_run() const { return epochs_run_; }

 private:
  void Scores(const SparseVector& x, std::vector<double>& out) const;

  int num_classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  int epochs_run_ = 0;
};

// Unweighted mean of per-class F1 over classes 0..num_classes-1. A class
// with no true and no predicted instances contributes 0.
double MacroF1(std::span<const int> predictions, std::span<const int> labels,
               int num_classes);

// Expected macro-F1 of a classifier that predicts uniformly at random:
// (1/l) * sum_i 2 p_i / (1 + p_i l) for class fractions p.
double ExpectedRandomF1(std::span<const double> class_fractions);

std::vector<double> ClassFractions(std::span<const int> labels,
                                   int num_classes);

struct EvalOptions {
  SplitRatios ratios;
  ClassifierOptions classifier;
  int num_authors = 2;
  int num_utility_labels = 2;
};

struct RepeatResult {
  double author_f1 = 0.0;
  double utility_f1 = 0.0;
};

struct PrivacyUtilityPoint {
  std::string mechanism;
  double parameter = 0.0;
  std::string scenario;
  double author_f1_mean = 0.0;
  double author_f1_std = 0.0;
  double utility_f1_mean = 0.0;
  double utility_f1_std = 0.0;
  Epsilon epsilon = Epsilon::Unbounded();
  std::vector<RepeatResult> repeats;
  // Model family of the attacker and the utility classifier.
  std::string attacker = "linear-logreg";
};

// Trains the author attacker and the sentiment classifier once per repeat
// (same splits and classifier seeds each time) and aggregates macro-F1 mean
// and population standard deviation.
PrivacyUtilityPoint EvaluatePoint(
    std::span<const Sample> clean,
    std::span<const std::vector<Sample>> sanitized_repeats,
    AttackScenario scenario, const EvalOptions& options, std::uint64_t seed);

}  // namespace ldptext

#endif  // LDPTEXT_ATTACK_EVAL_H_
