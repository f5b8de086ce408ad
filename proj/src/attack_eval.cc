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

#include "ldptext/attack_eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ldptext/errors.h"
#include "ldptext/rng.h"
#include "ldptext/tokenizer.h"

namespace ldptext {

std::string AttackScenario::name() const {
  std::string out = adaptivity == Adaptivity::kStatic ? "static" : "adaptive";
  out += access == Access::kText ? "-text" : "-embedding";
  return out;
}

AttackScenario AttackScenario::Parse(std::string_view name) {
  for (const auto& s : All()) {
    if (s.name() == name) return s;
  }
  throw InvalidParameterError("unknown attack scenario '" + std::string(name) +
                              "'");
}

std::vector<AttackScenario> AttackScenario::All() {
  return {{Adaptivity::kStatic, Access::kEmbedding},
          {Adaptivity::kStatic, Access::kText},
          {Adaptivity::kAdaptive, Access::kEmbedding},
          {Adaptivity::kAdaptive, Access::kText}};
}

ScenarioSplits BuildScenarioSplits(std::span<const Sample> clean,
                                   std::span<const Sample> sanitized,
                                   AttackScenario scenario,
                                   const SplitRatios& ratios,
                                   std::uint64_t seed) {
  const double r[3] = {ratios.train, ratios.val, ratios.test};
  if (r[0] < 0 || r[1] < 0 || r[2] < 0 ||
      std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw InvalidParameterError("split ratios must be nonnegative and sum to 1");
  }
  std::unordered_map<std::string, const Sample*> counterpart;
  for (const auto& s : sanitized) counterpart.emplace(s.doc_id, &s);
  for (const auto& c : clean) {
    if (!counterpart.contains(c.doc_id)) {
      throw InvalidInputError("no sanitized counterpart for '" + c.doc_id +
                              "'");
    }
  }

  std::map<int, std::vector<std::size_t>> by_author;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    by_author[clean[i].author].push_back(i);
  }
  const double n = static_cast<double>(clean.size());
  double assigned[3] = {0, 0, 0};
  ScenarioSplits out;
  std::vector<Sample>* dest[3] = {&out.train, &out.val, &out.test};

  for (auto& [author, idx] : by_author) {
    RngStream rng(seed, StreamId({0x5b117, static_cast<std::uint64_t>(author)}));
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.UniformInt(i)]);
    }
    const double na = static_cast<double>(idx.size());
    std::size_t count[3];
    double frac[3];
    std::size_t used = 0;
    for (int s = 0; s < 3; ++s) {
      const double want = na * r[s];
      count[s] = static_cast<std::size_t>(std::floor(want + 1e-9));
      frac[s] = want - static_cast<double>(count[s]);
      used += count[s];
    }
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3, [&](int a, int b) {
      if (std::abs(frac[a] - frac[b]) > 1e-9) return frac[a] > frac[b];
      return n * r[a] - assigned[a] > n * r[b] - assigned[b];
    });
    for (std::size_t k = 0; used < idx.size(); ++k, ++used) {
      ++count[order[k % 3]];
    }
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s) {
      assigned[s] += static_cast<double>(count[s]);
      for (std::size_t k = 0; k < count[s]; ++k, ++pos) {
        const Sample& c = clean[idx[pos]];
        const bool use_clean =
            scenario.adaptivity == Adaptivity::kStatic && s < 2;
        dest[s]->push_back(use_clean ? c : *counterpart.at(c.doc_id));
        dest[s]->back().sanitized = !use_clean;
      }
    }
  }
  return out;
}

std::vector<std::string> TfidfVectorizer::Terms(std::string_view text) {
  auto words = SplitWords(text);
  std::vector<std::string> terms = words;
  for (std::size_t i = 1; i < words.size(); ++i) {
    terms.push_back(words[i - 1] + " " + words[i]);
  }
  return terms;
}

void TfidfVectorizer::Fit(std::span<const std::string> texts) {
  std::map<std::string, std::int64_t> df;
  for (const auto& t : texts) {
    auto terms = Terms(t);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& term : terms) ++df[term];
  }
  index_.clear();
  idf_.clear();
  const double n = static_cast<double>(texts.size());
  for (const auto& [term, count] : df) {
    index_.emplace(term, static_cast<std::int32_t>(idf_.size()));
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) +
                   1.0);
  }
  fitted_ = true;
}

SparseVector TfidfVectorizer::Transform(std::string_view text) const {
  if (!fitted_) throw std::logic_error("TfidfVectorizer used before Fit");
  std::map<std::int32_t, double> tf;
  for (const auto& term : Terms(text)) {
    auto it = index_.find(term);
    if (it != index_.end()) tf[it->second] += 1.0;
  }
  SparseVector row;
  double norm2 = 0.0;
  for (auto [j, c] : tf) {
    const double w = c * idf_[j];
    row.entries.emplace_back(j, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : row.entries) e.second *= inv;
  }
  return row;
}

FeatureMatrix TfidfVectorizer::Transform(std::span<const Sample> samples) const {
  FeatureMatrix m;
  m.dim = num_features();
  m.rows.reserve(samples.size());
  for (const auto& s : samples) m.rows.push_back(Transform(s.text));
  return m;
}

std::optional<double> TfidfVectorizer::idf(std::string_view term) const {
  auto j = index(term);
  if (!j) return std::nullopt;
  return idf_[*j];
}

std::optional<std::int32_t> TfidfVectorizer::index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

FeatureMatrix DenseFeatures(std::span<const Sample> samples, std::size_t& dim) {
  FeatureMatrix m;
  for (const auto& s : samples) {
    if (s.embedding.empty()) {
      throw InvalidInputError("no embedding for '" + s.doc_id + "'");
    }
    if (dim == 0) dim = s.embedding.size();
    if (s.embedding.size() != dim) {
      throw InvalidInputError("embedding dimension mismatch at '" + s.doc_id +
                              "'");
    }
    SparseVector row;
    row.entries.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      row.entries.emplace_back(static_cast<std::int32_t>(j), s.embedding[j]);
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace

ScenarioFeatures ExtractFeatures(const ScenarioSplits& splits, Access access) {
  ScenarioFeatures f;
  if (access == Access::kText) {
    std::vector<std::string> texts;
    texts.reserve(splits.train.size());
    for (const auto& s : splits.train) texts.push_back(s.text);
    TfidfVectorizer vec;
    vec.Fit(texts);
    f.train = vec.Transform(splits.train);
    f.val = vec.Transform(splits.val);
    f.test = vec.Transform(splits.test);
    return f;
  }
  std::size_t dim = 0;
  f.train = DenseFeatures(splits.train, dim);
  f.val = DenseFeatures(splits.val, dim);
  f.test = DenseFeatures(splits.test, dim);
  f.train.dim = f.val.dim = f.test.dim = dim;
  return f;
}

void LogisticRegression::Scores(const SparseVector& x,
                                std::vector<double>& out) const {
  out.assign(bias_.begin(), bias_.end());
  for (int c = 0; c < num_classes_; ++c) {
    const double* w = weights_.data() + static_cast<std::size_t>(c) * dim_;
    double s = 0.0;
    for (auto [j, v] : x.entries) {
      if (static_cast<std::size_t>(j) < dim_) s += w[j] * v;
    }
    out[c] += s;
  }
}

int LogisticRegression::Predict(const SparseVector& x) const {
  std::vector<double> s;
  Scores(x, s);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

std::vector<int> LogisticRegression::Predict(const FeatureMatrix& x) const {
  std::vector<int> out;
  out.reserve(x.rows.size());
  for (const auto& row : x.rows) out.push_back(Predict(row));
  return out;
}

LogisticRegression LogisticRegression::Train(const FeatureMatrix& train,
                                             std::span<const int> labels,
                                             const FeatureMatrix& val,
                                             std::span<const int> val_labels,
                                             int num_classes,
                                             const ClassifierOptions& options) {
  if (labels.size() != train.rows.size() ||
      val_labels.size() != val.rows.size()) {
    throw InvalidInputError("feature and label counts differ");
  }
  if (options.epochs < 1 || options.batch_size < 0 ||
      !(options.learning_rate > 0.0) || options.l2 < 0.0 ||
      options.patience < 0) {
    throw InvalidParameterError("invalid classifier options");
  }
  std::vector<int> present(num_classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw InvalidInputError("label out of range");
    present[y] = 1;
  }
  if (std::accumulate(present.begin(), present.end(), 0) < 2) {
    throw InvalidInputError("training set has fewer than two classes");
  }

  LogisticRegression model;
  model.num_classes_ = num_classes;
  model.dim_ = train.dim;
  model.weights_.assign(static_cast<std::size_t>(num_classes) * train.dim, 0.0);
  model.bias_.assign(num_classes, 0.0);

  const std::size_t n = train.rows.size();
  const std::size_t batch =
      options.batch_size == 0 ? n : static_cast<std::size_t>(options.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const bool early = options.patience > 0 && !val.rows.empty();
  double best_f1 = -1.0;
  std::vector<double> best_w, best_b;
  int stale = 0;

  std::vector<double> scores;
  std::vector<double> residual;  // batch x classes: p - y
  std::vector<double> grad_b(num_classes);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (options.batch_size != 0) {
      RngStream rng(options.seed, StreamId({0x10915, static_cast<std::uint64_t>(epoch)}));
      for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.UniformInt(i)]);
      }
    }
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      residual.assign((end - start) * num_classes, 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        model.Scores(train.rows[i], scores);
        const double m = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        for (double& s : scores) z += (s = std::exp(s - m));
        for (int c = 0; c < num_classes; ++c) {
          double g = scores[c] / z - (labels[i] == c ? 1.0 : 0.0);
          residual[(k - start) * num_classes + c] = g;
          grad_b[c] += g;
        }
      }
      const double lr = options.learning_rate;
      const double decay = 1.0 - lr * options.l2;
      if (decay != 1.0) {
        for (double& w : model.weights_) w *= decay;
      }
      for (std::size_t k = start; k < end; ++k) {
        const auto& x = train.rows[order[k]];
        for (int c = 0; c < num_classes; ++c) {
          const double g = lr * inv_b * residual[(k - start) * num_classes + c];
          if (g == 0.0) continue;
          double* w = model.weights_.data() + static_cast<std::size_t>(c) * model.dim_;
          for (auto [j, v] : x.entries) w[j] -= g * v;
        }
      }
      for (int c = 0; c < num_classes; ++c) {
        model.bias_[c] -= lr * inv_b * grad_b[c];
      }
    }
    model.epochs_run_ = epoch + 1;
    if (!early) continue;
    const double f1 = MacroF1(model.Predict(val), val_labels, num_classes);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_w = model.weights_;
      best_b = model.bias_;
      stale = 0;
    } else if (++stale >= options.patience) {
      break;
    }
  }
  if (early) {
    model.weights_ = std::move(best_w);
    model.bias_ = std::move(best_b);
  }
  return model;
}

double MacroF1(std::span<const int> predictions, std::span<const int> labels,
               int num_classes) {
  if (predictions.empty()) throw InvalidInputError("macro-F1 of empty input");
  if (predictions.size() != labels.size()) {
    throw InvalidInputError("predictions and labels differ in length");
  }
  if (num_classes < 1) throw InvalidParameterError("num_classes must be >= 1");
  std::vector<std::int64_t> tp(num_classes), fp(num_classes), fn(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if (p < 0 || p >= num_classes || y < 0 || y >= num_classes) {
      throw InvalidInputError("label outside the declared label set");
    }
    if (p == y) {
      ++tp[y];
    } else {
      ++fp[p];
      ++fn[y];
    }
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    if (denom > 0) sum += 2.0 * static_cast<double>(tp[c]) / denom;
  }
  return sum / num_classes;
}

double ExpectedRandomF1(std::span<const double> class_fractions) {
  if (class_fractions.empty()) {
    throw InvalidParameterError("no class fractions");
  }
  double total = 0.0;
  for (double p : class_fractions) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidParameterError("class fractions must be nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidParameterError("class fractions must sum to 1");
  }
  const double l = static_cast<double>(class_fractions.size());
  double sum = 0.0;
  for (double p : class_fractions) sum += 2.0 * p / (1.0 + p * l);
  return sum / l;
}

std::vector<double> ClassFractions(std::span<const int> labels,
                                   int num_classes) {
  if (labels.empty()) throw InvalidInputError("no labels");
  std::vector<double> f(num_classes, 0.0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw InvalidInputError("label out of range");
    f[y] += 1.0;
  }
  for (double& x : f) x /= static_cast<double>(labels.size());
  return f;
}

namespace {

std::pair<double, double> MeanStd(const std::vector<double>& xs) {
  // Shifted by the first value so identical inputs give exactly (x, 0).
  const double shift = xs.front();
  double d = 0.0;
  for (double x : xs) d += x - shift;
  d /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - shift - d) * (x - shift - d);
  var /= static_cast<double>(xs.size());
  return {shift + d, std::sqrt(var)};
}

}  // namespace

PrivacyUtilityPoint EvaluatePoint(
    std::span<const Sample> clean,
    std::span<const std::vector<Sample>> sanitized_repeats,
    AttackScenario scenario, const EvalOptions& options, std::uint64_t seed) {
  if (sanitized_repeats.empty()) {
    throw InvalidInputError("evaluate_point needs at least one repeat");
  }
  PrivacyUtilityPoint point;
  point.scenario = scenario.name();
  std::vector<double> author_f1s, utility_f1s;
  for (const auto& sanitized : sanitized_repeats) {
    const ScenarioSplits splits =
        BuildScenarioSplits(clean, sanitized, scenario, options.ratios, seed);
    const ScenarioFeatures features = ExtractFeatures(splits, scenario.access);
    auto labels = [](const std::vector<Sample>& s, bool author) {
      std::vector<int> out;
      out.reserve(s.size());
      for (const auto& x : s) out.push_back(author ? x.author : x.utility);
      return out;
    };
    auto fit_and_score = [&](bool author, int classes, std::uint64_t tag) {
      ClassifierOptions co = options.classifier;
      co.seed = StreamId({seed, tag});
      auto model = LogisticRegression::Train(
          features.train, labels(splits.train, author), features.val,
          labels(splits.val, author), classes, co);
      return MacroF1(model.Predict(features.test), labels(splits.test, author),
                     classes);
    };
    RepeatResult r;
    r.author_f1 = fit_and_score(true, options.num_authors, 1);
    r.utility_f1 = fit_and_score(false, options.num_utility_labels, 2);
    author_f1s.push_back(r.author_f1);
    utility_f1s.push_back(r.utility_f1);
    point.repeats.push_back(r);
  }
  std::tie(point.author_f1_mean, point.author_f1_std) = MeanStd(author_f1s);
  std::tie(point.utility_f1_mean, point.utility_f1_std) = MeanStd(utility_f1s);
  return point;
}

}  // namespace ldptext
