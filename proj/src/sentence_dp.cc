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

#include "ldptext/sentence_dp.h"

#include <algorithm>
#include <cmath>

#include "ldptext/embedding_table.h"
#include "ldptext/errors.h"

namespace ldptext {

std::vector<SentenceEmbedding> LoadSentenceEmbeddings(const std::string& path) {
  std::vector<SentenceEmbedding> out;
  for (auto& r : ReadVectorFile(path)) {
    out.push_back({std::move(r.key), std::move(r.values)});
  }
  return out;
}

void SaveSentenceEmbeddings(const std::string& path,
                            std::span<const SentenceEmbedding> embeddings) {
  std::vector<VectorRecord> records;
  records.reserve(embeddings.size());
  for (const auto& e : embeddings) records.push_back({e.doc_id, e.vector, 0});
  WriteVectorFile(path, records);
}

TruncationBounds::TruncationBounds(std::vector<double> lower,
                                   std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.empty()) {
    throw InvalidInputError("truncation bounds: bad dimensions");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] <= upper_[i]) || !std::isfinite(lower_[i]) ||
        !std::isfinite(upper_[i])) {
      throw InvalidInputError("truncation bounds: invalid interval at " +
                              std::to_string(i));
    }
    sensitivity_ += upper_[i] - lower_[i];
  }
}

void TruncationBounds::Save(const std::string& path) const {
  WriteVectorFile(path, std::vector<VectorRecord>{{"lower", lower_, 0},
                                                  {"upper", upper_, 0}});
}

TruncationBounds TruncationBounds::Load(const std::string& path) {
  auto records = ReadVectorFile(path);
  if (records.size() != 2 || records[0].key != "lower" ||
      records[1].key != "upper") {
    throw ParseError(path, 0, "expected 'lower' and 'upper' rows");
  }
  return TruncationBounds(std::move(records[0].values),
                          std::move(records[1].values));
}

TruncationBounds LearnTruncationBounds(
    std::span<const SentenceEmbedding> public_embeddings, double q_low,
    double q_high) {
  if (public_embeddings.empty()) {
    throw InvalidInputError("no public embeddings to learn bounds from");
  }
  if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) {
    throw InvalidParameterError("need 0 <= q_low < q_high <= 1");
  }
  const std::size_t d = public_embeddings.front().vector.size();
  const std::size_t n = public_embeddings.size();
  std::vector<double> lower(d), upper(d), column(n);
  auto quantile = [&column, n](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return column[lo] + (pos - static_cast<double>(lo)) * (column[hi] - column[lo]);
  };
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = public_embeddings[i].vector;
      if (v.size() != d) {
        throw InvalidInputError("embedding '" + public_embeddings[i].doc_id +
                                "' has dimension " + std::to_string(v.size()));
      }
      column[i] = v[k];
    }
    std::sort(column.begin(), column.end());
    lower[k] = quantile(q_low);
    upper[k] = quantile(q_high);
  }
  return TruncationBounds(std::move(lower), std::move(upper));
}

TruncatedLaplaceDraw TruncatedLaplaceSample(const SentenceEmbedding& e,
                                            const TruncationBounds& bounds,
                                            double epsilon, RngStream& rng) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameterError("epsilon must be positive and finite");
  }
  if (!(bounds.sensitivity() > 0.0)) {
    throw InvalidParameterError("truncation bounds have zero sensitivity");
  }
  if (e.vector.size() != bounds.dim()) {
    throw InvalidInputError("embedding '" + e.doc_id + "' has dimension " +
                            std::to_string(e.vector.size()) + ", bounds " +
                            std::to_string(bounds.dim()));
  }
  const double scale = bounds.sensitivity() / epsilon;
  TruncatedLaplaceDraw draw;
  draw.output.doc_id = e.doc_id;
  draw.output.vector.resize(bounds.dim());
  draw.unclamped.resize(bounds.dim());
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    const double lo = bounds.lower()[i];
    const double hi = bounds.upper()[i];
    draw.unclamped[i] = std::clamp(e.vector[i], lo, hi) + rng.Laplace(scale);
    draw.output.vector[i] = std::clamp(draw.unclamped[i], lo, hi);
  }
  return draw;
}

SentenceEmbedding TruncatedLaplaceSanitize(const SentenceEmbedding& e,
                                           const TruncationBounds& bounds,
                                           double epsilon, RngStream& rng) {
  return TruncatedLaplaceSample(e, bounds, epsilon, rng).output;
}

PrivacyReport TruncatedLaplaceReport(const TruncationBounds& bounds,
                                     double epsilon) {
  PrivacyReport report;
  report.mechanism = "trunc-laplace";
  report.granularity = Granularity::kSentence;
  report.epsilon = Epsilon::Of(epsilon);
  report.parameters["epsilon"] = FormatDouble(epsilon);
  report.parameters["l1_sensitivity"] = FormatDouble(bounds.sensitivity());
  report.parameters["noise_scale"] =
      FormatDouble(bounds.sensitivity() / epsilon);
  return report;
}

}  // namespace ldptext
