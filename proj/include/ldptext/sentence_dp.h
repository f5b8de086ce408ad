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

#ifndef LDPTEXT_SENTENCE_DP_H_
#define LDPTEXT_SENTENCE_DP_H_

#include <span>
#include <string>
#include <vector>

#include "ldptext/rng.h"
#include "ldptext/types.h"

namespace ldptext {

struct SentenceEmbedding {
  std::string doc_id;
  std::vector<double> vector;
};

// "doc_id v_1 ... v_d" per line, the same layout as word embedding files.
std::vector<SentenceEmbedding> LoadSentenceEmbeddings(const std::string& path);
void SaveSentenceEmbeddings(const std::string& path,
                            std::span<const SentenceEmbedding> embeddings);

// Per-dimension box [lower_i, upper_i]. sensitivity() is the L1 diameter
// sum_i (upper_i - lower_i).
class TruncationBounds {
 public:
  TruncationBounds(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double sensitivity() const { return sensitivity_; }

  void Save(const std::string& path) const;
  static TruncationBounds Load(const std::string& path);

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double sensitivity_ = 0.0;
};

// Per-dimension empirical quantiles (linear interpolation between order
// statistics) of the public embeddings. (0, 1) gives min/max.
TruncationBounds LearnTruncationBounds(
    std::span<const SentenceEmbedding> public_embeddings, double q_low = 0.0,
    double q_high = 1.0);

struct TruncatedLaplaceDraw {
  SentenceEmbedding output;
  // clamp(e) + noise before the final clamp.
  std::vector<double> unclamped;
};

// clamp(e) + Laplace(sensitivity / epsilon) per dimension, clamped again.
// Throws InvalidParameterError for epsilon <= 0 or zero sensitivity and
// InvalidInputError on a dimension mismatch.
TruncatedLaplaceDraw TruncatedLaplaceSample(const SentenceEmbedding& e,
                                            const TruncationBounds& bounds,
                                            double epsilon, RngStream& rng);

SentenceEmbedding TruncatedLaplaceSanitize(const SentenceEmbedding& e,
                                           const TruncationBounds& bounds,
                                           double epsilon, RngStream& rng);

PrivacyReport TruncatedLaplaceReport(const TruncationBounds& bounds,
                                     double epsilon);

}  // namespace ldptext

#endif  // LDPTEXT_SENTENCE_DP_H_
