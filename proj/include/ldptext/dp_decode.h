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

#ifndef LDPTEXT_DP_DECODE_H_
#define LDPTEXT_DP_DECODE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldptext/rng.h"
#include "ldptext/scorer.h"
#include "ldptext/types.h"

namespace ldptext {

// Categorical distribution over a vocabulary. Entries lie in [0, 1] and sum
// to 1 within 1e-9.
class ProbabilityVector {
 public:
  // Throws InvalidInputError when the invariants do not hold.
  explicit ProbabilityVector(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// out_j = clamp(u_j, lower_j, upper_j) / T, or u_j / T without bounds.
LogitVector ClipAndScale(std::span<const double> logits,
                         const std::optional<ClipBounds>& bounds,
                         double temperature);

// Softmax via log-sum-exp with max subtraction; finite for any finite input.
ProbabilityVector ToProbabilities(std::span<const double> scaled);

// Inverse-CDF draw over the whole vocabulary using one rng.Uniform() value.
TokenId SampleToken(const ProbabilityVector& p, RngStream& rng);

// Keeps the k largest entries (ties at the cut go to the lowest id) and
// renormalizes. Any decode that uses this has no finite epsilon.
ProbabilityVector TopKFilter(const ProbabilityVector& p, int k);

// Per-coordinate min/max of the scorer's logits over every context seen
// while teacher-forcing each public document: the prompt alone, then the
// prompt followed by each prefix of the document's own tokens.
ClipBounds LearnClipBounds(const TokenScorer& scorer,
                           std::span<const Document> public_docs,
                           std::string_view prompt_template);

struct DecodeOptions {
  std::string prompt_template = "Document: {doc}\nParaphrase of the document:";
  std::optional<ClipBounds> bounds;
  double temperature = 1.0;
  int n_tokens = 150;
  std::optional<int> top_k;
  // Stop once the scorer's end-of-sequence token is sampled. Epsilon is
  // still charged for all n_tokens steps.
  bool stop_at_eos = false;
};

// Generates a paraphrase token by token: score the context, clip and scale,
// softmax, optionally top-k filter, sample, append. Throws
// InvalidParameterError for bad options and DecodeStepError when the scorer
// fails.
SanitizedDocument DpPrompt(const TokenScorer& scorer, const Document& doc,
                           const DecodeOptions& options, RngStream& rng);

// Two-row numeric matrix (lower, upper) behind a header that pins the
// vocabulary hash. Loading against a different vocabulary throws
// VocabularyMismatchError.
void SaveClipBounds(const std::string& path, const ClipBounds& bounds,
                    const Vocabulary& vocab);
ClipBounds LoadClipBounds(const std::string& path, const Vocabulary& vocab);

}  // namespace ldptext

#endif  // LDPTEXT_DP_DECODE_H_
