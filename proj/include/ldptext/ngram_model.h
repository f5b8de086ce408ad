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

#ifndef LDPTEXT_NGRAM_MODEL_H_
#define LDPTEXT_NGRAM_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ldptext/scorer.h"
#include "ldptext/types.h"

namespace ldptext {

struct NGramOptions {
  int order = 3;
  double add_k = 0.01;
  int min_count = 2;
  // Weight of a unigram cache over the known words of the context (prompt
  // plus generated tokens) mixed into the n-gram distribution. 0 disables the cache and
  // gives a plain add-k n-gram model.
  double cache_weight = 0.0;
};

// Add-k smoothed n-gram language model with longest-suffix backoff.
//
// For a context, the longest suffix of length order-1 .. 1 that was seen in
// training selects the count row (order 1 always uses the unigram row):
//
//   P(j | ctx) = (count(suffix, j) + k) / (total(suffix) + k * |V|)
//
// When no suffix was seen, all counts are zero and P is uniform. With a
// cache weight w, the result is (1 - w) * P + w * c_j / |ctx| where c_j counts
// occurrences of j in the context and |ctx| excludes "<unk>" and kBosId
// (neither is cached). Logits are the exact natural-log
// probabilities, so a softmax at temperature 1 recovers the model.
//
// The vocabulary holds "</s>", "<unk>" and then every training word with
// frequency >= min_count in lexicographic order. Sentence-start padding uses
// kBosId, which is not a vocabulary entry.
class NGramModel final : public TokenScorer {
 public:
  // Throws InvalidParameterError for bad options, InvalidInputError for an
  // empty corpus.
  static NGramModel Train(std::span<const Document> corpus,
                          const NGramOptions& options);

  static NGramModel Load(const std::string& path);
  void Save(const std::string& path) const;
  std::string Serialize() const;
  static NGramModel Deserialize(const std::string& text);

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogitVector NextLogits(std::span<const TokenId> context) const override;
  std::optional<TokenId> eos_id() const override { return kEos; }
  TokenId unk_id() const override { return kUnk; }
  bool concurrent_safe() const override { return true; }

  const NGramOptions& options() const { return options_; }
  // Same as exp(NextLogits(context)[token]).
  double Probability(std::span<const TokenId> context, TokenId token) const;

  static constexpr TokenId kEos = 0;
  static constexpr TokenId kUnk = 1;

 private:
  struct Row {
    std::int64_t total = 0;
    std::vector<std::pair<TokenId, std::int64_t>> counts;  // sorted by id
  };
  using Table = std::unordered_map<std::string, Row>;

  NGramModel() = default;
  static std::string Key(std::span<const TokenId> ids);
  const Row* FindRow(std::span<const TokenId> context) const;
  void Validate() const;

  NGramOptions options_;
  Vocabulary vocab_;
  // tables_[L] holds rows keyed by contexts of length L.
  std::vector<Table> tables_;
};

}  // namespace ldptext

#endif  // LDPTEXT_NGRAM_MODEL_H_
