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

#ifndef LDPTEXT_TESTS_TEST_UTIL_H_
#define LDPTEXT_TESTS_TEST_UTIL_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldptext/scorer.h"
#include "ldptext/types.h"

namespace ldptext::testing {

// Scorer whose logits are a caller-supplied function of the context.
class FunctionScorer final : public TokenScorer {
 public:
  using Fn = std::function<LogitVector(std::span<const TokenId>)>;

  FunctionScorer(std::vector<std::string> tokens, Fn fn,
                 std::optional<TokenId> eos = std::nullopt, TokenId unk = 0)
      : vocab_(std::move(tokens)), fn_(std::move(fn)), eos_(eos), unk_(unk) {}

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogitVector NextLogits(std::span<const TokenId> context) const override {
    return fn_(context);
  }
  std::optional<TokenId> eos_id() const override { return eos_; }
  TokenId unk_id() const override { return unk_; }
  bool concurrent_safe() const override { return true; }

 private:
  Vocabulary vocab_;
  Fn fn_;
  std::optional<TokenId> eos_;
  TokenId unk_;
};

inline double TotalVariation(std::span<const double> p,
                             std::span<const double> q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2.0;
}

}  // namespace ldptext::testing

#endif  // LDPTEXT_TESTS_TEST_UTIL_H_
