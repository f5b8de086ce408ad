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

#ifndef LDPTEXT_SCORER_H_
#define LDPTEXT_SCORER_H_

#include <optional>
#include <span>

#include "ldptext/types.h"

namespace ldptext {

// Source of next-token logits for the decoder. NextLogits must return
// vocabulary().size() finite values and be a pure function of the context.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual LogitVector NextLogits(std::span<const TokenId> context) const = 0;
  virtual std::optional<TokenId> eos_id() const = 0;
  // Id used for words outside the vocabulary when tokenizing prompts.
  virtual TokenId unk_id() const = 0;
  // True when NextLogits may be called from several threads at once.
  virtual bool concurrent_safe() const = 0;
};

}  // namespace ldptext

#endif  // LDPTEXT_SCORER_H_
