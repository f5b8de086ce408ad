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

#ifndef LDPTEXT_TOKENIZER_H_
#define LDPTEXT_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldptext/types.h"

namespace ldptext {

inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";
// Left padding in n-gram contexts. Never a predictable vocabulary entry.
inline constexpr TokenId kBosId = -1;

// Lowercases and splits on whitespace; every ASCII punctuation character
// becomes its own token. "Good movie!" -> {"good", "movie", "!"}.
std::vector<std::string> SplitWords(std::string_view text);

// SplitWords, then maps each word to its id; unknown words map to unk.
std::vector<TokenId> Tokenize(std::string_view text, const Vocabulary& vocab,
                              TokenId unk);

// Joins with single spaces; closing punctuation (. , ! ? ; : ) ]) attaches
// to the previous token.
std::string Detokenize(std::span<const std::string> tokens);

// Id form. Drops end-of-sequence markers.
std::string Detokenize(std::span<const TokenId> ids, const Vocabulary& vocab);

// Replaces the single "{doc}" placeholder in 'prompt_template' with the
// document text. Throws InvalidTemplateError unless exactly one placeholder
// is present.
std::string GeneratePrompt(const Document& doc, std::string_view prompt_template);

inline constexpr std::string_view kDocPlaceholder = "{doc}";

}  // namespace ldptext

#endif  // LDPTEXT_TOKENIZER_H_
