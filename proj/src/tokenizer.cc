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

#include "ldptext/tokenizer.h"

#include <cctype>

#include "ldptext/errors.h"

namespace ldptext {
namespace {

bool IsPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool AttachesLeft(std::string_view token) {
  return token.size() == 1 &&
         std::string_view(".,!?;:)]").find(token[0]) != std::string_view::npos;
}

}  // namespace

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (unsigned char c : text) {
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (IsPunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                              : static_cast<char>(c));
    }
  }
  flush();
  return out;
}

std::vector<TokenId> Tokenize(std::string_view text, const Vocabulary& vocab,
                              TokenId unk) {
  std::vector<TokenId> ids;
  for (const auto& w : SplitWords(text)) {
    auto id = vocab.find(w);
    ids.push_back(id ? *id : unk);
  }
  return ids;
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !AttachesLeft(t)) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string Detokenize(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId id : ids) {
    if (id < 0) continue;
    const std::string& t = vocab.token(id);
    if (t == kEosToken) continue;
    tokens.push_back(t);
  }
  return Detokenize(tokens);
}

std::string GeneratePrompt(const Document& doc,
                           std::string_view prompt_template) {
  auto first = prompt_template.find(kDocPlaceholder);
  if (first == std::string_view::npos) {
    throw InvalidTemplateError("prompt template has no {doc} placeholder");
  }
  if (prompt_template.find(kDocPlaceholder, first + 1) !=
      std::string_view::npos) {
    throw InvalidTemplateError("prompt template has more than one {doc}");
  }
  std::string out(prompt_template.substr(0, first));
  out += doc.text;
  out += prompt_template.substr(first + kDocPlaceholder.size());
  return out;
}

}  // namespace ldptext
