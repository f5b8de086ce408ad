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

#ifndef LDPTEXT_TYPES_H_
#define LDPTEXT_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ldptext {

using TokenId = std::int32_t;

// Per-token real-valued scores, one entry per vocabulary id.
using LogitVector = std::vector<double>;

// Dense token-id space. Ids are 0..size()-1 in construction order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws InvalidInputError on duplicate tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // FNV-1a 64 over the newline-joined token list, as 16 hex digits. Used to
  // detect reuse of bounds or endpoints against a different vocabulary.
  std::string hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

struct Document {
  std::string doc_id;
  std::string text;
  int author_label = 0;
  int utility_label = 0;
};

// Per-coordinate logit clipping interval [lower_j, upper_j].
class ClipBounds {
 public:
  ClipBounds(std::vector<double> lower, std::vector<double> upper);
  static ClipBounds Scalar(std::size_t size, double lower, double upper);

  std::size_t size() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  // max_j (upper_j - lower_j).
  double width() const { return width_; }

  friend bool operator==(const ClipBounds& a, const ClipBounds& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_;
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double width_ = 0.0;
};

// Privacy level of a release. Unbounded means no finite guarantee applies
// (clipping disabled, top-k filtering, ...).
class Epsilon {
 public:
  static Epsilon Unbounded() { return Epsilon(); }
  static Epsilon Of(double value);

  bool bounded() const { return value_.has_value(); }
  double value() const { return value_.value(); }
  // "inf" for unbounded, otherwise shortest round-trip decimal.
  std::string ToString() const;

  friend bool operator==(const Epsilon& a, const Epsilon& b) {
    return a.value_ == b.value_;
  }

 private:
  Epsilon() = default;
  std::optional<double> value_;
};

enum class Granularity { kWord, kSentence, kDocument };
std::string_view GranularityName(Granularity g);

struct PrivacyReport {
  std::string mechanism;
  Granularity granularity = Granularity::kDocument;
  Epsilon epsilon = Epsilon::Unbounded();
  std::map<std::string, std::string> parameters;
};

struct SanitizedDocument {
  std::string source_doc_id;
  std::string text;
  // Sampled scorer ids (DP-Prompt only).
  std::vector<TokenId> token_ids;
  // Output tokens as strings, one per emitted token.
  std::vector<std::string> tokens;
  PrivacyReport report;
};

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

// FNV-1a 64, as 16 lowercase hex digits.
std::string Fnv1a64Hex(std::string_view bytes);

}  // namespace ldptext

#endif  // LDPTEXT_TYPES_H_
