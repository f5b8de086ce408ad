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

#include "ldptext/types.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "ldptext/errors.h"

namespace ldptext {

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw InvalidInputError("duplicate vocabulary token '" + tokens_[i] +
                              "'");
    }
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::hash() const {
  std::string joined;
  for (const auto& t : tokens_) {
    joined += t;
    joined += '\n';
  }
  return Fnv1a64Hex(joined);
}

std::string Fnv1a64Hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ClipBounds::ClipBounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw InvalidInputError("clip bounds: lower and upper differ in length");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j])) {
      throw InvalidInputError("clip bounds: non-finite entry at " +
                              std::to_string(j));
    }
    if (lower_[j] > upper_[j]) {
      throw InvalidInputError("clip bounds: lower > upper at " +
                              std::to_string(j));
    }
    width_ = std::max(width_, upper_[j] - lower_[j]);
  }
}

ClipBounds ClipBounds::Scalar(std::size_t size, double lower, double upper) {
  return ClipBounds(std::vector<double>(size, lower),
                    std::vector<double>(size, upper));
}

Epsilon Epsilon::Of(double value) {
  if (!(value >= 0.0) || std::isinf(value)) {
    throw InvalidParameterError("epsilon must be finite and nonnegative");
  }
  Epsilon e;
  e.value_ = value;
  return e;
}

std::string Epsilon::ToString() const {
  return bounded() ? FormatDouble(*value_) : "inf";
}

std::string_view GranularityName(Granularity g) {
  switch (g) {
    case Granularity::kWord:
      return "word";
    case Granularity::kSentence:
      return "sentence";
    case Granularity::kDocument:
      return "document";
  }
  return "unknown";
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace ldptext
