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

#include "ldptext/ngram_model.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ldptext/errors.h"
#include "ldptext/tokenizer.h"

namespace ldptext {
namespace {

constexpr int kFormatVersion = 1;

void CheckOptions(const NGramOptions& o) {
  if (o.order < 1) throw InvalidParameterError("n-gram order must be >= 1");
  if (!(o.add_k > 0.0)) throw InvalidParameterError("add_k must be > 0");
  if (o.min_count < 1) throw InvalidParameterError("min_count must be >= 1");
  if (!(o.cache_weight >= 0.0 && o.cache_weight < 1.0)) {
    throw InvalidParameterError("cache_weight must be in [0, 1)");
  }
}

}  // namespace

std::string NGramModel::Key(std::span<const TokenId> ids) {
  std::string key(ids.size() * sizeof(TokenId), '\0');
  if (!ids.empty()) std::memcpy(key.data(), ids.data(), key.size());
  return key;
}

NGramModel NGramModel::Train(std::span<const Document> corpus,
                             const NGramOptions& options) {
  CheckOptions(options);
  if (corpus.empty()) throw InvalidInputError("n-gram training corpus is empty");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  std::map<std::string, std::int64_t> freq;
  for (const auto& d : corpus) {
    docs.push_back(SplitWords(d.text));
    for (const auto& w : docs.back()) ++freq[w];
  }
  std::vector<std::string> tokens{std::string(kEosToken),
                                  std::string(kUnkToken)};
  for (const auto& [w, c] : freq) {
    if (c >= options.min_count && w != kEosToken && w != kUnkToken) {
      tokens.push_back(w);
    }
  }

  NGramModel model;
  model.options_ = options;
  model.vocab_ = Vocabulary(std::move(tokens));
  model.tables_.assign(options.order, {});

  const int pad = options.order - 1;
  std::vector<std::map<std::string, std::map<TokenId, std::int64_t>>> raw(
      options.order);
  for (const auto& words : docs) {
    std::vector<TokenId> seq(pad, kBosId);
    for (const auto& w : words) {
      auto id = model.vocab_.find(w);
      seq.push_back(id ? *id : kUnk);
    }
    seq.push_back(kEos);
    for (std::size_t i = pad; i < seq.size(); ++i) {
      const TokenId target = seq[i];
      if (options.order == 1) {
        ++raw[0][""][target];
        continue;
      }
      for (int len = 1; len <= pad; ++len) {
        std::span<const TokenId> ctx(seq.data() + i - len, len);
        ++raw[len][Key(ctx)][target];
      }
    }
  }
  for (std::size_t len = 0; len < raw.size(); ++len) {
    for (auto& [key, counts] : raw[len]) {
      Row row;
      for (auto [id, c] : counts) {
        row.counts.emplace_back(id, c);
        row.total += c;
      }
      model.tables_[len].emplace(key, std::move(row));
    }
  }
  return model;
}

const NGramModel::Row* NGramModel::FindRow(
    std::span<const TokenId> context) const {
  if (options_.order == 1) {
    auto it = tables_[0].find("");
    return it == tables_[0].end() ? nullptr : &it->second;
  }
  const int pad = options_.order - 1;
  // Context padded on the left with BOS to length order-1.
  std::vector<TokenId> tail(pad, kBosId);
  const std::size_t take = std::min<std::size_t>(pad, context.size());
  std::copy(context.end() - take, context.end(), tail.end() - take);
  for (int len = pad; len >= 1; --len) {
    std::span<const TokenId> suffix(tail.data() + pad - len, len);
    auto it = tables_[len].find(Key(suffix));
    if (it != tables_[len].end()) return &it->second;
  }
  return nullptr;
}

LogitVector NGramModel::NextLogits(std::span<const TokenId> context) const {
  const std::size_t v = vocab_.size();
  const Row* row = FindRow(context);
  const double k = options_.add_k;
  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double denom = total + k * static_cast<double>(v);
  const double w = options_.cache_weight;

  std::vector<std::int64_t> cache;
  std::size_t cache_len = 0;
  if (w > 0.0) {
    cache.assign(v, 0);
    for (TokenId id : context) {
      if (id >= 0 && static_cast<std::size_t>(id) < v && id != kUnk) {
        ++cache[id];
        ++cache_len;
      }
    }
  }
  const double mix = cache_len > 0 ? w : 0.0;

  const double base = (1.0 - mix) * k / denom;
  LogitVector logits(v, std::log(base));
  std::vector<double> probs(v, base);
  std::vector<TokenId> touched;
  if (row != nullptr) {
    for (auto [id, c] : row->counts) {
      probs[id] = (1.0 - mix) * (static_cast<double>(c) + k) / denom;
      touched.push_back(id);
    }
  }
  if (mix > 0.0) {
    for (std::size_t j = 0; j < v; ++j) {
      if (cache[j] == 0) continue;
      probs[j] += mix * static_cast<double>(cache[j]) /
                  static_cast<double>(cache_len);
      touched.push_back(static_cast<TokenId>(j));
    }
  }
  for (TokenId id : touched) logits[id] = std::log(probs[id]);
  return logits;
}

double NGramModel::Probability(std::span<const TokenId> context,
                               TokenId token) const {
  return std::exp(NextLogits(context).at(token));
}

std::string NGramModel::Serialize() const {
  nlohmann::ordered_json j;
  j["format"] = "ldptext-ngram";
  j["version"] = kFormatVersion;
  j["order"] = options_.order;
  j["add_k"] = options_.add_k;
  j["min_count"] = options_.min_count;
  j["cache_weight"] = options_.cache_weight;
  j["vocabulary"] = vocab_.tokens();
  auto tables = nlohmann::ordered_json::array();
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    // Sorted for a stable byte layout.
    std::map<std::vector<TokenId>, const Row*> sorted;
    for (const auto& [key, row] : tables_[len]) {
      std::vector<TokenId> ids(key.size() / sizeof(TokenId));
      if (!ids.empty()) std::memcpy(ids.data(), key.data(), key.size());
      sorted.emplace(std::move(ids), &row);
    }
    auto rows = nlohmann::ordered_json::array();
    for (const auto& [ids, row] : sorted) {
      nlohmann::ordered_json r;
      r["context"] = ids;
      auto counts = nlohmann::ordered_json::array();
      for (auto [id, c] : row->counts) counts.push_back({id, c});
      r["counts"] = std::move(counts);
      rows.push_back(std::move(r));
    }
    tables.push_back({{"length", len}, {"rows", std::move(rows)}});
  }
  j["tables"] = std::move(tables);
  return j.dump();
}

NGramModel NGramModel::Deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("ngram model", 0, e.what());
  }
  try {
    if (j.at("format") != "ldptext-ngram") {
      throw ParseError("ngram model", 0, "not an ldptext n-gram model");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ParseError("ngram model", 0, "unsupported model version");
    }
    NGramModel model;
    model.options_.order = j.at("order").get<int>();
    model.options_.add_k = j.at("add_k").get<double>();
    model.options_.min_count = j.at("min_count").get<int>();
    model.options_.cache_weight = j.at("cache_weight").get<double>();
    CheckOptions(model.options_);
    model.vocab_ =
        Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    model.tables_.assign(model.options_.order, {});
    for (const auto& t : j.at("tables")) {
      const auto len = t.at("length").get<std::size_t>();
      if (len >= model.tables_.size()) {
        throw ParseError("ngram model", 0, "table length out of range");
      }
      for (const auto& r : t.at("rows")) {
        auto ids = r.at("context").get<std::vector<TokenId>>();
        if (ids.size() != len) {
          throw ParseError("ngram model", 0, "context length mismatch");
        }
        Row row;
        for (const auto& c : r.at("counts")) {
          row.counts.emplace_back(c.at(0).get<TokenId>(),
                                  c.at(1).get<std::int64_t>());
          row.total += row.counts.back().second;
        }
        model.tables_[len].emplace(Key(ids), std::move(row));
      }
    }
    model.Validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("ngram model", 0, e.what());
  }
}

void NGramModel::Validate() const {
  if (vocab_.size() < 2 || vocab_.token(kEos) != kEosToken ||
      vocab_.token(kUnk) != kUnkToken) {
    throw ParseError("ngram model", 0, "reserved tokens missing");
  }
  const auto v = static_cast<TokenId>(vocab_.size());
  for (const auto& table : tables_) {
    for (const auto& [key, row] : table) {
      for (auto [id, c] : row.counts) {
        if (id < 0 || id >= v || c < 1) {
          throw ParseError("ngram model", 0, "invalid count entry");
        }
      }
    }
  }
}

void NGramModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << Serialize();
}

NGramModel NGramModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Deserialize(ss.str());
}

}  // namespace ldptext
