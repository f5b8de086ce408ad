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

#include "ldptext/embedding_table.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "ldptext/errors.h"

namespace ldptext {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<VectorRecord> ReadVectorFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  std::vector<VectorRecord> records;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    auto skip_ws = [&] {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
    };
    skip_ws();
    const char* key_begin = p;
    while (p < end && *p != ' ' && *p != '\t') ++p;
    VectorRecord rec{std::string(key_begin, p), {}, lineno};
    skip_ws();
    while (p < end) {
      double x;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        throw ParseError(path, lineno, "bad number");
      }
      if (!std::isfinite(x)) throw ParseError(path, lineno, "non-finite value");
      rec.values.push_back(x);
      p = next;
      skip_ws();
    }
    if (rec.values.empty()) throw ParseError(path, lineno, "no values");
    if (dim == 0) {
      dim = rec.values.size();
    } else if (rec.values.size() != dim) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(dim) + " values, got " +
                           std::to_string(rec.values.size()));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void WriteVectorFile(const std::string& path,
                     std::span<const VectorRecord> records) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  for (const auto& r : records) {
    out << r.key;
    for (double x : r.values) out << ' ' << FormatDouble(x);
    out << '\n';
  }
}

EmbeddingTable::EmbeddingTable(Vocabulary words, std::vector<double> matrix,
                               std::size_t dim)
    : words_(std::move(words)), matrix_(std::move(matrix)), dim_(dim) {
  if (dim_ < 1) throw InvalidInputError("embedding dimension must be >= 1");
  if (words_.size() < 2) {
    throw InvalidInputError("embedding table needs at least two words");
  }
  if (matrix_.size() != words_.size() * dim_) {
    throw InvalidInputError("embedding matrix shape mismatch");
  }
  for (double x : matrix_) {
    if (!std::isfinite(x)) throw InvalidInputError("non-finite embedding");
  }
  norms_.resize(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto r = row(static_cast<TokenId>(i));
    norms_[i] = Dot(r, r);
  }
}

EmbeddingTable EmbeddingTable::Load(const std::string& path, bool last_wins) {
  auto records = ReadVectorFile(path);
  if (records.empty()) throw ParseError(path, 0, "empty embedding file");
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    auto it = seen.find(r.key);
    if (it != seen.end()) {
      if (!last_wins) {
        throw ParseError(path, r.line, "duplicate token '" + r.key + "'");
      }
      rows[it->second] = std::move(r.values);
      continue;
    }
    seen.emplace(r.key, tokens.size());
    tokens.push_back(r.key);
    rows.push_back(std::move(r.values));
  }
  const std::size_t dim = rows.front().size();
  std::vector<double> matrix;
  matrix.reserve(rows.size() * dim);
  for (const auto& r : rows) matrix.insert(matrix.end(), r.begin(), r.end());
  return EmbeddingTable(Vocabulary(std::move(tokens)), std::move(matrix), dim);
}

void EmbeddingTable::Save(const std::string& path) const {
  std::vector<VectorRecord> records;
  records.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto r = row(static_cast<TokenId>(i));
    records.push_back({words_.token(static_cast<TokenId>(i)),
                       std::vector<double>(r.begin(), r.end()), 0});
  }
  WriteVectorFile(path, records);
}

TokenId EmbeddingTable::Nearest(std::span<const double> v) const {
  if (v.size() != dim_) throw InvalidInputError("query dimension mismatch");
  // ||v - w||^2 = ||v||^2 - 2 v.w + ||w||^2; the first term is constant.
  const std::size_t n = size();
  std::vector<double> score(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    score[i] = norms_[i] - 2.0 * Dot(v, row(static_cast<TokenId>(i)));
    best = std::min(best, score[i]);
  }
  // The expanded form rounds differently per row; re-rank near-ties on the
  // direct difference so exact ties resolve to the lowest id.
  const double vv = Dot(v, v);
  const double tol = 1e-9 * (1.0 + vv + std::abs(best));
  TokenId arg = -1;
  double arg_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (score[i] > best + tol) continue;
    const double d = SquaredDistance(v, row(static_cast<TokenId>(i)));
    if (d < arg_dist) {
      arg_dist = d;
      arg = static_cast<TokenId>(i);
    }
  }
  return arg;
}

double EmbeddingTable::Distance(TokenId a, TokenId b) const {
  return std::sqrt(SquaredDistance(row(a), row(b)));
}

std::vector<double> EmbeddingTable::DistancesFrom(TokenId a) const {
  std::vector<double> out(size());
  auto ra = row(a);
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = std::sqrt(SquaredDistance(ra, row(static_cast<TokenId>(i))));
  }
  return out;
}

}  // namespace ldptext
