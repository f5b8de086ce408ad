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

#ifndef LDPTEXT_EMBEDDING_TABLE_H_
#define LDPTEXT_EMBEDDING_TABLE_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldptext/types.h"

namespace ldptext {

// One "key v_1 ... v_d" record of a plain-text vector file.
struct VectorRecord {
  std::string key;
  std::vector<double> values;
  std::size_t line = 0;  // 1-based source line when read from a file
};

// Reads a whitespace-separated vector file. Every line must carry the same
// number of finite values. Throws ParseError naming the offending line.
std::vector<VectorRecord> ReadVectorFile(const std::string& path);
void WriteVectorFile(const std::string& path,
                     std::span<const VectorRecord> records);

// Word -> d-dimensional vector store. Row order is file order. Squared row
// norms are cached so nearest-neighbor search needs one dot product per row.
class EmbeddingTable {
 public:
  // 'matrix' is row-major |words| x dim. Throws InvalidInputError unless
  // there are at least two finite rows and dim >= 1.
  EmbeddingTable(Vocabulary words, std::vector<double> matrix, std::size_t dim);

  // Duplicate words are an error unless last_wins is set, in which case the
  // later line replaces the earlier vector (keeping the first position).
  static EmbeddingTable Load(const std::string& path, bool last_wins = false);
  void Save(const std::string& path) const;

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  const Vocabulary& words() const { return words_; }
  std::span<const double> row(TokenId id) const {
    return {matrix_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  double squared_norm(TokenId id) const { return norms_[id]; }

  // Exact Euclidean nearest row; ties go to the lowest id.
  TokenId Nearest(std::span<const double> v) const;
  // Euclidean distance between two rows.
  double Distance(TokenId a, TokenId b) const;
  // Distances from row 'a' to every row.
  std::vector<double> DistancesFrom(TokenId a) const;

 private:
  Vocabulary words_;
  std::vector<double> matrix_;
  std::size_t dim_;
  std::vector<double> norms_;
};

}  // namespace ldptext

#endif  // LDPTEXT_EMBEDDING_TABLE_H_
