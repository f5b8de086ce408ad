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

#ifndef LDPTEXT_CORPUS_H_
#define LDPTEXT_CORPUS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldptext/embedding_table.h"
#include "ldptext/types.h"

namespace ldptext {

// A validated document collection with its label maps. Document labels are
// indices into author_labels / utility_labels.
struct Corpus {
  std::vector<Document> docs;
  std::vector<std::string> author_labels;
  std::vector<std::string> utility_labels;

  std::vector<double> AuthorFractions() const;
  std::vector<double> UtilityFractions() const;
};

// Corpus files are JSON Lines, one record per line:
//
//   {"doc_id": "d1", "text": "...", "author_label": "alice",
//    "utility_label": "pos"}
//
// Label maps live in a sidecar "<path>.labels.json":
//
//   {"author_labels": [...], "utility_labels": [...]}
//
// When the sidecar exists, every record's labels must be declared in it and
// ids follow its order; otherwise the maps are the sorted observed labels.
// Throws ParseError naming the line for malformed records, empty text,
// duplicate ids or undeclared labels.
Corpus IngestCorpus(const std::string& path);
std::string LabelSidecarPath(const std::string& corpus_path);

// Writes the corpus and its sidecar.
void WriteCorpus(const std::string& path, const Corpus& corpus);

// Throws InvalidInputError when a doc_id appears in both corpora.
void RequireDisjoint(std::span<const Document> public_docs,
                     std::span<const Document> private_docs);

// Mixture-of-unigrams generator. Every document has an author and a
// sentiment label (both assigned round-robin, so classes are balanced).
// Each token is drawn independently:
//
//   with prob style_rate:    a style word. With prob style_strength from the
//                            author's own pool, otherwise uniformly from the
//                            union of all authors' pools.
//   with prob polarity_rate: uniformly from the sentiment's polarity pool,
//                            shared by all authors.
//   otherwise:               a filler word, Zipf(1) over the filler pool.
//
// Pools are disjoint, so at style_strength 1 authors have disjoint style
// vocabularies and at 0 they are identically distributed. Sentences end
// with "." every 8 to 14 words.
struct SyntheticOptions {
  int n_authors = 2;
  int n_docs = 2000;
  double style_strength = 1.0;
  std::uint64_t seed = 1;
  int n_sentiments = 2;
  int filler_words = 300;
  int style_words_per_author = 25;
  int polarity_words_per_label = 25;
  int min_length = 30;
  int max_length = 50;
  double style_rate = 0.08;
  double polarity_rate = 0.3;
  std::string id_prefix = "doc";
};

Corpus MakeSyntheticCorpus(const SyntheticOptions& options);
Corpus MakeSyntheticCorpus(int n_authors, int n_docs, double style_strength,
                           std::uint64_t seed);

// Word vectors for the generator's lexicon: each pool (filler, every
// author's style pool, every polarity pool) gets a random centre and its
// words scatter around it, so word mechanisms tend to swap words within a
// pool. Punctuation is included.
EmbeddingTable MakeSyntheticEmbeddings(const SyntheticOptions& options,
                                       std::size_t dim, std::uint64_t seed);

}  // namespace ldptext

#endif  // LDPTEXT_CORPUS_H_
