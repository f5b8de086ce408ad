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

#include "ldptext/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "ldptext/errors.h"
#include "ldptext/rng.h"

namespace ldptext {
namespace {

std::vector<double> Fractions(std::span<const Document> docs, bool author,
                              std::size_t classes) {
  std::vector<double> f(classes, 0.0);
  if (docs.empty()) return f;
  for (const auto& d : docs) f[author ? d.author_label : d.utility_label] += 1;
  for (double& x : f) x /= static_cast<double>(docs.size());
  return f;
}

// Pronounceable pseudo-word for an index, unique per prefix.
std::string PseudoWord(std::string_view prefix, int index) {
  static constexpr std::string_view kOnset[] = {"b", "d", "f", "g", "k", "l",
                                                "m", "n", "p", "r", "s", "t",
                                                "v", "z"};
  static constexpr std::string_view kVowel[] = {"a", "e", "i", "o", "u"};
  std::string out(prefix);
  int x = index;
  do {
    out += kOnset[x % 14];
    x /= 14;
    out += kVowel[x % 5];
    x /= 5;
  } while (x > 0);
  return out;
}

struct Lexicon {
  std::vector<std::string> filler;
  std::vector<std::vector<std::string>> style;     // per author
  std::vector<std::vector<std::string>> polarity;  // per sentiment
};

Lexicon MakeLexicon(const SyntheticOptions& o) {
  Lexicon lex;
  for (int i = 0; i < o.filler_words; ++i) lex.filler.push_back(PseudoWord("", i));
  lex.style.resize(o.n_authors);
  for (int a = 0; a < o.n_authors; ++a) {
    for (int i = 0; i < o.style_words_per_author; ++i) {
      lex.style[a].push_back(
          PseudoWord("", 100000 + a * o.style_words_per_author + i));
    }
  }
  lex.polarity.resize(o.n_sentiments);
  for (int s = 0; s < o.n_sentiments; ++s) {
    for (int i = 0; i < o.polarity_words_per_label; ++i) {
      lex.polarity[s].push_back(
          PseudoWord("", 200000 + s * o.polarity_words_per_label + i));
    }
  }
  return lex;
}

void CheckOptions(const SyntheticOptions& o) {
  if (o.n_authors < 2) throw InvalidParameterError("need at least two authors");
  if (o.n_sentiments < 1 || o.n_docs < 1 || o.filler_words < 1 ||
      o.style_words_per_author < 1 || o.polarity_words_per_label < 1 ||
      o.min_length < 1 || o.max_length < o.min_length) {
    throw InvalidParameterError("invalid synthetic corpus options");
  }
  if (!(o.style_strength >= 0.0 && o.style_strength <= 1.0) ||
      o.style_rate < 0 || o.polarity_rate < 0 ||
      o.style_rate + o.polarity_rate > 1.0) {
    throw InvalidParameterError("synthetic corpus rates out of range");
  }
}

}  // namespace

std::vector<double> Corpus::AuthorFractions() const {
  return Fractions(docs, true, author_labels.size());
}

std::vector<double> Corpus::UtilityFractions() const {
  return Fractions(docs, false, utility_labels.size());
}

std::string LabelSidecarPath(const std::string& corpus_path) {
  return corpus_path + ".labels.json";
}

Corpus IngestCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);

  std::optional<std::vector<std::string>> declared_authors, declared_utility;
  const std::string sidecar = LabelSidecarPath(path);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream s(sidecar);
    try {
      auto j = nlohmann::json::parse(s);
      declared_authors = j.at("author_labels").get<std::vector<std::string>>();
      declared_utility = j.at("utility_labels").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(sidecar, 0, e.what());
    }
  }

  struct Raw {
    Document doc;
    std::string author, utility;
    std::size_t line;
  };
  std::vector<Raw> raw;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Raw r;
    r.line = lineno;
    try {
      auto j = nlohmann::json::parse(line);
      r.doc.doc_id = j.at("doc_id").get<std::string>();
      r.doc.text = j.at("text").get<std::string>();
      r.author = j.at("author_label").get<std::string>();
      r.utility = j.at("utility_label").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
    if (r.doc.doc_id.empty()) throw ParseError(path, lineno, "empty doc_id");
    if (r.doc.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw ParseError(path, lineno, "empty text");
    }
    if (!ids.insert(r.doc.doc_id).second) {
      throw ParseError(path, lineno, "duplicate doc_id '" + r.doc.doc_id + "'");
    }
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw ParseError(path, 0, "corpus has no records");

  Corpus corpus;
  if (declared_authors) {
    corpus.author_labels = *declared_authors;
    corpus.utility_labels = *declared_utility;
  } else {
    std::set<std::string> a, u;
    for (const auto& r : raw) {
      a.insert(r.author);
      u.insert(r.utility);
    }
    corpus.author_labels.assign(a.begin(), a.end());
    corpus.utility_labels.assign(u.begin(), u.end());
  }
  auto index_of = [](const std::vector<std::string>& labels) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < labels.size(); ++i) m.emplace(labels[i], i);
    return m;
  };
  const auto author_ids = index_of(corpus.author_labels);
  const auto utility_ids = index_of(corpus.utility_labels);
  for (auto& r : raw) {
    auto a = author_ids.find(r.author);
    auto u = utility_ids.find(r.utility);
    if (a == author_ids.end()) {
      throw ParseError(path, r.line, "undeclared author label '" + r.author + "'");
    }
    if (u == utility_ids.end()) {
      throw ParseError(path, r.line,
                       "undeclared utility label '" + r.utility + "'");
    }
    r.doc.author_label = a->second;
    r.doc.utility_label = u->second;
    corpus.docs.push_back(std::move(r.doc));
  }
  return corpus;
}

void WriteCorpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  for (const auto& d : corpus.docs) {
    nlohmann::ordered_json j;
    j["doc_id"] = d.doc_id;
    j["text"] = d.text;
    j["author_label"] = corpus.author_labels.at(d.author_label);
    j["utility_label"] = corpus.utility_labels.at(d.utility_label);
    out << j.dump() << '\n';
  }
  std::ofstream side(LabelSidecarPath(path));
  if (!side) throw InvalidInputError("cannot write " + LabelSidecarPath(path));
  nlohmann::ordered_json labels;
  labels["author_labels"] = corpus.author_labels;
  labels["utility_labels"] = corpus.utility_labels;
  side << labels.dump(2) << '\n';
}

void RequireDisjoint(std::span<const Document> public_docs,
                     std::span<const Document> private_docs) {
  std::unordered_set<std::string> priv;
  for (const auto& d : private_docs) priv.insert(d.doc_id);
  for (const auto& d : public_docs) {
    if (priv.contains(d.doc_id)) {
      throw InvalidInputError("public and private corpora share doc_id '" +
                              d.doc_id + "'");
    }
  }
}

Corpus MakeSyntheticCorpus(const SyntheticOptions& o) {
  CheckOptions(o);
  const Lexicon lex = MakeLexicon(o);
  std::vector<double> zipf_cdf(lex.filler.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < zipf_cdf.size(); ++i) {
    acc += 1.0 / static_cast<double>(i + 1);
    zipf_cdf[i] = acc;
  }
  for (double& c : zipf_cdf) c /= acc;

  Corpus corpus;
  for (int a = 0; a < o.n_authors; ++a) {
    corpus.author_labels.push_back("author" + std::to_string(a));
  }
  for (int s = 0; s < o.n_sentiments; ++s) {
    corpus.utility_labels.push_back(o.n_sentiments == 2
                                        ? (s == 0 ? "negative" : "positive")
                                        : "label" + std::to_string(s));
  }
  const int style_total = o.n_authors * o.style_words_per_author;
  for (int i = 0; i < o.n_docs; ++i) {
    RngStream rng(o.seed, StreamId({0x5e7, static_cast<std::uint64_t>(i)}));
    Document d;
    char id[32];
    std::snprintf(id, sizeof(id), "%06d", i);
    d.doc_id = o.id_prefix + id;
    d.author_label = i % o.n_authors;
    d.utility_label = (i / o.n_authors) % o.n_sentiments;
    const int length =
        o.min_length +
        static_cast<int>(rng.UniformInt(o.max_length - o.min_length + 1));
    int until_period = 8 + static_cast<int>(rng.UniformInt(7));
    for (int t = 0; t < length; ++t) {
      const double u = rng.Uniform();
      const std::string* word;
      if (u < o.style_rate) {
        if (rng.Uniform() < o.style_strength) {
          const auto& pool = lex.style[d.author_label];
          word = &pool[rng.UniformInt(pool.size())];
        } else {
          const auto k = static_cast<int>(rng.UniformInt(style_total));
          word = &lex.style[k / o.style_words_per_author]
                           [k % o.style_words_per_author];
        }
      } else if (u < o.style_rate + o.polarity_rate) {
        const auto& pool = lex.polarity[d.utility_label];
        word = &pool[rng.UniformInt(pool.size())];
      } else {
        const double z = rng.Uniform();
        auto it = std::upper_bound(zipf_cdf.begin(), zipf_cdf.end(), z);
        word = &lex.filler[std::min<std::size_t>(it - zipf_cdf.begin(),
                                                 lex.filler.size() - 1)];
      }
      if (!d.text.empty()) d.text += ' ';
      d.text += *word;
      if (--until_period == 0 || t + 1 == length) {
        d.text += '.';
        until_period = 8 + static_cast<int>(rng.UniformInt(7));
      }
    }
    corpus.docs.push_back(std::move(d));
  }
  return corpus;
}

Corpus MakeSyntheticCorpus(int n_authors, int n_docs, double style_strength,
                           std::uint64_t seed) {
  SyntheticOptions o;
  o.n_authors = n_authors;
  o.n_docs = n_docs;
  o.style_strength = style_strength;
  o.seed = seed;
  return MakeSyntheticCorpus(o);
}

EmbeddingTable MakeSyntheticEmbeddings(const SyntheticOptions& options,
                                       std::size_t dim, std::uint64_t seed) {
  CheckOptions(options);
  const Lexicon lex = MakeLexicon(options);
  std::vector<const std::vector<std::string>*> pools{&lex.filler};
  for (const auto& p : lex.style) pools.push_back(&p);
  for (const auto& p : lex.polarity) pools.push_back(&p);
  const std::vector<std::string> punct{"."};
  pools.push_back(&punct);

  std::vector<std::string> words;
  std::vector<double> matrix;
  for (std::size_t g = 0; g < pools.size(); ++g) {
    RngStream rng(seed, StreamId({0xe3b, g}));
    std::vector<double> centre(dim);
    for (double& c : centre) c = rng.Normal();
    for (const auto& w : *pools[g]) {
      words.push_back(w);
      for (std::size_t k = 0; k < dim; ++k) {
        matrix.push_back(centre[k] + 0.35 * rng.Normal());
      }
    }
  }
  return EmbeddingTable(Vocabulary(std::move(words)), std::move(matrix), dim);
}

}  // namespace ldptext
