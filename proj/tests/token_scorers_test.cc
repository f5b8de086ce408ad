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

#include <cmath>
#include <filesystem>
#include <numeric>

#include "gtest/gtest.h"
#include "ldptext/errors.h"
#include "ldptext/ngram_model.h"
#include "ldptext/rng.h"
#include "ldptext/tokenizer.h"

namespace ldptext {
namespace {

double SumExp(const LogitVector& u) {
  double s = 0;
  for (double x : u) s += std::exp(x);
  return s;
}

NGramModel AbabBigram(double add_k) {
  NGramOptions o;
  o.order = 2;
  o.add_k = add_k;
  o.min_count = 1;
  std::vector<Document> docs{{"d", "a b a b", 0, 0}};
  return NGramModel::Train(docs, o);
}

TEST(TokenizerTest, SplitsPunctuation) {
  EXPECT_EQ(SplitWords("Good movie!"),
            (std::vector<std::string>{"good", "movie", "!"}));
  EXPECT_EQ(SplitWords("  x,y\t(z)  "),
            (std::vector<std::string>{"x", ",", "y", "(", "z", ")"}));
  EXPECT_TRUE(SplitWords(" \n ").empty());
}

TEST(TokenizerTest, TokenizeMapsUnknownToUnk) {
  Vocabulary v({"</s>", "<unk>", "good", "movie", "!"});
  EXPECT_EQ(Tokenize("Good movie!", v, 1), (std::vector<TokenId>{2, 3, 4}));
  EXPECT_EQ(Tokenize("zzyzx", v, 1), (std::vector<TokenId>{1}));
}

TEST(TokenizerTest, DetokenizeReattachesPunctuation) {
  Vocabulary v({"</s>", "<unk>", "a", "b", "."});
  EXPECT_EQ(Detokenize(Tokenize("a b .", v, 1), v), "a b.");
  std::vector<std::string> toks{"hi", ",", "you", "!", "ok"};
  EXPECT_EQ(Detokenize(toks), "hi, you! ok");
}

TEST(TokenizerTest, DetokenizeDropsEos) {
  Vocabulary v({"</s>", "<unk>", "a"});
  std::vector<TokenId> ids{2, 0, 2};
  EXPECT_EQ(Detokenize(ids, v), "a a");
}

TEST(GeneratePromptTest, Examples) {
  Document d{"x", "hi", 0, 0};
  EXPECT_EQ(GeneratePrompt(d, "Document: {doc}\nParaphrase of the document:"),
            "Document: hi\nParaphrase of the document:");
  EXPECT_EQ(GeneratePrompt(d, "{doc}"), "hi");
  EXPECT_THROW(GeneratePrompt(d, "nothing here"), InvalidTemplateError);
  EXPECT_THROW(GeneratePrompt(d, "{doc} and {doc}"), InvalidTemplateError);
}

TEST(NGramTest, VocabularyLayout) {
  NGramModel m = AbabBigram(0.01);
  EXPECT_EQ(m.vocabulary().tokens(),
            (std::vector<std::string>{"</s>", "<unk>", "a", "b"}));
  EXPECT_EQ(m.eos_id(), 0);
  EXPECT_EQ(m.unk_id(), 1);
}

TEST(NGramTest, HandCountedBigram) {
  NGramModel m = AbabBigram(0.01);
  std::vector<TokenId> ctx{2};
  EXPECT_NEAR(m.Probability(ctx, 3), (2 + 0.01) / (2 + 0.04), 1e-12);
}

TEST(NGramTest, VanishingSmoothingLimit) {
  NGramModel m = AbabBigram(1e-12);
  std::vector<TokenId> ctx{3, 2};
  EXPECT_NEAR(m.Probability(ctx, 3), 1.0, 1e-9);
  auto u = m.NextLogits(ctx);
  EXPECT_EQ(std::max_element(u.begin(), u.end()) - u.begin(), 3);
}

TEST(NGramTest, UnseenContextIsUniform) {
  NGramModel m = AbabBigram(0.01);
  std::vector<TokenId> ctx{1};
  for (double x : m.NextLogits(ctx)) EXPECT_NEAR(x, -std::log(4.0), 1e-12);
}

TEST(NGramTest, MinCountMapsRareWordsToUnk) {
  NGramOptions o;
  o.min_count = 2;
  std::vector<Document> docs{{"1", "x x y", 0, 0}};
  NGramModel m = NGramModel::Train(docs, o);
  EXPECT_TRUE(m.vocabulary().contains("x"));
  EXPECT_FALSE(m.vocabulary().contains("y"));
}

TEST(NGramTest, RejectsBadInput) {
  NGramOptions o;
  std::vector<Document> none;
  EXPECT_THROW(NGramModel::Train(none, o), InvalidInputError);
  std::vector<Document> docs{{"1", "a", 0, 0}};
  o.add_k = 0;
  EXPECT_THROW(NGramModel::Train(docs, o), InvalidParameterError);
  o.add_k = 0.01;
  o.order = 0;
  EXPECT_THROW(NGramModel::Train(docs, o), InvalidParameterError);
}

class NGramCorpusTest : public ::testing::TestWithParam<double> {
 protected:
  static std::vector<Document> Corpus() {
    return {{"1", "the cat sat on the mat.", 0, 0},
            {"2", "the dog sat on the log!", 0, 0},
            {"3", "a cat and a dog sat.", 0, 0},
            {"4", "the mat and the log.", 0, 0}};
  }
  NGramModel Model() const {
    NGramOptions o;
    o.min_count = 1;
    o.cache_weight = GetParam();
    return NGramModel::Train(Corpus(), o);
  }
};

TEST_P(NGramCorpusTest, NormalizedForRandomContexts) {
  NGramModel m = Model();
  RngStream rng(8, 0);
  const auto v = m.vocabulary().size();
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> ctx(rng.UniformInt(6));
    for (auto& id : ctx) id = static_cast<TokenId>(rng.UniformInt(v));
    if (rng.Uniform() < 0.3) ctx.insert(ctx.begin(), kBosId);
    auto u = m.NextLogits(ctx);
    ASSERT_EQ(u.size(), v);
    EXPECT_NEAR(SumExp(u), 1.0, 1e-9);
    EXPECT_EQ(u, m.NextLogits(ctx));
  }
}

TEST_P(NGramCorpusTest, SerializationRoundTrip) {
  NGramModel m = Model();
  const auto path =
      (std::filesystem::temp_directory_path() / "ldptext_ngram_test.json")
          .string();
  m.Save(path);
  NGramModel loaded = NGramModel::Load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.vocabulary(), m.vocabulary());
  EXPECT_EQ(loaded.Serialize(), m.Serialize());
  RngStream rng(9, 0);
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> ctx(rng.UniformInt(5));
    for (auto& id : ctx) {
      id = static_cast<TokenId>(rng.UniformInt(m.vocabulary().size()));
    }
    EXPECT_EQ(loaded.NextLogits(ctx), m.NextLogits(ctx));
  }
}

INSTANTIATE_TEST_SUITE_P(CacheWeights, NGramCorpusTest,
                         ::testing::Values(0.0, 0.5, 0.9));

TEST(NGramTest, CacheMixesContextUnigrams) {
  NGramOptions o;
  o.order = 1;
  o.min_count = 1;
  o.cache_weight = 0.5;
  std::vector<Document> docs{{"1", "a a b", 0, 0}};
  NGramModel m = NGramModel::Train(docs, o);
  // Unigram counts: </s> 1, a 2, b 1 (total 4); |V| = 4 with <unk>.
  const TokenId a = *m.vocabulary().find("a");
  const TokenId b = *m.vocabulary().find("b");
  const double k = o.add_k;
  auto p = [&](double c) { return (c + k) / (4 + 4 * k); };
  std::vector<TokenId> ctx{b, NGramModel::kUnk, kBosId};
  // The cache sees only the known word b.
  EXPECT_NEAR(m.Probability(ctx, b), 0.5 * p(1) + 0.5, 1e-12);
  EXPECT_NEAR(m.Probability(ctx, a), 0.5 * p(2), 1e-12);
  EXPECT_NEAR(m.Probability(ctx, NGramModel::kUnk), 0.5 * p(0), 1e-12);
}

TEST(NGramTest, DeserializeRejectsGarbage) {
  EXPECT_THROW(NGramModel::Deserialize("{}"), ParseError);
  EXPECT_THROW(NGramModel::Deserialize("not json"), ParseError);
}

}  // namespace
}  // namespace ldptext
