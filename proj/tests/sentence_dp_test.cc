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

#include "gtest/gtest.h"
#include "ldptext/errors.h"
#include "ldptext/rng.h"
#include "ldptext/sentence_dp.h"

namespace ldptext {
namespace {

std::vector<SentenceEmbedding> Vectors(
    std::initializer_list<std::vector<double>> rows) {
  std::vector<SentenceEmbedding> out;
  int i = 0;
  for (const auto& r : rows) out.push_back({"d" + std::to_string(i++), r});
  return out;
}

TEST(TruncationBoundsTest, MinMaxExample) {
  auto pub = Vectors({{0, 1}, {2, -1}, {1, 0}});
  TruncationBounds b = LearnTruncationBounds(pub);
  EXPECT_EQ(b.lower(), (std::vector<double>{0, -1}));
  EXPECT_EQ(b.upper(), (std::vector<double>{2, 1}));
  EXPECT_DOUBLE_EQ(b.sensitivity(), 4.0);
}

TEST(TruncationBoundsTest, SingleVectorHasZeroWidth) {
  auto pub = Vectors({{0.5, 0.25}});
  TruncationBounds b = LearnTruncationBounds(pub);
  EXPECT_EQ(b.sensitivity(), 0.0);
  RngStream rng(1, 0);
  EXPECT_THROW(TruncatedLaplaceSanitize(pub[0], b, 1.0, rng),
               InvalidParameterError);
}

TEST(TruncationBoundsTest, InterquartileRangeOfNormal) {
  RngStream rng(2, 0);
  std::vector<SentenceEmbedding> pub;
  for (int i = 0; i < 20000; ++i) {
    pub.push_back({"p", {rng.Normal(), rng.Normal(), rng.Normal()}});
  }
  TruncationBounds b = LearnTruncationBounds(pub, 0.25, 0.75);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(b.upper()[k] - b.lower()[k], 1.349, 0.1349);
  }
}

TEST(TruncationBoundsTest, RejectsBadInput) {
  EXPECT_THROW(TruncationBounds({1.0}, {0.0}), InvalidInputError);
  EXPECT_THROW(TruncationBounds({}, {}), InvalidInputError);
  auto pub = Vectors({{0, 1}, {1, 2}});
  EXPECT_THROW(LearnTruncationBounds(pub, 0.6, 0.4), InvalidParameterError);
  auto ragged = Vectors({{0, 1}, {1}});
  EXPECT_THROW(LearnTruncationBounds(ragged), InvalidInputError);
}

TEST(TruncationBoundsTest, FileRoundTrip) {
  TruncationBounds b({-1.5, 0.0, 2.0}, {0.25, 3.0, 2.5});
  const auto path =
      (std::filesystem::temp_directory_path() / "ldptext_bounds.txt").string();
  b.Save(path);
  TruncationBounds back = TruncationBounds::Load(path);
  EXPECT_EQ(back.lower(), b.lower());
  EXPECT_EQ(back.upper(), b.upper());
  EXPECT_EQ(back.sensitivity(), b.sensitivity());
}

TEST(SentenceEmbeddingFileTest, RoundTrip) {
  auto v = Vectors({{0.125, -3}, {1e-7, 42}});
  const auto path =
      (std::filesystem::temp_directory_path() / "ldptext_sent.txt").string();
  SaveSentenceEmbeddings(path, v);
  auto back = LoadSentenceEmbeddings(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].doc_id, "d1");
  EXPECT_EQ(back[1].vector, v[1].vector);
}

TEST(TruncatedLaplaceTest, HugeEpsilonReproducesClamp) {
  TruncationBounds b({0, 0, 0}, {1, 1, 1});
  SentenceEmbedding e{"x", {-2.0, 0.3, 7.0}};
  RngStream rng(3, 0);
  auto out = TruncatedLaplaceSanitize(e, b, 1e9, rng);
  EXPECT_NEAR(out.vector[0], 0.0, 1e-6);
  EXPECT_NEAR(out.vector[1], 0.3, 1e-6);
  EXPECT_NEAR(out.vector[2], 1.0, 1e-6);
  EXPECT_EQ(out.doc_id, "x");
}

TEST(TruncatedLaplaceTest, OutputStaysInBounds) {
  TruncationBounds b({-1, 0, 2}, {1, 0.5, 2.5});
  RngStream rng(4, 0);
  for (int i = 0; i < 10000; ++i) {
    SentenceEmbedding e{"x", {3 * rng.Normal(), 3 * rng.Normal(), rng.Normal()}};
    auto out = TruncatedLaplaceSanitize(e, b, 0.5, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      ASSERT_GE(out.vector[k], b.lower()[k]);
      ASSERT_LE(out.vector[k], b.upper()[k]);
    }
  }
}

TEST(TruncatedLaplaceTest, NoiseScale) {
  TruncationBounds b({0, 0}, {1, 1});
  const double eps = 4.0;
  SentenceEmbedding e{"x", {0.5, 0.5}};
  RngStream rng(5, 0);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = TruncatedLaplaceSample(e, b, eps, rng).unclamped[0] - 0.5;
    s += z;
    s2 += z * z;
  }
  const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
  const double want = std::sqrt(2.0) * b.sensitivity() / eps;
  EXPECT_NEAR(sd / want, 1.0, 0.05);
}

TEST(TruncatedLaplaceTest, ClampIsIdempotent) {
  TruncationBounds b({-1, -1}, {1, 1});
  SentenceEmbedding e{"x", {5.0, -0.5}};
  RngStream a(6, 0), c(6, 0);
  auto once = TruncatedLaplaceSanitize(e, b, 2.0, a);
  SentenceEmbedding pre{"x", {1.0, -0.5}};
  auto twice = TruncatedLaplaceSanitize(pre, b, 2.0, c);
  EXPECT_EQ(once.vector, twice.vector);
}

TEST(TruncatedLaplaceTest, DimensionMismatchAndReport) {
  TruncationBounds b({0, 0}, {1, 3});
  RngStream rng(7, 0);
  EXPECT_THROW(TruncatedLaplaceSanitize({"x", {0.0}}, b, 1.0, rng),
               InvalidInputError);
  EXPECT_THROW(TruncatedLaplaceSanitize({"x", {0.0, 0.0}}, b, 0.0, rng),
               InvalidParameterError);
  PrivacyReport r = TruncatedLaplaceReport(b, 2.0);
  EXPECT_EQ(r.granularity, Granularity::kSentence);
  EXPECT_EQ(r.epsilon.value(), 2.0);
  EXPECT_EQ(r.parameters.at("l1_sensitivity"), "4");
  EXPECT_EQ(r.parameters.at("noise_scale"), "2");
}

}  // namespace
}  // namespace ldptext
