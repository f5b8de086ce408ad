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
#include <fstream>

#include "gtest/gtest.h"
#include "ldptext/embedding_table.h"
#include "ldptext/errors.h"
#include "ldptext/rng.h"
#include "ldptext/tokenizer.h"
#include "ldptext/word_dp.h"
#include "test_util.h"

namespace ldptext {
namespace {

using ::ldptext::testing::TotalVariation;

std::string TempFile(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

EmbeddingTable RandomTable(std::size_t n, std::size_t dim, std::uint64_t seed,
                           double scale = 1.0) {
  RngStream rng(seed, 0);
  std::vector<std::string> words;
  std::vector<double> m;
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back("w" + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) m.push_back(scale * rng.Normal());
  }
  return EmbeddingTable(Vocabulary(words), m, dim);
}

TEST(EmbeddingTableTest, LoadsFile) {
  auto path = TempFile("ldptext_emb3.txt", "a 1 2\nb 3 4\nc -1 0.5\n");
  EmbeddingTable t = EmbeddingTable::Load(path);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.dim(), 2u);
  EXPECT_EQ(t.row(2)[1], 0.5);
  EXPECT_EQ(t.words().token(1), "b");
}

TEST(EmbeddingTableTest, ShortLineNamesLine) {
  auto path = TempFile("ldptext_emb_bad.txt", "a 1 2\nb 3\nc 1 1\n");
  try {
    EmbeddingTable::Load(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(EmbeddingTableTest, DuplicateTokens) {
  auto path = TempFile("ldptext_emb_dup.txt", "a 1 2\nb 3 4\na 5 6\n");
  try {
    EmbeddingTable::Load(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EmbeddingTable t = EmbeddingTable::Load(path, /*last_wins=*/true);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.row(0)[0], 5.0);
}

TEST(EmbeddingTableTest, SaveLoadRoundTrip) {
  EmbeddingTable t = RandomTable(20, 5, 3);
  const auto path =
      (std::filesystem::temp_directory_path() / "ldptext_emb_rt.txt").string();
  t.Save(path);
  EmbeddingTable back = EmbeddingTable::Load(path);
  ASSERT_EQ(back.size(), t.size());
  for (TokenId i = 0; i < 20; ++i) {
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(back.row(i)[k], t.row(i)[k]);
  }
}

TEST(EmbeddingTableTest, RejectsDegenerateTables) {
  EXPECT_THROW(EmbeddingTable(Vocabulary({"a"}), {1.0}, 1), InvalidInputError);
  EXPECT_THROW(EmbeddingTable(Vocabulary({"a", "b"}), {1.0, NAN}, 1),
               InvalidInputError);
}

TEST(NearestTest, ExactRowAndTies) {
  // Rows 2 and 5 are equidistant from the query.
  EmbeddingTable t(Vocabulary({"r0", "r1", "r2", "r3", "r4", "r5"}),
                   {10, 10, -10, 10, 1, 0, 10, -10, -10, -10, -1, 0}, 2);
  EXPECT_EQ(t.Nearest(t.row(3)), 3);
  std::vector<double> q{0, 0};
  EXPECT_EQ(t.Nearest(q), 2);
}

TEST(NearestTest, AgreesWithBruteForce) {
  EmbeddingTable t = RandomTable(300, 8, 4);
  RngStream rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> q(8);
    for (double& x : q) x = 1.5 * rng.Normal();
    TokenId best = 0;
    long double best_d = INFINITY;
    for (TokenId r = 0; r < 300; ++r) {
      long double d = 0;
      for (std::size_t k = 0; k < 8; ++k) {
        const long double diff = (long double)q[k] - t.row(r)[k];
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    ASSERT_EQ(t.Nearest(q), best) << "query " << i;
  }
}

TEST(PlanarLaplaceTest, MeanNormAndCentering) {
  RngStream rng(6, 0);
  const std::size_t d = 50;
  const int n = 100000;
  double norm_sum = 0;
  std::vector<double> mean(d), sq(d);
  for (int i = 0; i < n; ++i) {
    auto z = SamplePlanarLaplace(d, 5.0, rng);
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) {
      s += z[k] * z[k];
      mean[k] += z[k];
      sq[k] += z[k] * z[k];
    }
    norm_sum += std::sqrt(s);
  }
  EXPECT_NEAR(norm_sum / n, 10.0, 0.2);
  for (std::size_t k = 0; k < d; ++k) {
    const double m = mean[k] / n;
    const double sd = std::sqrt(sq[k] / n - m * m);
    EXPECT_LE(std::abs(m), 3 * sd / std::sqrt(double(n))) << "coordinate " << k;
  }
}

TEST(PlanarLaplaceTest, HugeEpsilonIsTiny) {
  RngStream rng(6, 1);
  for (int i = 0; i < 1000; ++i) {
    auto z = SamplePlanarLaplace(50, 1e6, rng);
    double s = 0;
    for (double x : z) s += x * x;
    EXPECT_LT(std::sqrt(s), 1e-3);
  }
}

Document TableDoc(const EmbeddingTable& t, int n_words) {
  std::string text;
  for (int i = 0; i < n_words; ++i) {
    if (i) text += ' ';
    text += t.words().token(i % static_cast<int>(t.size()));
  }
  return {"doc", text, 0, 0};
}

TEST(MadlibTest, HugeEpsilonIsIdentity) {
  EmbeddingTable t = RandomTable(50, 10, 7);
  Document d = TableDoc(t, 40);
  RngStream rng(7, 0);
  auto out = MadlibSanitize(d, t, 1e6, rng);
  EXPECT_EQ(out.text, d.text);
  EXPECT_EQ(out.report.granularity, Granularity::kWord);
  EXPECT_EQ(out.report.epsilon.value(), 1e6);
  EXPECT_EQ(out.report.parameters.at("oov_count"), "0");
}

TEST(MadlibTest, TinyEpsilonRarelyKeepsWord) {
  EmbeddingTable t = RandomTable(100, 10, 8);
  MadlibMechanism m(t, 1e-3);
  Document d{"x", "w17", 0, 0};
  RngStream rng(8, 0);
  int kept = 0;
  for (int i = 0; i < 10000; ++i) kept += m.Sanitize(d, rng).text == "w17";
  EXPECT_LT(kept / 10000.0, 0.05);
}

TEST(MadlibTest, OovPassThrough) {
  EmbeddingTable t = RandomTable(10, 3, 9);
  RngStream rng(9, 0);
  auto out = MadlibSanitize({"x", "foo bar baz", 0, 0}, t, 1.0, rng);
  EXPECT_EQ(out.text, "foo bar baz");
  EXPECT_EQ(out.report.parameters.at("oov_count"), "3");
  EXPECT_EQ(out.report.parameters.at("oov_tokens_unprotected"), "true");
}

TEST(MadlibTest, PreservesTokenCountAndVocabulary) {
  EmbeddingTable t = RandomTable(30, 4, 10);
  Document d{"x", "w1 w2 unknown w3 w1 .", 0, 0};
  RngStream rng(10, 0);
  for (int i = 0; i < 200; ++i) {
    auto out = MadlibSanitize(d, t, 2.0, rng);
    ASSERT_EQ(out.tokens.size(), 6u);
    for (const auto& tok : out.tokens) {
      EXPECT_TRUE(t.words().contains(tok) || tok == "unknown" || tok == ".");
    }
  }
}

TEST(MadlibTest, SelfProbabilityGrowsWithEpsilon) {
  EmbeddingTable t = RandomTable(60, 6, 11);
  Document d{"x", "w5", 0, 0};
  double previous = -1;
  for (double eps : {2.0, 5.0, 8.0, 11.0, 14.0, 17.0, 20.0, 25.0}) {
    MadlibMechanism m(t, eps);
    RngStream rng(11, static_cast<std::uint64_t>(eps));
    int kept = 0;
    for (int i = 0; i < 10000; ++i) kept += m.Sanitize(d, rng).text == "w5";
    const double p = kept / 10000.0;
    EXPECT_GE(p, previous - 0.02) << "epsilon " << eps;
    previous = p;
  }
}

TEST(CovarianceTest, Endpoints) {
  EmbeddingTable t = RandomTable(40, 4, 12);
  Eigen::MatrixXd i0 = RegularizedCovariance(t, 0.0);
  EXPECT_TRUE(i0.isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-15));
  EmbeddingTable same(Vocabulary({"a", "b", "c"}), {1, 2, 1, 2, 1, 2}, 2);
  EXPECT_TRUE(RegularizedCovariance(same, 1.0).isZero(0));
  EXPECT_THROW(MahalanobisMechanism(same, 1.0, 1.0), InvalidParameterError);
}

TEST(CovarianceTest, SymmetricWithEigenvalueFloor) {
  for (double lambda : {0.1, 0.5, 0.9}) {
    EmbeddingTable t = RandomTable(80, 6, 13, 3.0);
    Eigen::MatrixXd m = RegularizedCovariance(t, lambda);
    EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_GE(es.eigenvalues().minCoeff(), (1 - lambda) - 1e-9);
  }
}

TEST(MahalanobisTest, LambdaZeroMatchesMadlib) {
  EmbeddingTable t = RandomTable(40, 5, 14);
  Document d = TableDoc(t, 30);
  RngStream a(14, 0), b(14, 0);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(MadlibSanitize(d, t, 3.0, a).text,
              MahalanobisSanitize(d, t, 3.0, 0.0, b).text);
  }
}

// Planar Laplace z0 in d dimensions has E[z0 z0^T] = E[r^2] / d * I with
// r ~ Gamma(d, 1/eps), i.e. (d + 1) / eps^2 * I. So Var(z) = (d+1)/eps^2 * M.
TEST(MahalanobisTest, AnisotropicNoiseVariance) {
  RngStream gen(15, 0);
  std::vector<std::string> words;
  std::vector<double> m;
  for (int i = 0; i < 2000; ++i) {
    words.push_back("w" + std::to_string(i));
    m.push_back(10.0 * gen.Normal());
    m.push_back(1.0 * gen.Normal());
  }
  EmbeddingTable t(Vocabulary(words), m, 2);
  const double lambda = 0.5, eps = 2.0;
  Eigen::MatrixXd cov = RegularizedCovariance(t, lambda);
  MahalanobisMechanism mech(t, eps, lambda);
  RngStream rng(15, 1);
  const int n = 100000;
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    auto z = mech.SampleNoise(rng);
    sx += z[0] * z[0];
    sy += z[1] * z[1];
  }
  const double scale = 3.0 / (eps * eps);
  EXPECT_NEAR(sx / n, scale * cov(0, 0), 0.1 * scale * cov(0, 0));
  EXPECT_NEAR(sy / n, scale * cov(1, 1), 0.1 * scale * cov(1, 1));
  const double want_ratio = cov(0, 0) / cov(1, 1);
  EXPECT_NEAR((sx / sy) / want_ratio, 1.0, 0.1);
}

TEST(MahalanobisTest, HugeEpsilonIsIdentity) {
  EmbeddingTable t = RandomTable(30, 4, 16);
  Document d = TableDoc(t, 30);
  RngStream rng(16, 0);
  EXPECT_EQ(MahalanobisSanitize(d, t, 1e6, 0.5, rng).text, d.text);
}

// Brute-force selection probabilities: words inside the gamma ball weigh
// exp(-eps d / 2); each outside word weighs exp(-eps gamma / 2).
std::vector<double> TemOracle(const EmbeddingTable& t, TokenId w, double eps,
                              double gamma) {
  std::vector<double> p(t.size());
  double z = 0;
  for (TokenId j = 0; j < static_cast<TokenId>(t.size()); ++j) {
    const double d = t.Distance(w, j);
    z += p[j] = std::exp(-eps * std::min(d <= gamma ? d : gamma, gamma) / 2);
  }
  for (double& x : p) x /= z;
  return p;
}

double MaxPairwise(const EmbeddingTable& t) {
  double m = 0;
  for (TokenId i = 0; i < static_cast<TokenId>(t.size()); ++i) {
    for (TokenId j = 0; j < static_cast<TokenId>(t.size()); ++j) {
      m = std::max(m, t.Distance(i, j));
    }
  }
  return m;
}

TEST(TemTest, MatchesBruteForceWithoutTail) {
  EmbeddingTable t = RandomTable(10, 3, 17, 0.5);
  const double gamma = MaxPairwise(t);
  for (double eps : {2.0, 5.0}) {
    TemMechanism m(t, eps, gamma);
    RngStream rng(17, static_cast<std::uint64_t>(eps));
    std::vector<double> freq(10);
    const int n = 100000;
    for (int i = 0; i < n; ++i) freq[m.Select(3, rng)] += 1.0 / n;
    EXPECT_LT(TotalVariation(freq, TemOracle(t, 3, eps, gamma)), 0.01);
  }
}

TEST(TemTest, MatchesBruteForceWithTail) {
  EmbeddingTable t = RandomTable(20, 3, 18, 0.7);
  const double gamma = 0.5 * MaxPairwise(t);
  TemMechanism m(t, 4.0, gamma);
  RngStream rng(18, 0);
  std::vector<double> freq(20);
  const int n = 100000;
  for (int i = 0; i < n; ++i) freq[m.Select(0, rng)] += 1.0 / n;
  EXPECT_LT(TotalVariation(freq, TemOracle(t, 0, 4.0, gamma)), 0.01);
}

TEST(TemTest, FlatLimitIsUniform) {
  EmbeddingTable t = RandomTable(10, 3, 19);
  TemMechanism m(t, 1e-9, MaxPairwise(t));
  RngStream rng(19, 0);
  std::vector<int> counts(10);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[m.Select(4, rng)];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.1, 0.01);
}

TEST(TemTest, SingleCandidateReturnsWord) {
  // Two far-apart words; gamma below their distance and a large epsilon
  // make the tail negligible.
  EmbeddingTable t(Vocabulary({"a", "b"}), {0, 0, 100, 0}, 2);
  TemMechanism m(t, 40.0, 1.0);
  RngStream rng(20, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(m.Select(0, rng), 0);
  EXPECT_THROW(TemMechanism(t, 1.0, 0.0), InvalidParameterError);
}

TEST(TemTest, ReportAndTokenCount) {
  EmbeddingTable t = RandomTable(15, 3, 21);
  Document d{"x", "w1 w2 nope w3", 0, 0};
  RngStream rng(21, 0);
  auto out = TemSanitize(d, t, 3.0, 1.0, rng);
  EXPECT_EQ(out.tokens.size(), 4u);
  EXPECT_EQ(out.tokens[2], "nope");
  EXPECT_EQ(out.report.mechanism, "tem");
  EXPECT_EQ(out.report.parameters.at("gamma"), "1");
}

}  // namespace
}  // namespace ldptext
