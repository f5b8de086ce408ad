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

#ifndef LDPTEXT_WORD_DP_H_
#define LDPTEXT_WORD_DP_H_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ldptext/embedding_table.h"
#include "ldptext/rng.h"
#include "ldptext/types.h"

namespace ldptext {

// Noise with density proportional to exp(-epsilon * ||z||_2) in 'dim'
// dimensions: a uniform direction (normalized Gaussian) scaled by a
// Gamma(dim, 1/epsilon) radius.
std::vector<double> SamplePlanarLaplace(std::size_t dim, double epsilon,
                                        RngStream& rng);

// lambda * Cov(rows) + (1 - lambda) * I, with the n-1 sample covariance.
Eigen::MatrixXd RegularizedCovariance(const EmbeddingTable& table,
                                      double lambda);

// Word-level metric-DP mechanism. Words missing from the table pass through
// unchanged and are counted in report.parameters["oov_count"]; they carry no
// protection.
class WordMechanism {
 public:
  virtual ~WordMechanism() = default;
  virtual SanitizedDocument Sanitize(const Document& doc,
                                     RngStream& rng) const = 0;
};

// Perturb the word vector with planar Laplace noise and project back to the
// nearest table word.
class MadlibMechanism final : public WordMechanism {
 public:
  MadlibMechanism(const EmbeddingTable& table, double epsilon);
  SanitizedDocument Sanitize(const Document& doc,
                             RngStream& rng) const override;

 private:
  const EmbeddingTable& table_;
  double epsilon_;
};

// Madlib with noise shaped by the square root of the regularized
// covariance: z = M^{1/2} z0. Throws InvalidParameterError when M is not
// positive definite.
class MahalanobisMechanism final : public WordMechanism {
 public:
  MahalanobisMechanism(const EmbeddingTable& table, double epsilon,
                       double lambda);
  SanitizedDocument Sanitize(const Document& doc,
                             RngStream& rng) const override;
  std::vector<double> SampleNoise(RngStream& rng) const;

 private:
  const EmbeddingTable& table_;
  double epsilon_;
  double lambda_;
  Eigen::MatrixXd sqrt_m_;
};

// Truncated exponential mechanism. For input w, words within distance gamma
// compete individually with score epsilon * (-d(w, w')) / 2. All remaining
// words share one aggregate candidate scored as if each had distance gamma:
// -epsilon * gamma / 2 + log(count). Selection is Gumbel-max; if the
// aggregate wins, one of the outside words is drawn uniformly.
class TemMechanism final : public WordMechanism {
 public:
  TemMechanism(const EmbeddingTable& table, double epsilon, double gamma);
  SanitizedDocument Sanitize(const Document& doc,
                             RngStream& rng) const override;
  TokenId Select(TokenId word, RngStream& rng) const;

 private:
  const EmbeddingTable& table_;
  double epsilon_;
  double gamma_;
};

SanitizedDocument MadlibSanitize(const Document& doc,
                                 const EmbeddingTable& table, double epsilon,
                                 RngStream& rng);
SanitizedDocument MahalanobisSanitize(const Document& doc,
                                      const EmbeddingTable& table,
                                      double epsilon, double lambda,
                                      RngStream& rng);
SanitizedDocument TemSanitize(const Document& doc, const EmbeddingTable& table,
                              double epsilon, double gamma, RngStream& rng);

}  // namespace ldptext

#endif  // LDPTEXT_WORD_DP_H_
