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

#include "ldptext/word_dp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ldptext/errors.h"
#include "ldptext/tokenizer.h"

namespace ldptext {
namespace {

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameterError("epsilon must be positive and finite");
  }
}

// Shared per-token loop: in-table words go through 'replace', everything
// else passes through.
SanitizedDocument MapWords(const Document& doc, const EmbeddingTable& table,
                           const std::function<TokenId(TokenId)>& replace,
                           std::string mechanism, double epsilon) {
  SanitizedDocument out;
  out.source_doc_id = doc.doc_id;
  std::size_t oov = 0;
  for (auto& w : SplitWords(doc.text)) {
    auto id = table.words().find(w);
    if (!id) {
      ++oov;
      out.tokens.push_back(std::move(w));
      continue;
    }
    out.tokens.push_back(table.words().token(replace(*id)));
  }
  out.text = Detokenize(out.tokens);
  out.report.mechanism = std::move(mechanism);
  out.report.granularity = Granularity::kWord;
  out.report.epsilon = Epsilon::Of(epsilon);
  out.report.parameters["epsilon"] = FormatDouble(epsilon);
  out.report.parameters["oov_count"] = std::to_string(oov);
  out.report.parameters["oov_tokens_unprotected"] = oov ? "true" : "false";
  return out;
}

}  // namespace

std::vector<double> SamplePlanarLaplace(std::size_t dim, double epsilon,
                                        RngStream& rng) {
  CheckEpsilon(epsilon);
  std::vector<double> z(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : z) {
      x = rng.Normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double radius = rng.Gamma(static_cast<double>(dim), 1.0 / epsilon);
  const double scale = radius / std::sqrt(norm2);
  for (double& x : z) x *= scale;
  return z;
}

Eigen::MatrixXd RegularizedCovariance(const EmbeddingTable& table,
                                      double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidParameterError("lambda must be in [0, 1]");
  }
  const std::size_t n = table.size();
  const std::size_t d = table.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = table.row(static_cast<TokenId>(i));
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
  }
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = table.row(static_cast<TokenId>(i));
    for (std::size_t k = 0; k < d; ++k) centered[k] = r[k] - mean[k];
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n - 1);
  return lambda * cov +
         (1.0 - lambda) * Eigen::MatrixXd::Identity(d, d);
}

MadlibMechanism::MadlibMechanism(const EmbeddingTable& table, double epsilon)
    : table_(table), epsilon_(epsilon) {
  CheckEpsilon(epsilon);
}

SanitizedDocument MadlibMechanism::Sanitize(const Document& doc,
                                            RngStream& rng) const {
  std::vector<double> v(table_.dim());
  return MapWords(
      doc, table_,
      [&](TokenId id) {
        auto noise = SamplePlanarLaplace(table_.dim(), epsilon_, rng);
        auto r = table_.row(id);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = r[k] + noise[k];
        return table_.Nearest(v);
      },
      "madlib", epsilon_);
}

MahalanobisMechanism::MahalanobisMechanism(const EmbeddingTable& table,
                                           double epsilon, double lambda)
    : table_(table), epsilon_(epsilon), lambda_(lambda) {
  CheckEpsilon(epsilon);
  const Eigen::MatrixXd m = RegularizedCovariance(table, lambda);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (eig.info() != Eigen::Success || values.minCoeff() <= 1e-12 * scale) {
    throw InvalidParameterError(
        "regularized covariance is not positive definite");
  }
  sqrt_m_ = eig.eigenvectors() * values.cwiseSqrt().asDiagonal() *
            eig.eigenvectors().transpose();
}

std::vector<double> MahalanobisMechanism::SampleNoise(RngStream& rng) const {
  auto z0 = SamplePlanarLaplace(table_.dim(), epsilon_, rng);
  Eigen::Map<const Eigen::VectorXd> z0v(z0.data(), z0.size());
  Eigen::VectorXd z = sqrt_m_ * z0v;
  return std::vector<double>(z.data(), z.data() + z.size());
}

SanitizedDocument MahalanobisMechanism::Sanitize(const Document& doc,
                                                 RngStream& rng) const {
  std::vector<double> v(table_.dim());
  auto out = MapWords(
      doc, table_,
      [&](TokenId id) {
        auto noise = SampleNoise(rng);
        auto r = table_.row(id);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = r[k] + noise[k];
        return table_.Nearest(v);
      },
      "mahalanobis", epsilon_);
  out.report.parameters["lambda"] = FormatDouble(lambda_);
  return out;
}

TemMechanism::TemMechanism(const EmbeddingTable& table, double epsilon,
                           double gamma)
    : table_(table), epsilon_(epsilon), gamma_(gamma) {
  CheckEpsilon(epsilon);
  if (!(gamma > 0.0)) throw InvalidParameterError("gamma must be positive");
}

TokenId TemMechanism::Select(TokenId word, RngStream& rng) const {
  const auto dist = table_.DistancesFrom(word);
  double best = -std::numeric_limits<double>::infinity();
  TokenId choice = word;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > gamma_) {
      ++outside;
      continue;
    }
    const double s = -epsilon_ * dist[i] / 2.0 + rng.Gumbel();
    if (s > best) {
      best = s;
      choice = static_cast<TokenId>(i);
    }
  }
  if (outside == 0) return choice;
  const double tail = -epsilon_ * gamma_ / 2.0 +
                      std::log(static_cast<double>(outside)) + rng.Gumbel();
  if (tail <= best) return choice;
  std::uint64_t pick = rng.UniformInt(outside);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > gamma_ && pick-- == 0) return static_cast<TokenId>(i);
  }
  return choice;  // unreachable
}

SanitizedDocument TemMechanism::Sanitize(const Document& doc,
                                         RngStream& rng) const {
  auto out = MapWords(
      doc, table_, [&](TokenId id) { return Select(id, rng); }, "tem",
      epsilon_);
  out.report.parameters["gamma"] = FormatDouble(gamma_);
  return out;
}

SanitizedDocument MadlibSanitize(const Document& doc,
                                 const EmbeddingTable& table, double epsilon,
                                 RngStream& rng) {
  return MadlibMechanism(table, epsilon).Sanitize(doc, rng);
}

SanitizedDocument MahalanobisSanitize(const Document& doc,
                                      const EmbeddingTable& table,
                                      double epsilon, double lambda,
                                      RngStream& rng) {
  return MahalanobisMechanism(table, epsilon, lambda).Sanitize(doc, rng);
}

SanitizedDocument TemSanitize(const Document& doc, const EmbeddingTable& table,
                              double epsilon, double gamma, RngStream& rng) {
  return TemMechanism(table, epsilon, gamma).Sanitize(doc, rng);
}

}  // namespace ldptext
