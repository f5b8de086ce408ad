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

#include "ldptext/dp_decode.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "ldptext/accountant.h"
#include "ldptext/errors.h"
#include "ldptext/tokenizer.h"

namespace ldptext {

ProbabilityVector::ProbabilityVector(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInputError("empty probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInputError("probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInputError("probabilities sum to " + FormatDouble(sum));
  }
}

LogitVector ClipAndScale(std::span<const double> logits,
                         const std::optional<ClipBounds>& bounds,
                         double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidParameterError("temperature must be positive");
  }
  LogitVector out(logits.begin(), logits.end());
  if (bounds) {
    if (bounds->size() != logits.size()) {
      throw InvalidInputError("logits have " + std::to_string(logits.size()) +
                              " entries, bounds " +
                              std::to_string(bounds->size()));
    }
    const auto& lo = bounds->lower();
    const auto& hi = bounds->upper();
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = std::clamp(out[j], lo[j], hi[j]);
    }
  }
  for (double& x : out) x /= temperature;
  return out;
}

ProbabilityVector ToProbabilities(std::span<const double> scaled) {
  if (scaled.empty()) throw InvalidInputError("empty logit vector");
  const double m = *std::max_element(scaled.begin(), scaled.end());
  std::vector<double> p(scaled.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = std::exp(scaled[j] - m);
    sum += p[j];
  }
  const double log_z = std::log(sum);
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = std::exp(scaled[j] - m - log_z);
  }
  return ProbabilityVector(std::move(p));
}

TokenId SampleToken(const ProbabilityVector& p, RngStream& rng) {
  const double u = rng.Uniform();
  double cum = 0.0;
  TokenId last_nonzero = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    cum += p[j];
    last_nonzero = static_cast<TokenId>(j);
    if (u < cum) return last_nonzero;
  }
  // u landed in the rounding gap above the accumulated total.
  return last_nonzero;
}

ProbabilityVector TopKFilter(const ProbabilityVector& p, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > p.size()) {
    throw InvalidParameterError("top-k must be in [1, " +
                                std::to_string(p.size()) + "]");
  }
  if (static_cast<std::size_t>(k) == p.size()) return p;
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  std::vector<double> out(p.size(), 0.0);
  double kept = 0.0;
  for (int i = 0; i < k; ++i) kept += p[order[i]];
  for (int i = 0; i < k; ++i) out[order[i]] = p[order[i]] / kept;
  return ProbabilityVector(std::move(out));
}

ClipBounds LearnClipBounds(const TokenScorer& scorer,
                           std::span<const Document> public_docs,
                           std::string_view prompt_template) {
  if (public_docs.empty()) {
    throw InvalidInputError("no public documents to learn clip bounds from");
  }
  const std::size_t v = scorer.vocabulary().size();
  std::vector<double> lower(v, std::numeric_limits<double>::infinity());
  std::vector<double> upper(v, -std::numeric_limits<double>::infinity());
  auto observe = [&](std::span<const TokenId> context) {
    LogitVector u = scorer.NextLogits(context);
    if (u.size() != v) throw InvalidInputError("scorer returned wrong length");
    for (std::size_t j = 0; j < v; ++j) {
      lower[j] = std::min(lower[j], u[j]);
      upper[j] = std::max(upper[j], u[j]);
    }
  };
  for (const auto& doc : public_docs) {
    std::vector<TokenId> context =
        Tokenize(GeneratePrompt(doc, prompt_template), scorer.vocabulary(),
                 scorer.unk_id());
    observe(context);
    for (TokenId id : Tokenize(doc.text, scorer.vocabulary(), scorer.unk_id())) {
      context.push_back(id);
      observe(context);
    }
  }
  return ClipBounds(std::move(lower), std::move(upper));
}

SanitizedDocument DpPrompt(const TokenScorer& scorer, const Document& doc,
                           const DecodeOptions& options, RngStream& rng) {
  const Epsilon epsilon =
      DecodeEpsilon(options.bounds, options.temperature, options.n_tokens,
                    options.top_k.has_value());
  const Vocabulary& vocab = scorer.vocabulary();
  if (options.bounds && options.bounds->size() != vocab.size()) {
    throw InvalidInputError("clip bounds do not match scorer vocabulary");
  }
  if (options.top_k &&
      (*options.top_k < 1 ||
       static_cast<std::size_t>(*options.top_k) > vocab.size())) {
    throw InvalidParameterError("top-k out of range");
  }

  std::vector<TokenId> context =
      Tokenize(GeneratePrompt(doc, options.prompt_template), vocab,
               scorer.unk_id());
  const auto eos = scorer.eos_id();

  SanitizedDocument out;
  out.source_doc_id = doc.doc_id;
  for (int step = 0; step < options.n_tokens; ++step) {
    LogitVector u;
    try {
      u = scorer.NextLogits(context);
    } catch (const std::exception& e) {
      throw DecodeStepError(step, e.what());
    }
    if (u.size() != vocab.size()) {
      throw DecodeStepError(step, "scorer returned " +
                                      std::to_string(u.size()) + " logits");
    }
    ProbabilityVector p =
        ToProbabilities(ClipAndScale(u, options.bounds, options.temperature));
    if (options.top_k) p = TopKFilter(p, *options.top_k);
    const TokenId v = SampleToken(p, rng);
    out.token_ids.push_back(v);
    context.push_back(v);
    if (options.stop_at_eos && eos && v == *eos) break;
  }

  for (TokenId id : out.token_ids) {
    if (eos && id == *eos) continue;
    out.tokens.push_back(vocab.token(id));
  }
  out.text = Detokenize(out.tokens);

  auto& report = out.report;
  report.mechanism = "dp-prompt";
  report.granularity = Granularity::kDocument;
  report.epsilon = epsilon;
  report.parameters["temperature"] = FormatDouble(options.temperature);
  report.parameters["n_tokens"] = std::to_string(options.n_tokens);
  report.parameters["clip_width"] =
      options.bounds ? FormatDouble(options.bounds->width()) : "none";
  report.parameters["top_k"] =
      options.top_k ? std::to_string(*options.top_k) : "none";
  report.parameters["stop_at_eos"] = options.stop_at_eos ? "true" : "false";
  report.parameters["assumes_scorer_not_trained_on_private_data"] = "true";
  return out;
}

void SaveClipBounds(const std::string& path, const ClipBounds& bounds,
                    const Vocabulary& vocab) {
  if (bounds.size() != vocab.size()) {
    throw InvalidInputError("clip bounds do not match vocabulary size");
  }
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << "# ldptext-clip-bounds v1\n";
  out << "# vocab_hash=" << vocab.hash() << " size=" << vocab.size() << "\n";
  for (const auto* row : {&bounds.lower(), &bounds.upper()}) {
    for (std::size_t j = 0; j < row->size(); ++j) {
      if (j) out << ' ';
      out << FormatDouble((*row)[j]);
    }
    out << '\n';
  }
}

ClipBounds LoadClipBounds(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# ldptext-clip-bounds v1") {
    throw ParseError(path, 1, "missing clip-bounds header");
  }
  if (!std::getline(in, line)) throw ParseError(path, 2, "missing vocab hash");
  const std::string expect = "# vocab_hash=" + vocab.hash() +
                             " size=" + std::to_string(vocab.size());
  if (line.rfind("# vocab_hash=", 0) != 0) {
    throw ParseError(path, 2, "missing vocab hash");
  }
  if (line != expect) {
    throw VocabularyMismatchError(path + ": bounds were learned for " +
                                  line.substr(2) + ", scorer has " +
                                  expect.substr(2));
  }
  std::vector<double> rows[2];
  for (int r = 0; r < 2; ++r) {
    if (!std::getline(in, line)) throw ParseError(path, 3 + r, "missing row");
    std::istringstream ss(line);
    double x;
    while (ss >> x) rows[r].push_back(x);
    if (!ss.eof() || rows[r].size() != vocab.size()) {
      throw ParseError(path, 3 + r,
                       "expected " + std::to_string(vocab.size()) + " values");
    }
  }
  return ClipBounds(std::move(rows[0]), std::move(rows[1]));
}

}  // namespace ldptext
