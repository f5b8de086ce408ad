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

#ifndef LDPTEXT_PIPELINE_H_
#define LDPTEXT_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldptext/attack_eval.h"
#include "ldptext/corpus.h"
#include "ldptext/embedding_table.h"
#include "ldptext/ngram_model.h"

namespace ldptext {

std::string_view ToolkitVersion();

// Document encoder used for embedding access: mean of the vectors of the
// words found in the table, zeros when there are none.
std::vector<double> MeanWordEmbedding(const EmbeddingTable& table,
                                      std::string_view text);

// Either a corpus file or generator options.
struct CorpusSource {
  std::string path;
  std::optional<SyntheticOptions> synthetic;
};

Corpus LoadCorpusSource(const CorpusSource& source);

struct ScorerConfig {
  // "ngram": trained on the public corpus with 'ngram', or loaded from
  // 'model' when set. "remote": an HTTP scorer at 'endpoint' whose
  // vocabulary (one token per line) is read from 'vocabulary'.
  std::string type = "ngram";
  std::string model;
  NGramOptions ngram;
  std::string endpoint;
  std::string vocabulary;
  double timeout_seconds = 10.0;
};

struct WordEmbeddingSource {
  std::string path;
  // Generated for the private corpus's synthetic lexicon when set.
  std::optional<std::size_t> synthetic_dim;
  std::uint64_t synthetic_seed = 0;
};

// One sanitizer with its parameter grid: temperatures for "dp-prompt",
// epsilons for "madlib", "mahalanobis", "tem" and "trunc-laplace".
struct MechanismConfig {
  std::string name;
  std::vector<double> grid;

  // dp-prompt. clip is "learned" (public corpus), "fixed" (clip_lower,
  // clip_upper for every coordinate) or "none".
  std::string prompt_template;
  int n_tokens = 150;
  std::string clip = "learned";
  double clip_lower = 0.0;
  double clip_upper = 0.0;
  std::optional<int> top_k;
  bool stop_at_eos = false;

  // mahalanobis / tem. Required for their mechanism.
  std::optional<double> lambda;
  std::optional<double> gamma;

  // trunc-laplace bounds: per-dimension public quantiles.
  double quantile_low = 0.0;
  double quantile_high = 1.0;
};

struct ExperimentConfig {
  CorpusSource private_corpus;
  CorpusSource public_corpus;
  // Relative paths resolve against $LDPTEXT_OUTPUT_ROOT (default: cwd).
  std::string output_dir;
  std::uint64_t seed = 0;
  int repeats = 3;
  int workers = 1;
  SplitRatios split;
  ClassifierOptions classifier;
  ScorerConfig scorer;
  std::optional<WordEmbeddingSource> word_embeddings;
  std::vector<MechanismConfig> mechanisms;
  std::vector<AttackScenario> scenarios;
};

// Strict JSON schema: unknown keys, wrong types and missing required fields
// throw ParseError naming the offending key. Relative corpus, model and
// embedding paths resolve against base_dir.
ExperimentConfig ParseConfig(std::string_view json_text,
                             const std::string& base_dir = ".");
ExperimentConfig LoadConfig(const std::string& path);

// Canonical JSON form with every default spelled out. Parsing it back
// yields a config with the same canonical form.
std::string ConfigToJson(const ExperimentConfig& config);
// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string ConfigHash(const ExperimentConfig& config);

// Semantic checks that need no I/O. Returns one message per problem.
std::vector<std::string> CheckConfig(const ExperimentConfig& config);
// CheckConfig plus loading both corpora (and the embedding file, when
// given) and checking they are disjoint and usable.
std::vector<std::string> ValidateConfig(const ExperimentConfig& config);

std::string ResolveOutputDir(const std::string& output_dir);

struct RunOptions {
  // Replaces config.output_dir.
  std::optional<std::string> output_dir;
  // Skip cells already completed under the same config hash.
  bool resume = true;
  // Return after computing this many new cells, leaving the run
  // incomplete (no tables written).
  std::optional<int> stop_after_cells;
};

// Cell counts include one clean-data reference cell per scenario.
struct RunSummary {
  std::string output_dir;
  int cells_total = 0;
  int cells_computed = 0;
  int cells_reused = 0;
  int cells_failed = 0;
  bool complete = false;
};

// Runs every mechanism x parameter x scenario cell over config.repeats
// sanitizations and writes, under the output directory:
//
//   cells/*.json    one file per finished cell, written atomically
//   results.csv     mechanism,param,scenario,author_f1_mean,author_f1_std,
//                   utility_f1_mean,utility_f1_std,epsilon,status
//   reference.csv   clean-data ceiling and random floor per scenario
//   manifest.json   config, hash, version, seeds, timings, deviation flags
//
// A failing cell gets a status other than "ok" and the run continues.
// Output bytes of both tables depend only on the config.
RunSummary RunExperiment(const ExperimentConfig& config,
                         const RunOptions& options = {});

// The config embedded in a manifest written by RunExperiment.
ExperimentConfig ConfigFromManifest(const std::string& manifest_path);

// Writes curve_<scenario>.csv for every scenario in results.csv:
//
//   kind,mechanism,param,author_f1,author_f1_std,utility_f1,utility_band
//
// with one "point" row per ok result (utility_band = 2 * utility_f1_std),
// then one "clean_ceiling" and one "random_floor" row from reference.csv.
// Returns the written paths. Throws InvalidInputError on empty results.
std::vector<std::string> WriteReport(const std::string& results_csv,
                                     const std::string& reference_csv,
                                     const std::string& out_dir);

}  // namespace ldptext

#endif  // LDPTEXT_PIPELINE_H_
