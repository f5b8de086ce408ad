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

#include "ldptext/pipeline.h"

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ldptext/accountant.h"
#include "ldptext/dp_decode.h"
#include "ldptext/errors.h"
#include "ldptext/remote_scorer.h"
#include "ldptext/rng.h"
#include "ldptext/sentence_dp.h"
#include "ldptext/tokenizer.h"
#include "ldptext/word_dp.h"

#ifndef LDPTEXT_VERSION
#define LDPTEXT_VERSION "0.0.0"
#endif

namespace ldptext {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kResultsHeader =
    "mechanism,param,scenario,author_f1_mean,author_f1_std,utility_f1_mean,"
    "utility_f1_std,epsilon,status";
constexpr std::string_view kReferenceHeader =
    "scenario,clean_author_f1,clean_utility_f1,random_author_f1,"
    "random_utility_f1";

std::uint64_t NameId(std::string_view name) {
  return std::stoull(Fnv1a64Hex(name), nullptr, 16);
}

void WriteAtomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InvalidInputError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string CsvSafe(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

// Runs fn(i) for i in [0, n) on up to 'workers' threads. The first
// exception is rethrown after all threads stop.
template <typename Fn>
void ParallelFor(std::size_t n, int workers, Fn fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto body = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  const auto count = std::min<std::size_t>(workers, n);
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

Vocabulary ReadVocabularyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

struct CellResult {
  std::string mechanism;
  double param = 0.0;
  std::string scenario;
  double author_mean = 0.0, author_std = 0.0;
  double utility_mean = 0.0, utility_std = 0.0;
  std::string epsilon = "inf";
  std::string status = "ok";
  std::vector<RepeatResult> repeats;
  double seconds = 0.0;
};

Json CellJson(const CellResult& c, const std::string& hash) {
  Json j;
  j["config_hash"] = hash;
  j["mechanism"] = c.mechanism;
  j["param"] = c.param;
  j["scenario"] = c.scenario;
  j["author_f1_mean"] = c.author_mean;
  j["author_f1_std"] = c.author_std;
  j["utility_f1_mean"] = c.utility_mean;
  j["utility_f1_std"] = c.utility_std;
  j["epsilon"] = c.epsilon;
  j["status"] = c.status;
  Json reps = Json::array();
  for (const auto& r : c.repeats) {
    reps.push_back({{"author_f1", r.author_f1}, {"utility_f1", r.utility_f1}});
  }
  j["repeats"] = reps;
  j["seconds"] = c.seconds;
  return j;
}

CellResult CellFromJson(const Json& j) {
  CellResult c;
  c.mechanism = j.at("mechanism").get<std::string>();
  c.param = j.at("param").get<double>();
  c.scenario = j.at("scenario").get<std::string>();
  c.author_mean = j.at("author_f1_mean").get<double>();
  c.author_std = j.at("author_f1_std").get<double>();
  c.utility_mean = j.at("utility_f1_mean").get<double>();
  c.utility_std = j.at("utility_f1_std").get<double>();
  c.epsilon = j.at("epsilon").get<std::string>();
  c.status = j.at("status").get<std::string>();
  for (const auto& r : j.at("repeats")) {
    c.repeats.push_back(
        {r.at("author_f1").get<double>(), r.at("utility_f1").get<double>()});
  }
  c.seconds = j.at("seconds").get<double>();
  return c;
}

// Shared, read-only inputs of a run.
class RunContext {
 public:
  explicit RunContext(const ExperimentConfig& config) : config_(config) {
    priv_ = LoadCorpusSource(config.private_corpus);
    pub_ = LoadCorpusSource(config.public_corpus);
    RequireDisjoint(pub_.docs, priv_.docs);
    if (config.word_embeddings) {
      const auto& w = *config.word_embeddings;
      if (w.synthetic_dim) {
        words_.emplace(MakeSyntheticEmbeddings(*config.private_corpus.synthetic,
                                               *w.synthetic_dim,
                                               w.synthetic_seed));
      } else {
        words_.emplace(EmbeddingTable::Load(w.path));
      }
    }
    for (const auto& d : priv_.docs) {
      Sample s{d.doc_id, d.text, {}, d.author_label, d.utility_label, false};
      if (words_) s.embedding = MeanWordEmbedding(*words_, d.text);
      clean_.push_back(std::move(s));
    }
  }

  const Corpus& priv() const { return priv_; }
  const Corpus& pub() const { return pub_; }
  const std::vector<Sample>& clean() const { return clean_; }
  const EmbeddingTable& words() const {
    if (!words_) throw InvalidParameterError("word_embeddings not configured");
    return *words_;
  }
  bool has_words() const { return words_.has_value(); }

  const TokenScorer& scorer() {
    if (!scorer_) {
      const auto& s = config_.scorer;
      if (s.type == "remote") {
        scorer_ = std::make_unique<RemoteScorer>(
            s.endpoint, ReadVocabularyFile(s.vocabulary),
            std::chrono::milliseconds(
                static_cast<long long>(s.timeout_seconds * 1000)));
      } else if (!s.model.empty()) {
        scorer_ = std::make_unique<NGramModel>(NGramModel::Load(s.model));
      } else {
        scorer_ = std::make_unique<NGramModel>(
            NGramModel::Train(pub_.docs, s.ngram));
      }
    }
    return *scorer_;
  }

  std::vector<double> PublicEmbedding(std::size_t i) const {
    return MeanWordEmbedding(words(), pub_.docs[i].text);
  }

 private:
  const ExperimentConfig& config_;
  Corpus priv_, pub_;
  std::optional<EmbeddingTable> words_;
  std::vector<Sample> clean_;
  std::unique_ptr<TokenScorer> scorer_;
};

struct SanitizedRun {
  std::vector<Sample> samples;
  Epsilon epsilon = Epsilon::Unbounded();
};

// One repeat of one mechanism at one parameter value. Every document draws
// from its own stream, so the output does not depend on 'workers'.
SanitizedRun SanitizeRepeat(RunContext& ctx, const ExperimentConfig& config,
                            const MechanismConfig& m, double param,
                            int repeat) {
  const auto& docs = ctx.priv().docs;
  SanitizedRun run;
  run.samples.resize(docs.size());
  const std::uint64_t mech_id = NameId(m.name);
  auto stream = [&](std::size_t i) {
    return RngStream(config.seed,
                     StreamId({mech_id, std::bit_cast<std::uint64_t>(param),
                               static_cast<std::uint64_t>(repeat), i}));
  };
  auto fill = [&](std::size_t i, SanitizedDocument sd) {
    Sample s{docs[i].doc_id, sd.text, {}, docs[i].author_label,
             docs[i].utility_label, true};
    if (ctx.has_words()) s.embedding = MeanWordEmbedding(ctx.words(), sd.text);
    run.samples[i] = std::move(s);
  };

  if (m.name == "dp-prompt") {
    const TokenScorer& scorer = ctx.scorer();
    DecodeOptions opts;
    opts.prompt_template = m.prompt_template;
    opts.temperature = param;
    opts.n_tokens = m.n_tokens;
    opts.top_k = m.top_k;
    opts.stop_at_eos = m.stop_at_eos;
    const std::size_t v = scorer.vocabulary().size();
    if (m.clip == "fixed") {
      opts.bounds = ClipBounds::Scalar(v, m.clip_lower, m.clip_upper);
    } else if (m.clip == "learned") {
      opts.bounds = LearnClipBounds(scorer, ctx.pub().docs, m.prompt_template);
    }
    run.epsilon = DecodeEpsilon(opts.bounds, param, m.n_tokens,
                                opts.top_k.has_value());
    const int workers = scorer.concurrent_safe() ? config.workers : 1;
    ParallelFor(docs.size(), workers, [&](std::size_t i) {
      RngStream rng = stream(i);
      fill(i, DpPrompt(scorer, docs[i], opts, rng));
    });
    return run;
  }

  if (m.name == "trunc-laplace") {
    std::vector<SentenceEmbedding> pub;
    for (std::size_t i = 0; i < ctx.pub().docs.size(); ++i) {
      pub.push_back({ctx.pub().docs[i].doc_id, ctx.PublicEmbedding(i)});
    }
    const TruncationBounds bounds =
        LearnTruncationBounds(pub, m.quantile_low, m.quantile_high);
    run.epsilon = TruncatedLaplaceReport(bounds, param).epsilon;
    ParallelFor(docs.size(), config.workers, [&](std::size_t i) {
      RngStream rng = stream(i);
      const auto& c = ctx.clean()[i];
      SentenceEmbedding out =
          TruncatedLaplaceSanitize({c.doc_id, c.embedding}, bounds, param, rng);
      run.samples[i] = Sample{c.doc_id, "", std::move(out.vector), c.author,
                              c.utility, true};
    });
    return run;
  }

  std::unique_ptr<WordMechanism> mech;
  if (m.name == "madlib") {
    mech = std::make_unique<MadlibMechanism>(ctx.words(), param);
  } else if (m.name == "mahalanobis") {
    mech = std::make_unique<MahalanobisMechanism>(ctx.words(), param,
                                                  m.lambda.value());
  } else if (m.name == "tem") {
    mech = std::make_unique<TemMechanism>(ctx.words(), param, m.gamma.value());
  } else {
    throw InvalidParameterError("unknown mechanism '" + m.name + "'");
  }
  run.epsilon = Epsilon::Of(param);
  ParallelFor(docs.size(), config.workers, [&](std::size_t i) {
    RngStream rng = stream(i);
    fill(i, mech->Sanitize(docs[i], rng));
  });
  return run;
}

std::string CellFileName(const std::string& mechanism, double param,
                         const std::string& scenario) {
  return mechanism + "__" + FormatDouble(param) + "__" + scenario + ".json";
}

std::optional<CellResult> ReadCell(const fs::path& path,
                                   const std::string& hash) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    Json j = Json::parse(in);
    if (j.at("config_hash").get<std::string>() != hash) return std::nullopt;
    return CellFromJson(j);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

// Failed cells are retried on resume; everything else is final.
bool Reusable(const CellResult& c) {
  return c.status == "ok" || c.status.starts_with("not-applicable");
}

std::vector<std::string> DeviationFlags(const ExperimentConfig& config) {
  std::vector<std::string> flags{"linear-attacker-substitution"};
  if (config.private_corpus.synthetic || config.public_corpus.synthetic) {
    flags.push_back("synthetic-corpus");
  }
  for (const auto& m : config.mechanisms) {
    if (m.name == "dp-prompt" && config.scorer.type == "ngram") {
      flags.push_back("ngram-scorer-substitution");
    }
    if (m.name == "dp-prompt" && m.top_k) flags.push_back("top-k-voids-guarantee");
  }
  for (const auto& s : config.scenarios) {
    if (s.access == Access::kEmbedding) {
      flags.push_back("mean-word-vector-encoder");
      break;
    }
  }
  if (config.word_embeddings && config.word_embeddings->synthetic_dim) {
    flags.push_back("synthetic-word-embeddings");
  }
  return flags;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t Column(const std::string& name, const std::string& source) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(source, 1, "missing column '" + name + "'");
  }
};

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(path, lineno, "expected " +
                                         std::to_string(t.header.size()) +
                                         " fields");
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace

std::string_view ToolkitVersion() { return LDPTEXT_VERSION; }

std::vector<double> MeanWordEmbedding(const EmbeddingTable& table,
                                      std::string_view text) {
  std::vector<double> out(table.dim(), 0.0);
  std::size_t n = 0;
  for (const auto& w : SplitWords(text)) {
    auto id = table.words().find(w);
    if (!id) continue;
    auto row = table.row(*id);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
    ++n;
  }
  if (n > 0) {
    for (double& x : out) x /= static_cast<double>(n);
  }
  return out;
}

Corpus LoadCorpusSource(const CorpusSource& source) {
  if (source.synthetic) return MakeSyntheticCorpus(*source.synthetic);
  return IngestCorpus(source.path);
}

std::string ResolveOutputDir(const std::string& output_dir) {
  fs::path p(output_dir);
  if (p.is_relative()) {
    const char* root = std::getenv("LDPTEXT_OUTPUT_ROOT");
    p = (root != nullptr && *root != '\0') ? fs::path(root) / p
                                           : fs::current_path() / p;
  }
  return p.lexically_normal().string();
}

RunSummary RunExperiment(const ExperimentConfig& config,
                         const RunOptions& options) {
  if (auto problems = CheckConfig(config); !problems.empty()) {
    throw InvalidParameterError("invalid config: " + problems.front());
  }
  const auto run_start = Clock::now();
  const std::string hash = ConfigHash(config);
  RunSummary summary;
  summary.output_dir =
      ResolveOutputDir(options.output_dir.value_or(config.output_dir));
  const fs::path out(summary.output_dir);
  const fs::path cells_dir = out / "cells";
  fs::create_directories(cells_dir);

  RunContext ctx(config);
  const std::uint64_t eval_seed = StreamId({config.seed, NameId("evaluate")});
  EvalOptions eval;
  eval.ratios = config.split;
  eval.classifier = config.classifier;
  eval.num_authors = static_cast<int>(ctx.priv().author_labels.size());
  eval.num_utility_labels = static_cast<int>(ctx.priv().utility_labels.size());

  auto stop_requested = [&] {
    return options.stop_after_cells &&
           summary.cells_computed >= *options.stop_after_cells;
  };
  auto finish_cell = [&](const fs::path& path, CellResult cell,
                         std::vector<CellResult>& sink) {
    WriteAtomically(path, CellJson(cell, hash).dump(2) + "\n");
    ++summary.cells_computed;
    sink.push_back(std::move(cell));
  };

  // Reference cells: attackers trained and tested on clean data.
  std::vector<CellResult> reference;
  for (const auto& scenario : config.scenarios) {
    ++summary.cells_total;
    const fs::path path = cells_dir / CellFileName("clean", 0, scenario.name());
    if (options.resume) {
      if (auto cached = ReadCell(path, hash); cached && Reusable(*cached)) {
        ++summary.cells_reused;
        reference.push_back(std::move(*cached));
        continue;
      }
    }
    if (stop_requested()) return summary;
    const auto t0 = Clock::now();
    CellResult cell;
    cell.mechanism = "clean";
    cell.scenario = scenario.name();
    std::vector<std::vector<Sample>> reps{ctx.clean()};
    auto point = EvaluatePoint(ctx.clean(), reps, scenario, eval, eval_seed);
    cell.author_mean = point.author_f1_mean;
    cell.utility_mean = point.utility_f1_mean;
    cell.repeats = point.repeats;
    cell.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    finish_cell(path, std::move(cell), reference);
  }

  std::vector<CellResult> results;
  Json seeds = Json::array();
  for (const auto& m : config.mechanisms) {
    for (double param : m.grid) {
      summary.cells_total += static_cast<int>(config.scenarios.size());
      seeds.push_back({{"mechanism", m.name},
                       {"param", param},
                       {"stream_prefix",
                        {NameId(m.name), std::bit_cast<std::uint64_t>(param)}},
                       {"repeats", config.repeats}});
      std::vector<std::pair<AttackScenario, fs::path>> pending;
      for (const auto& scenario : config.scenarios) {
        const fs::path path =
            cells_dir / CellFileName(m.name, param, scenario.name());
        if (options.resume) {
          if (auto cached = ReadCell(path, hash); cached && Reusable(*cached)) {
            ++summary.cells_reused;
            results.push_back(std::move(*cached));
            continue;
          }
        }
        pending.emplace_back(scenario, path);
      }
      if (pending.empty()) continue;
      if (stop_requested()) return summary;

      const auto t0 = Clock::now();
      std::vector<std::vector<Sample>> reps;
      Epsilon epsilon = Epsilon::Unbounded();
      std::string failure;
      try {
        for (int r = 0; r < config.repeats; ++r) {
          SanitizedRun run = SanitizeRepeat(ctx, config, m, param, r);
          epsilon = run.epsilon;
          reps.push_back(std::move(run.samples));
        }
      } catch (const std::exception& e) {
        failure = std::string("failed: ") + e.what();
      }
      const double sanitize_seconds =
          std::chrono::duration<double>(Clock::now() - t0).count();

      for (const auto& [scenario, path] : pending) {
        const auto t1 = Clock::now();
        CellResult cell;
        cell.mechanism = m.name;
        cell.param = param;
        cell.scenario = scenario.name();
        cell.epsilon = epsilon.ToString();
        if (!failure.empty()) {
          cell.status = CsvSafe(failure);
        } else if (m.name == "trunc-laplace" &&
                   scenario.access == Access::kText) {
          cell.status = "not-applicable: mechanism releases embeddings only";
        } else {
          try {
            auto point = EvaluatePoint(ctx.clean(), reps, scenario, eval,
                                       eval_seed);
            cell.author_mean = point.author_f1_mean;
            cell.author_std = point.author_f1_std;
            cell.utility_mean = point.utility_f1_mean;
            cell.utility_std = point.utility_f1_std;
            cell.repeats = point.repeats;
          } catch (const std::exception& e) {
            cell.status = CsvSafe(std::string("failed: ") + e.what());
          }
        }
        cell.seconds =
            sanitize_seconds / static_cast<double>(pending.size()) +
            std::chrono::duration<double>(Clock::now() - t1).count();
        finish_cell(path, std::move(cell), results);
        if (stop_requested()) return summary;
      }
    }
  }

  std::ostringstream csv;
  csv << kResultsHeader << '\n';
  Json timings = Json::object();
  for (const auto& c : results) {
    if (c.status.starts_with("failed")) ++summary.cells_failed;
    const bool has_metrics = c.status == "ok";
    auto num = [&](double x) { return has_metrics ? FormatDouble(x) : ""; };
    csv << c.mechanism << ',' << FormatDouble(c.param) << ',' << c.scenario
        << ',' << num(c.author_mean) << ',' << num(c.author_std) << ','
        << num(c.utility_mean) << ',' << num(c.utility_std) << ','
        << c.epsilon << ',' << c.status << '\n';
    timings[CellFileName(c.mechanism, c.param, c.scenario)] = c.seconds;
  }
  WriteAtomically(out / "results.csv", csv.str());

  const auto author_fracs = ctx.priv().AuthorFractions();
  const auto utility_fracs = ctx.priv().UtilityFractions();
  std::ostringstream ref;
  ref << kReferenceHeader << '\n';
  for (const auto& c : reference) {
    ref << c.scenario << ',' << FormatDouble(c.author_mean) << ','
        << FormatDouble(c.utility_mean) << ','
        << FormatDouble(ExpectedRandomF1(author_fracs)) << ','
        << FormatDouble(ExpectedRandomF1(utility_fracs)) << '\n';
    timings[CellFileName(c.mechanism, c.param, c.scenario)] = c.seconds;
  }
  WriteAtomically(out / "reference.csv", ref.str());

  Json manifest;
  manifest["toolkit"] = "ldptext";
  manifest["version"] = std::string(ToolkitVersion());
  manifest["config_hash"] = hash;
  manifest["config"] = Json::parse(ConfigToJson(config));
  manifest["seeds"] = {{"master", config.seed},
                       {"evaluation", eval_seed},
                       {"classifier", config.classifier.seed},
                       {"sanitization", seeds}};
  manifest["deviation_flags"] = DeviationFlags(config);
  manifest["cells"] = {{"total", summary.cells_total},
                       {"computed", summary.cells_computed},
                       {"reused", summary.cells_reused},
                       {"failed", summary.cells_failed}};
  manifest["timings_seconds"] = {
      {"wall_clock",
       std::chrono::duration<double>(Clock::now() - run_start).count()},
      {"cells", timings}};
  manifest["outputs"] = {{"results", "results.csv"},
                         {"reference", "reference.csv"}};
  WriteAtomically(out / "manifest.json", manifest.dump(2) + "\n");
  summary.complete = true;
  return summary;
}

ExperimentConfig ConfigFromManifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw InvalidInputError("cannot read " + manifest_path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path, 0, e.what());
  }
  if (!j.contains("config")) {
    throw ParseError(manifest_path, 0, "manifest has no config");
  }
  ExperimentConfig config = ParseConfig(j["config"].dump(), "/");
  if (j.contains("config_hash") &&
      j["config_hash"].get<std::string>() != ConfigHash(config)) {
    throw ParseError(manifest_path, 0, "config_hash does not match config");
  }
  return config;
}

std::vector<std::string> WriteReport(const std::string& results_csv,
                                     const std::string& reference_csv,
                                     const std::string& out_dir) {
  const CsvTable results = ReadCsv(results_csv);
  if (results.rows.empty()) {
    throw InvalidInputError(results_csv + " has no results");
  }
  const CsvTable reference = ReadCsv(reference_csv);
  const auto col = [&](const CsvTable& t, const char* name,
                       const std::string& src) { return t.Column(name, src); };
  const std::size_t r_mech = col(results, "mechanism", results_csv);
  const std::size_t r_param = col(results, "param", results_csv);
  const std::size_t r_scen = col(results, "scenario", results_csv);
  const std::size_t r_am = col(results, "author_f1_mean", results_csv);
  const std::size_t r_as = col(results, "author_f1_std", results_csv);
  const std::size_t r_um = col(results, "utility_f1_mean", results_csv);
  const std::size_t r_us = col(results, "utility_f1_std", results_csv);
  const std::size_t r_status = col(results, "status", results_csv);
  const std::size_t f_scen = col(reference, "scenario", reference_csv);
  const std::size_t f_ca = col(reference, "clean_author_f1", reference_csv);
  const std::size_t f_cu = col(reference, "clean_utility_f1", reference_csv);
  const std::size_t f_ra = col(reference, "random_author_f1", reference_csv);
  const std::size_t f_ru = col(reference, "random_utility_f1", reference_csv);

  std::vector<std::string> order;
  std::map<std::string, std::string> body;
  for (const auto& row : results.rows) {
    const std::string& scenario = row[r_scen];
    if (!body.contains(scenario)) order.push_back(scenario);
    std::string& b = body[scenario];
    if (row[r_status] != "ok") continue;
    const double band = 2.0 * std::stod(row[r_us]);
    b += "point," + row[r_mech] + ',' + row[r_param] + ',' + row[r_am] + ',' +
         row[r_as] + ',' + row[r_um] + ',' + FormatDouble(band) + '\n';
  }

  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& scenario : order) {
    const std::vector<std::string>* ref_row = nullptr;
    for (const auto& row : reference.rows) {
      if (row[f_scen] == scenario) {
        ref_row = &row;
        break;
      }
    }
    if (ref_row == nullptr) {
      throw InvalidInputError(reference_csv + " has no row for " + scenario);
    }
    std::string content =
        "kind,mechanism,param,author_f1,author_f1_std,utility_f1,"
        "utility_band\n" +
        body[scenario];
    content += "clean_ceiling,,," + (*ref_row)[f_ca] + ",0," +
               (*ref_row)[f_cu] + ",0\n";
    content += "random_floor,,," + (*ref_row)[f_ra] + ",0," +
               (*ref_row)[f_ru] + ",0\n";
    const fs::path path = fs::path(out_dir) / ("curve_" + scenario + ".csv");
    WriteAtomically(path, content);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace ldptext
