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

// Command-line front end. Exit status: 0 success, 1 error, 2 usage,
// 3 run finished with failed cells.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldptext/accountant.h"
#include "ldptext/attack_eval.h"
#include "ldptext/corpus.h"
#include "ldptext/dp_decode.h"
#include "ldptext/embedding_table.h"
#include "ldptext/errors.h"
#include "ldptext/ngram_model.h"
#include "ldptext/pipeline.h"
#include "ldptext/remote_scorer.h"
#include "ldptext/rng.h"
#include "ldptext/sentence_dp.h"
#include "ldptext/word_dp.h"

namespace ldptext {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartialFailure = 3;

Json ReportJson(const PrivacyReport& r) {
  Json j;
  j["mechanism"] = r.mechanism;
  j["granularity"] = GranularityName(r.granularity);
  j["epsilon"] = r.epsilon.ToString();
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  return j;
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string corpus;
};

int Ingest(const IngestArgs& a) {
  Corpus c = IngestCorpus(a.corpus);
  std::cout << "documents " << c.docs.size() << '\n';
  auto print = [](const char* name, const std::vector<std::string>& labels,
                  const std::vector<double>& fractions) {
    std::cout << name << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::cout << "  " << labels[i] << ' ' << FormatDouble(fractions[i])
                << '\n';
    }
    std::cout << "  expected_random_f1 "
              << FormatDouble(ExpectedRandomF1(fractions)) << '\n';
  };
  print("author_labels", c.author_labels, c.AuthorFractions());
  print("utility_labels", c.utility_labels, c.UtilityFractions());
  return 0;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  SyntheticOptions options;
  std::string out;
  std::string embeddings_out;
  std::size_t dim = 16;
  std::uint64_t embedding_seed = 0;
};

int Synth(const SynthArgs& a) {
  WriteCorpus(a.out, MakeSyntheticCorpus(a.options));
  std::cout << "wrote " << a.out << '\n';
  if (!a.embeddings_out.empty()) {
    MakeSyntheticEmbeddings(a.options, a.dim, a.embedding_seed)
        .Save(a.embeddings_out);
    std::cout << "wrote " << a.embeddings_out << '\n';
  }
  return 0;
}

// ---- train-scorer ---------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string out;
  NGramOptions options;
};

int TrainScorer(const TrainArgs& a) {
  Corpus c = IngestCorpus(a.corpus);
  NGramModel m = NGramModel::Train(c.docs, a.options);
  m.Save(a.out);
  std::cout << "vocabulary " << m.vocabulary().size() << " hash "
            << m.vocabulary().hash() << '\n';
  return 0;
}

// ---- learn-bounds ---------------------------------------------------------

struct BoundsArgs {
  std::string kind = "clip";
  std::string scorer;
  std::string public_corpus;
  std::string prompt_template = "Document: {doc}\nParaphrase of the document:";
  std::string embeddings;
  double q_low = 0.0;
  double q_high = 1.0;
  std::string out;
};

int LearnBounds(const BoundsArgs& a) {
  if (a.kind == "clip") {
    if (a.scorer.empty() || a.public_corpus.empty()) {
      throw InvalidParameterError("clip bounds need --scorer and --public");
    }
    NGramModel m = NGramModel::Load(a.scorer);
    Corpus pub = IngestCorpus(a.public_corpus);
    ClipBounds b = LearnClipBounds(m, pub.docs, a.prompt_template);
    SaveClipBounds(a.out, b, m.vocabulary());
    std::cout << "clip width " << FormatDouble(b.width()) << '\n';
    return 0;
  }
  if (a.embeddings.empty()) {
    throw InvalidParameterError("truncation bounds need --embeddings");
  }
  TruncationBounds b = LearnTruncationBounds(
      LoadSentenceEmbeddings(a.embeddings), a.q_low, a.q_high);
  b.Save(a.out);
  std::cout << "sensitivity " << FormatDouble(b.sensitivity()) << '\n';
  return 0;
}

// ---- sanitize -------------------------------------------------------------

struct SanitizeArgs {
  std::string mechanism;
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  // dp-prompt
  std::string scorer;
  std::string endpoint;
  std::string vocabulary;
  double temperature = 1.0;
  int max_tokens = 150;
  std::string clip_bounds;
  std::optional<int> top_k;
  std::string prompt_template = "Document: {doc}\nParaphrase of the document:";
  bool stop_at_eos = false;
  // word and sentence mechanisms
  std::string embeddings;
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::string bounds;
};

std::unique_ptr<TokenScorer> MakeScorer(const SanitizeArgs& a) {
  if (!a.endpoint.empty()) {
    if (a.vocabulary.empty()) {
      throw InvalidParameterError("--endpoint needs --vocabulary");
    }
    std::ifstream in(a.vocabulary);
    if (!in) throw InvalidInputError("cannot read " + a.vocabulary);
    std::vector<std::string> tokens;
    for (std::string line; std::getline(in, line);) tokens.push_back(line);
    return std::make_unique<RemoteScorer>(a.endpoint,
                                          Vocabulary(std::move(tokens)));
  }
  if (a.scorer.empty()) {
    throw InvalidParameterError("dp-prompt needs --scorer or --endpoint");
  }
  return std::make_unique<NGramModel>(NGramModel::Load(a.scorer));
}

RngStream DocStream(std::uint64_t seed, std::size_t index) {
  return RngStream(seed, StreamId({static_cast<std::uint64_t>(index)}));
}

int Sanitize(const SanitizeArgs& a) {
  const std::string report_path = a.out + ".report.json";
  auto write_report = [&](const PrivacyReport& r) {
    std::ofstream out(report_path);
    out << ReportJson(r).dump(2) << '\n';
  };

  if (a.mechanism == "trunc-laplace") {
    if (!a.epsilon || a.bounds.empty()) {
      throw InvalidParameterError("trunc-laplace needs --epsilon and --bounds");
    }
    auto input = LoadSentenceEmbeddings(a.input);
    TruncationBounds bounds = TruncationBounds::Load(a.bounds);
    std::vector<SentenceEmbedding> out;
    for (std::size_t i = 0; i < input.size(); ++i) {
      RngStream rng = DocStream(a.seed, i);
      out.push_back(TruncatedLaplaceSanitize(input[i], bounds, *a.epsilon, rng));
    }
    SaveSentenceEmbeddings(a.out, out);
    write_report(TruncatedLaplaceReport(bounds, *a.epsilon));
    return 0;
  }

  Corpus corpus = IngestCorpus(a.input);
  Corpus sanitized = corpus;
  PrivacyReport report;
  auto run = [&](auto&& sanitize_one) {
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
      RngStream rng = DocStream(a.seed, i);
      SanitizedDocument sd = sanitize_one(corpus.docs[i], rng);
      sanitized.docs[i].text = sd.text;
      report = sd.report;
    }
  };

  if (a.mechanism == "dp-prompt") {
    auto scorer = MakeScorer(a);
    DecodeOptions opts;
    opts.prompt_template = a.prompt_template;
    opts.temperature = a.temperature;
    opts.n_tokens = a.max_tokens;
    opts.top_k = a.top_k;
    opts.stop_at_eos = a.stop_at_eos;
    if (!a.clip_bounds.empty()) {
      opts.bounds = LoadClipBounds(a.clip_bounds, scorer->vocabulary());
    }
    run([&](const Document& d, RngStream& rng) {
      return DpPrompt(*scorer, d, opts, rng);
    });
  } else {
    if (a.embeddings.empty() || !a.epsilon) {
      throw InvalidParameterError(a.mechanism +
                                  " needs --embeddings and --epsilon");
    }
    EmbeddingTable table = EmbeddingTable::Load(a.embeddings);
    std::unique_ptr<WordMechanism> mech;
    if (a.mechanism == "madlib") {
      mech = std::make_unique<MadlibMechanism>(table, *a.epsilon);
    } else if (a.mechanism == "mahalanobis") {
      if (!a.lambda) throw InvalidParameterError("mahalanobis needs --lambda");
      mech = std::make_unique<MahalanobisMechanism>(table, *a.epsilon, *a.lambda);
    } else if (a.mechanism == "tem") {
      if (!a.gamma) throw InvalidParameterError("tem needs --gamma");
      mech = std::make_unique<TemMechanism>(table, *a.epsilon, *a.gamma);
    } else {
      throw InvalidParameterError("unknown mechanism '" + a.mechanism + "'");
    }
    run([&](const Document& d, RngStream& rng) {
      return mech->Sanitize(d, rng);
    });
  }
  WriteCorpus(a.out, sanitized);
  write_report(report);
  std::cout << "epsilon " << report.epsilon.ToString() << " ("
            << GranularityName(report.granularity) << ")\n";
  return 0;
}

// ---- attack ---------------------------------------------------------------

struct AttackArgs {
  std::string clean;
  std::vector<std::string> sanitized;
  std::vector<std::string> sanitized_embeddings;
  std::string embeddings;
  std::string scenario = "adaptive-text";
  std::uint64_t seed = 0;
  ClassifierOptions classifier;
};

int Attack(const AttackArgs& a) {
  const AttackScenario scenario = AttackScenario::Parse(a.scenario);
  Corpus clean = IngestCorpus(a.clean);
  std::optional<EmbeddingTable> table;
  if (!a.embeddings.empty()) table.emplace(EmbeddingTable::Load(a.embeddings));
  if (scenario.access == Access::kEmbedding && !table) {
    throw InvalidParameterError("embedding access needs --embeddings");
  }
  auto to_samples = [&](const Corpus& c, bool sanitized) {
    std::vector<Sample> out;
    for (const auto& d : c.docs) {
      Sample s{d.doc_id, d.text, {}, d.author_label, d.utility_label, sanitized};
      if (table) s.embedding = MeanWordEmbedding(*table, d.text);
      out.push_back(std::move(s));
    }
    return out;
  };
  std::vector<Sample> clean_samples = to_samples(clean, false);
  std::vector<std::vector<Sample>> repeats;
  for (const auto& path : a.sanitized) {
    Corpus s = IngestCorpus(path);
    repeats.push_back(to_samples(s, true));
  }
  for (const auto& path : a.sanitized_embeddings) {
    std::map<std::string, const Sample*> by_id;
    for (const auto& s : clean_samples) by_id[s.doc_id] = &s;
    std::vector<Sample> rep;
    for (auto& e : LoadSentenceEmbeddings(path)) {
      auto it = by_id.find(e.doc_id);
      if (it == by_id.end()) {
        throw InvalidInputError(path + ": unknown doc_id '" + e.doc_id + "'");
      }
      rep.push_back(Sample{e.doc_id, "", std::move(e.vector), it->second->author,
                           it->second->utility, true});
    }
    repeats.push_back(std::move(rep));
  }
  if (repeats.empty()) {
    throw InvalidParameterError("give --sanitized or --sanitized-embeddings");
  }
  EvalOptions eval;
  eval.classifier = a.classifier;
  eval.num_authors = static_cast<int>(clean.author_labels.size());
  eval.num_utility_labels = static_cast<int>(clean.utility_labels.size());
  PrivacyUtilityPoint p =
      EvaluatePoint(clean_samples, repeats, scenario, eval, a.seed);
  std::cout << "scenario,author_f1_mean,author_f1_std,utility_f1_mean,"
               "utility_f1_std,repeats,attacker\n"
            << p.scenario << ',' << FormatDouble(p.author_f1_mean) << ','
            << FormatDouble(p.author_f1_std) << ','
            << FormatDouble(p.utility_f1_mean) << ','
            << FormatDouble(p.utility_f1_std) << ',' << p.repeats.size() << ','
            << p.attacker << '\n';
  std::cout << "expected_random_author_f1 "
            << FormatDouble(ExpectedRandomF1(clean.AuthorFractions())) << '\n';
  return 0;
}

// ---- run / report / validate ----------------------------------------------

struct RunArgs {
  std::string config;
  std::string manifest;
  std::string output_dir;
  bool no_resume = false;
  std::optional<int> stop_after;
};

int Run(const RunArgs& a) {
  if (a.config.empty() == a.manifest.empty()) {
    throw InvalidParameterError("give exactly one of --config or --manifest");
  }
  ExperimentConfig config =
      a.config.empty() ? ConfigFromManifest(a.manifest) : LoadConfig(a.config);
  RunOptions opts;
  if (!a.output_dir.empty()) opts.output_dir = a.output_dir;
  opts.resume = !a.no_resume;
  opts.stop_after_cells = a.stop_after;
  RunSummary s = RunExperiment(config, opts);
  std::cout << "output " << s.output_dir << "\ncells total " << s.cells_total
            << " computed " << s.cells_computed << " reused " << s.cells_reused
            << " failed " << s.cells_failed << '\n';
  if (!s.complete) {
    std::cout << "stopped early; rerun to resume\n";
    return 0;
  }
  return s.cells_failed > 0 ? kExitPartialFailure : 0;
}

struct ReportArgs {
  std::string run_dir;
  std::string results;
  std::string reference;
  std::string out_dir;
};

int Report(ReportArgs a) {
  if (!a.run_dir.empty()) {
    const fs::path dir = ResolveOutputDir(a.run_dir);
    if (a.results.empty()) a.results = (dir / "results.csv").string();
    if (a.reference.empty()) a.reference = (dir / "reference.csv").string();
    if (a.out_dir.empty()) a.out_dir = (dir / "curves").string();
  }
  if (a.results.empty() || a.reference.empty() || a.out_dir.empty()) {
    throw InvalidParameterError(
        "give --run-dir or all of --results, --reference and --out");
  }
  for (const auto& path : WriteReport(a.results, a.reference, a.out_dir)) {
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

int Validate(const std::string& path) {
  ExperimentConfig config = LoadConfig(path);
  auto problems = ValidateConfig(config);
  for (const auto& p : problems) std::cerr << "error: " << p << '\n';
  if (!problems.empty()) return kExitError;
  std::size_t cells = 0;
  for (const auto& m : config.mechanisms) {
    cells += m.grid.size() * config.scenarios.size();
  }
  std::cout << "config ok: " << cells << " cells x " << config.repeats
            << " repeats, hash " << ConfigHash(config) << '\n';
  return 0;
}

// ---- serve-scorer ---------------------------------------------------------

std::sig_atomic_t volatile g_stop = 0;

int ServeScorer(const std::string& model_path, const std::string& host,
                int port) {
  NGramModel model = NGramModel::Load(model_path);
  ScorerService service(model);
  const int bound = service.Start(host, port);
  std::cout << "serving on " << host << ':' << bound << " vocab_hash "
            << model.vocabulary().hash() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.Stop();
  return 0;
}

}  // namespace
}  // namespace ldptext

int main(int argc, char** argv) {
  using namespace ldptext;
  CLI::App app{"Local differential privacy text sanitization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ToolkitVersion()));

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a corpus file");
  c_ingest->add_option("corpus", ingest.corpus)->required();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  c_synth->add_option("--out", synth.out)->required();
  c_synth->add_option("--authors", synth.options.n_authors);
  c_synth->add_option("--docs", synth.options.n_docs);
  c_synth->add_option("--style-strength", synth.options.style_strength);
  c_synth->add_option("--seed", synth.options.seed);
  c_synth->add_option("--sentiments", synth.options.n_sentiments);
  c_synth->add_option("--id-prefix", synth.options.id_prefix);
  c_synth->add_option("--embeddings-out", synth.embeddings_out);
  c_synth->add_option("--dim", synth.dim);
  c_synth->add_option("--embedding-seed", synth.embedding_seed);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-scorer", "Train an n-gram scorer");
  c_train->add_option("--corpus", train.corpus)->required();
  c_train->add_option("--out", train.out)->required();
  c_train->add_option("--order", train.options.order);
  c_train->add_option("--add-k", train.options.add_k);
  c_train->add_option("--min-count", train.options.min_count);
  c_train->add_option("--cache-weight", train.options.cache_weight);

  BoundsArgs bounds;
  auto* c_bounds =
      app.add_subcommand("learn-bounds", "Learn clip or truncation bounds");
  c_bounds->add_option("--kind", bounds.kind)
      ->check(CLI::IsMember({"clip", "truncation"}));
  c_bounds->add_option("--scorer", bounds.scorer);
  c_bounds->add_option("--public", bounds.public_corpus);
  c_bounds->add_option("--template", bounds.prompt_template);
  c_bounds->add_option("--embeddings", bounds.embeddings);
  c_bounds->add_option("--q-low", bounds.q_low);
  c_bounds->add_option("--q-high", bounds.q_high);
  c_bounds->add_option("--out", bounds.out)->required();

  SanitizeArgs san;
  auto* c_san = app.add_subcommand("sanitize", "Sanitize a corpus");
  c_san->add_option("--mechanism", san.mechanism)
      ->required()
      ->check(CLI::IsMember(
          {"dp-prompt", "madlib", "mahalanobis", "tem", "trunc-laplace"}));
  c_san->add_option("--input", san.input)->required();
  c_san->add_option("--out", san.out)->required();
  c_san->add_option("--seed", san.seed);
  c_san->add_option("--scorer", san.scorer);
  c_san->add_option("--endpoint", san.endpoint);
  c_san->add_option("--vocabulary", san.vocabulary);
  c_san->add_option("--temperature", san.temperature);
  c_san->add_option("--max-tokens", san.max_tokens);
  c_san->add_option("--clip-bounds", san.clip_bounds);
  c_san->add_option("--top-k", san.top_k);
  c_san->add_option("--template", san.prompt_template);
  c_san->add_flag("--stop-at-eos", san.stop_at_eos);
  c_san->add_option("--embeddings", san.embeddings);
  c_san->add_option("--epsilon", san.epsilon);
  c_san->add_option("--lambda", san.lambda);
  c_san->add_option("--gamma", san.gamma);
  c_san->add_option("--bounds", san.bounds);

  AttackArgs atk;
  auto* c_atk = app.add_subcommand("attack", "Evaluate one privacy point");
  c_atk->add_option("--clean", atk.clean)->required();
  c_atk->add_option("--sanitized", atk.sanitized);
  c_atk->add_option("--sanitized-embeddings", atk.sanitized_embeddings);
  c_atk->add_option("--embeddings", atk.embeddings);
  c_atk->add_option("--scenario", atk.scenario);
  c_atk->add_option("--seed", atk.seed);
  c_atk->add_option("--epochs", atk.classifier.epochs);

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run an experiment sweep");
  c_run->add_option("--config", run.config);
  c_run->add_option("--manifest", run.manifest);
  c_run->add_option("--output-dir", run.output_dir);
  c_run->add_flag("--no-resume", run.no_resume);
  c_run->add_option("--stop-after", run.stop_after);

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Write curve data from a run");
  c_rep->add_option("--run-dir", rep.run_dir);
  c_rep->add_option("--results", rep.results);
  c_rep->add_option("--reference", rep.reference);
  c_rep->add_option("--out", rep.out_dir);

  std::string validate_path;
  auto* c_val = app.add_subcommand("validate", "Check an experiment config");
  c_val->add_option("config", validate_path)->required();

  std::string serve_model, serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* c_serve =
      app.add_subcommand("serve-scorer", "Serve an n-gram scorer over HTTP");
  c_serve->add_option("--model", serve_model)->required();
  c_serve->add_option("--host", serve_host);
  c_serve->add_option("--port", serve_port);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    if (*c_ingest) return Ingest(ingest);
    if (*c_synth) return Synth(synth);
    if (*c_train) return TrainScorer(train);
    if (*c_bounds) return LearnBounds(bounds);
    if (*c_san) return Sanitize(san);
    if (*c_atk) return Attack(atk);
    if (*c_run) return Run(run);
    if (*c_rep) return Report(rep);
    if (*c_val) return Validate(validate_path);
    if (*c_serve) return ServeScorer(serve_model, serve_host, serve_port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
