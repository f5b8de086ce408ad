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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ldptext/errors.h"
#include "ldptext/pipeline.h"

namespace ldptext {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Reads one JSON object, remembering which keys were consumed so that
// Finish() can reject the rest.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) Fail("expected an object");
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  const Json& Raw(const std::string& key) {
    if (!j_.contains(key)) Fail("missing required key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T Get(const std::string& key) {
    const Json& v = Raw(key);
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      Fail("key '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    if (!Has(key)) return fallback;
    return Get<T>(key);
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) Fail("unknown key '" + key + "'");
    }
  }

  Reader Child(const std::string& key) {
    return Reader(Raw(key), where_ + "." + key);
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw ParseError("config", 0, where_ + ": " + message);
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return fs::absolute(p).lexically_normal().string();
}

SyntheticOptions ParseSynthetic(Reader r) {
  SyntheticOptions o;
  o.n_authors = r.Get("n_authors", o.n_authors);
  o.n_docs = r.Get("n_docs", o.n_docs);
  o.style_strength = r.Get("style_strength", o.style_strength);
  o.seed = r.Get("seed", o.seed);
  o.n_sentiments = r.Get("n_sentiments", o.n_sentiments);
  o.filler_words = r.Get("filler_words", o.filler_words);
  o.style_words_per_author =
      r.Get("style_words_per_author", o.style_words_per_author);
  o.polarity_words_per_label =
      r.Get("polarity_words_per_label", o.polarity_words_per_label);
  o.min_length = r.Get("min_length", o.min_length);
  o.max_length = r.Get("max_length", o.max_length);
  o.style_rate = r.Get("style_rate", o.style_rate);
  o.polarity_rate = r.Get("polarity_rate", o.polarity_rate);
  o.id_prefix = r.Get("id_prefix", o.id_prefix);
  r.Finish();
  return o;
}

Json SyntheticJson(const SyntheticOptions& o) {
  Json j;
  j["n_authors"] = o.n_authors;
  j["n_docs"] = o.n_docs;
  j["style_strength"] = o.style_strength;
  j["seed"] = o.seed;
  j["n_sentiments"] = o.n_sentiments;
  j["filler_words"] = o.filler_words;
  j["style_words_per_author"] = o.style_words_per_author;
  j["polarity_words_per_label"] = o.polarity_words_per_label;
  j["min_length"] = o.min_length;
  j["max_length"] = o.max_length;
  j["style_rate"] = o.style_rate;
  j["polarity_rate"] = o.polarity_rate;
  j["id_prefix"] = o.id_prefix;
  return j;
}

CorpusSource ParseCorpusSource(Reader& parent, const std::string& key,
                               const std::string& base_dir) {
  const Json& v = parent.Raw(key);
  CorpusSource s;
  if (v.is_string()) {
    s.path = Resolve(v.get<std::string>(), base_dir);
    return s;
  }
  Reader r(v, key);
  s.synthetic = ParseSynthetic(r.Child("synthetic"));
  r.Finish();
  return s;
}

Json CorpusSourceJson(const CorpusSource& s) {
  if (!s.synthetic) return s.path;
  Json j;
  j["synthetic"] = SyntheticJson(*s.synthetic);
  return j;
}

const std::set<std::string>& MechanismNames() {
  static const std::set<std::string> names{"dp-prompt", "madlib",
                                           "mahalanobis", "tem",
                                           "trunc-laplace"};
  return names;
}

MechanismConfig ParseMechanism(Reader r) {
  MechanismConfig m;
  m.name = r.Get<std::string>("name");
  if (!MechanismNames().contains(m.name)) {
    r.Fail("unknown mechanism '" + m.name + "'");
  }
  if (m.name == "dp-prompt") {
    m.grid = r.Get<std::vector<double>>("temperatures");
    m.prompt_template = r.Get<std::string>(
        "prompt_template", "Document: {doc}\nParaphrase of the document:");
    m.n_tokens = r.Get("n_tokens", m.n_tokens);
    if (r.Has("clip")) {
      const Json& c = r.Raw("clip");
      if (c.is_string()) {
        m.clip = c.get<std::string>();
        if (m.clip != "learned" && m.clip != "none") {
          r.Fail("clip must be \"learned\", \"none\" or {lower, upper}");
        }
      } else {
        Reader cr(c, "clip");
        m.clip = "fixed";
        m.clip_lower = cr.Get<double>("lower");
        m.clip_upper = cr.Get<double>("upper");
        cr.Finish();
      }
    }
    if (r.Has("top_k") && !r.Raw("top_k").is_null()) {
      m.top_k = r.Get<int>("top_k");
    }
    m.stop_at_eos = r.Get("stop_at_eos", false);
  } else {
    m.grid = r.Get<std::vector<double>>("epsilons");
    if (m.name == "mahalanobis") m.lambda = r.Get<double>("lambda");
    if (m.name == "tem") m.gamma = r.Get<double>("gamma");
    if (m.name == "trunc-laplace" && r.Has("quantiles")) {
      auto q = r.Get<std::vector<double>>("quantiles");
      if (q.size() != 2) r.Fail("quantiles must be [low, high]");
      m.quantile_low = q[0];
      m.quantile_high = q[1];
    }
  }
  r.Finish();
  return m;
}

Json MechanismJson(const MechanismConfig& m) {
  Json j;
  j["name"] = m.name;
  if (m.name == "dp-prompt") {
    j["temperatures"] = m.grid;
    j["prompt_template"] = m.prompt_template;
    j["n_tokens"] = m.n_tokens;
    if (m.clip == "fixed") {
      j["clip"] = {{"lower", m.clip_lower}, {"upper", m.clip_upper}};
    } else {
      j["clip"] = m.clip;
    }
    j["top_k"] = m.top_k ? Json(*m.top_k) : Json(nullptr);
    j["stop_at_eos"] = m.stop_at_eos;
    return j;
  }
  j["epsilons"] = m.grid;
  if (m.lambda) j["lambda"] = *m.lambda;
  if (m.gamma) j["gamma"] = *m.gamma;
  if (m.name == "trunc-laplace") {
    j["quantiles"] = {m.quantile_low, m.quantile_high};
  }
  return j;
}

}  // namespace

ExperimentConfig ParseConfig(std::string_view json_text,
                             const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config", 0, e.what());
  }
  Reader r(j, "config");
  ExperimentConfig c;
  c.private_corpus = ParseCorpusSource(r, "private_corpus", base_dir);
  c.public_corpus = ParseCorpusSource(r, "public_corpus", base_dir);
  c.output_dir = r.Get<std::string>("output_dir");
  c.seed = r.Get<std::uint64_t>("seed", 0);
  c.repeats = r.Get("repeats", 3);
  c.workers = r.Get("workers", 1);
  if (r.Has("split")) {
    Reader s = r.Child("split");
    c.split.train = s.Get("train", c.split.train);
    c.split.val = s.Get("val", c.split.val);
    c.split.test = s.Get("test", c.split.test);
    s.Finish();
  }
  if (r.Has("classifier")) {
    Reader k = r.Child("classifier");
    auto& o = c.classifier;
    o.epochs = k.Get("epochs", o.epochs);
    o.batch_size = k.Get("batch_size", o.batch_size);
    o.learning_rate = k.Get("learning_rate", o.learning_rate);
    o.l2 = k.Get("l2", o.l2);
    o.patience = k.Get("patience", o.patience);
    o.seed = k.Get("seed", o.seed);
    k.Finish();
  }
  if (r.Has("scorer")) {
    Reader s = r.Child("scorer");
    auto& sc = c.scorer;
    sc.type = s.Get<std::string>("type", "ngram");
    if (sc.type == "ngram") {
      sc.model = Resolve(s.Get<std::string>("model", ""), base_dir);
      sc.ngram.order = s.Get("order", sc.ngram.order);
      sc.ngram.add_k = s.Get("add_k", sc.ngram.add_k);
      sc.ngram.min_count = s.Get("min_count", sc.ngram.min_count);
      sc.ngram.cache_weight = s.Get("cache_weight", sc.ngram.cache_weight);
    } else if (sc.type == "remote") {
      sc.endpoint = s.Get<std::string>("endpoint");
      sc.vocabulary = Resolve(s.Get<std::string>("vocabulary"), base_dir);
      sc.timeout_seconds = s.Get("timeout_seconds", sc.timeout_seconds);
    } else {
      s.Fail("scorer type must be \"ngram\" or \"remote\"");
    }
    s.Finish();
  }
  if (r.Has("word_embeddings") && !r.Raw("word_embeddings").is_null()) {
    const Json& w = r.Raw("word_embeddings");
    WordEmbeddingSource src;
    if (w.is_string()) {
      src.path = Resolve(w.get<std::string>(), base_dir);
    } else {
      Reader wr(w, "word_embeddings");
      Reader syn = wr.Child("synthetic");
      src.synthetic_dim = syn.Get<std::size_t>("dim");
      src.synthetic_seed = syn.Get<std::uint64_t>("seed", 0);
      syn.Finish();
      wr.Finish();
    }
    c.word_embeddings = src;
  }
  const Json& mechs = r.Raw("mechanisms");
  if (!mechs.is_array()) r.Fail("mechanisms must be an array");
  for (std::size_t i = 0; i < mechs.size(); ++i) {
    c.mechanisms.push_back(
        ParseMechanism(Reader(mechs[i], "mechanisms[" + std::to_string(i) + "]")));
  }
  if (r.Has("scenarios")) {
    for (const auto& name : r.Get<std::vector<std::string>>("scenarios")) {
      try {
        c.scenarios.push_back(AttackScenario::Parse(name));
      } catch (const InvalidParameterError& e) {
        r.Fail(e.what());
      }
    }
  } else {
    c.scenarios = AttackScenario::All();
  }
  r.Finish();
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), fs::absolute(path).parent_path().string());
}

std::string ConfigToJson(const ExperimentConfig& c) {
  Json j;
  j["private_corpus"] = CorpusSourceJson(c.private_corpus);
  j["public_corpus"] = CorpusSourceJson(c.public_corpus);
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["repeats"] = c.repeats;
  j["workers"] = c.workers;
  j["split"] = {{"train", c.split.train},
                {"val", c.split.val},
                {"test", c.split.test}};
  const auto& o = c.classifier;
  j["classifier"] = {{"epochs", o.epochs},
                     {"batch_size", o.batch_size},
                     {"learning_rate", o.learning_rate},
                     {"l2", o.l2},
                     {"patience", o.patience},
                     {"seed", o.seed}};
  Json s;
  s["type"] = c.scorer.type;
  if (c.scorer.type == "remote") {
    s["endpoint"] = c.scorer.endpoint;
    s["vocabulary"] = c.scorer.vocabulary;
    s["timeout_seconds"] = c.scorer.timeout_seconds;
  } else {
    s["model"] = c.scorer.model;
    s["order"] = c.scorer.ngram.order;
    s["add_k"] = c.scorer.ngram.add_k;
    s["min_count"] = c.scorer.ngram.min_count;
    s["cache_weight"] = c.scorer.ngram.cache_weight;
  }
  j["scorer"] = s;
  if (c.word_embeddings) {
    const auto& w = *c.word_embeddings;
    if (w.synthetic_dim) {
      j["word_embeddings"] = {
          {"synthetic", {{"dim", *w.synthetic_dim}, {"seed", w.synthetic_seed}}}};
    } else {
      j["word_embeddings"] = w.path;
    }
  } else {
    j["word_embeddings"] = nullptr;
  }
  Json mechs = Json::array();
  for (const auto& m : c.mechanisms) mechs.push_back(MechanismJson(m));
  j["mechanisms"] = mechs;
  Json scen = Json::array();
  for (const auto& sc : c.scenarios) scen.push_back(sc.name());
  j["scenarios"] = scen;
  return j.dump(2);
}

std::string ConfigHash(const ExperimentConfig& config) {
  return Fnv1a64Hex(ConfigToJson(config));
}

std::vector<std::string> CheckConfig(const ExperimentConfig& c) {
  std::vector<std::string> problems;
  auto need = [&problems](bool ok, std::string message) {
    if (!ok) problems.push_back(std::move(message));
  };
  auto check_source = [&need](const CorpusSource& s, const std::string& what) {
    need(s.synthetic || !s.path.empty(), what + ": no corpus given");
  };
  check_source(c.private_corpus, "private_corpus");
  check_source(c.public_corpus, "public_corpus");
  if (c.private_corpus.synthetic && c.public_corpus.synthetic) {
    need(c.private_corpus.synthetic->id_prefix !=
             c.public_corpus.synthetic->id_prefix,
         "synthetic public and private corpora need distinct id_prefix");
  }
  need(!c.output_dir.empty(), "output_dir is empty");
  need(c.repeats >= 1, "repeats must be >= 1");
  need(c.workers >= 1, "workers must be >= 1");
  need(c.split.train > 0 && c.split.val > 0 && c.split.test > 0 &&
           std::abs(c.split.train + c.split.val + c.split.test - 1.0) < 1e-9,
       "split ratios must be positive and sum to 1");
  need(c.classifier.epochs >= 1 && c.classifier.batch_size >= 0 &&
           c.classifier.learning_rate > 0 && c.classifier.l2 >= 0 &&
           c.classifier.patience >= 0,
       "invalid classifier options");
  need(!c.mechanisms.empty(), "mechanisms is empty");
  need(!c.scenarios.empty(), "scenarios is empty");

  bool needs_words = false;
  bool has_dp_prompt = false;
  std::set<std::string> seen;
  for (const auto& m : c.mechanisms) {
    const std::string where = "mechanism " + m.name;
    need(seen.insert(m.name).second, where + " listed twice");
    need(!m.grid.empty(), where + ": parameter grid is empty");
    for (double p : m.grid) {
      need(std::isfinite(p) && p > 0, where + ": grid values must be > 0");
    }
    std::set<double> unique(m.grid.begin(), m.grid.end());
    need(unique.size() == m.grid.size(), where + ": duplicate grid value");
    if (m.name == "dp-prompt") {
      has_dp_prompt = true;
      need(m.n_tokens >= 1, where + ": n_tokens must be >= 1");
      need(m.prompt_template.find("{doc}") != std::string::npos,
           where + ": prompt_template lacks {doc}");
      if (m.clip == "fixed") {
        need(std::isfinite(m.clip_lower) && std::isfinite(m.clip_upper) &&
                 m.clip_lower <= m.clip_upper,
             where + ": clip needs finite lower <= upper");
      }
      if (m.top_k) need(*m.top_k >= 1, where + ": top_k must be >= 1");
    } else {
      needs_words = true;
    }
    if (m.name == "mahalanobis") {
      need(m.lambda && *m.lambda >= 0 && *m.lambda <= 1,
           where + ": lambda must be in [0, 1]");
    }
    if (m.name == "tem") need(m.gamma && *m.gamma > 0, where + ": gamma must be > 0");
    if (m.name == "trunc-laplace") {
      need(m.quantile_low >= 0 && m.quantile_low < m.quantile_high &&
               m.quantile_high <= 1,
           where + ": quantiles must satisfy 0 <= low < high <= 1");
    }
  }
  for (const auto& s : c.scenarios) {
    if (s.access == Access::kEmbedding) needs_words = true;
  }
  if (needs_words) {
    need(c.word_embeddings.has_value(),
         "word_embeddings are required by the word mechanisms, "
         "trunc-laplace and embedding-access scenarios");
  }
  if (c.word_embeddings && c.word_embeddings->synthetic_dim) {
    need(c.private_corpus.synthetic.has_value(),
         "synthetic word_embeddings need a synthetic private_corpus");
    need(*c.word_embeddings->synthetic_dim >= 1, "word_embeddings.dim must be >= 1");
  }
  if (has_dp_prompt && c.scorer.type == "ngram") {
    const auto& n = c.scorer.ngram;
    need(n.order >= 1 && n.add_k > 0 && n.min_count >= 1 &&
             n.cache_weight >= 0 && n.cache_weight < 1,
         "invalid ngram scorer options");
  }
  return problems;
}

std::vector<std::string> ValidateConfig(const ExperimentConfig& c) {
  auto problems = CheckConfig(c);
  if (!problems.empty()) return problems;
  try {
    Corpus priv = LoadCorpusSource(c.private_corpus);
    Corpus pub = LoadCorpusSource(c.public_corpus);
    RequireDisjoint(pub.docs, priv.docs);
    if (priv.author_labels.size() < 2) {
      problems.push_back("private corpus has fewer than two authors");
    }
    if (c.word_embeddings && !c.word_embeddings->path.empty()) {
      EmbeddingTable::Load(c.word_embeddings->path);
    }
    if (!c.scorer.model.empty()) NGramModel::Load(c.scorer.model);
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  return problems;
}

}  // namespace ldptext
