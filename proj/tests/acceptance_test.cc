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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criterion 8 runs the bundled synthetic curve config end to end.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ldptext/accountant.h"
#include "ldptext/attack_eval.h"
#include "ldptext/dp_decode.h"
#include "ldptext/embedding_table.h"
#include "ldptext/pipeline.h"
#include "ldptext/rng.h"
#include "ldptext/sentence_dp.h"
#include "ldptext/word_dp.h"

namespace ldptext {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failing check, keeps later details for context.
void Check(Outcome& o, bool ok, const std::string& what) {
  if (!ok && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double TotalVariation(const std::vector<double>& p,
                      const std::vector<double>& q) {
  double tv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2;
}

Outcome Accountant() {
  Outcome o;
  const double e = EpsilonFor(ClipBounds::Scalar(4, 0.0, 1.0), 2.0, 10);
  Check(o, e == 10.0, Fmt("epsilon_for(1, 2, 10) = %g", e));
  for (double w : {0.25, 1.0, 3.0}) {
    const auto b = ClipBounds::Scalar(3, -w, 0.0);
    double previous = INFINITY;
    for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double base = EpsilonFor(b, t, 1);
      for (int n : {2, 7, 150}) {
        Check(o, std::abs(EpsilonFor(b, t, n) - n * base) <= 1e-12 * n * base,
              Fmt("not linear in n at width %g T %g", w, t));
      }
      Check(o, base < previous, Fmt("not decreasing in T at %g", t));
      previous = base;
      const auto b2 = ClipBounds::Scalar(3, -2 * w, 0.0);
      Check(o, std::abs(EpsilonFor(b2, t, 5) - 2 * EpsilonFor(b, t, 5)) < 1e-9,
            Fmt("not linear in width at %g", w));
    }
  }
  if (o.pass) o.detail = Fmt("epsilon_for(1, 2, 10) = %g", e);
  return o;
}

Outcome Sampler() {
  Outcome o;
  const std::vector<double> logits{0.5, -1.0, 2.0, 0.0, 1.2};
  const auto bounds = ClipBounds::Scalar(5, -0.5, 1.5);
  const double t = 0.8;
  std::vector<double> want(5);
  long double z = 0;
  for (int j = 0; j < 5; ++j) {
    const double c = std::clamp(logits[j], -0.5, 1.5) / t;
    want[j] = std::exp(c);
    z += want[j];
  }
  for (double& w : want) w = static_cast<double>(w / z);
  const ProbabilityVector p = ToProbabilities(ClipAndScale(logits, bounds, t));
  RngStream rng(2026, 2);
  std::vector<double> freq(5);
  const int n = 1000000;
  for (int i = 0; i < n; ++i) freq[SampleToken(p, rng)] += 1.0 / n;
  const double tv = TotalVariation(freq, want);
  Check(o, tv < 0.005, Fmt("TV %.5f", tv));
  if (o.pass) o.detail = Fmt("TV %.5f over 1e6 draws", tv);
  return o;
}

Outcome LdpRatio() {
  Outcome o;
  RngStream rng(2026, 3);
  double worst_margin = 0;
  for (double width : {0.5, 1.0, 2.0}) {
    for (double t : {0.75, 1.5}) {
      const std::size_t v = 16;
      // Random per-coordinate bounds of the given maximum width.
      std::vector<double> lo(v), hi(v);
      for (std::size_t j = 0; j < v; ++j) {
        lo[j] = 3 * rng.Normal();
        hi[j] = lo[j] + width * (j == 0 ? 1.0 : rng.Uniform());
      }
      const ClipBounds b(lo, hi);
      const double bound = std::exp(2 * width / t);
      for (int i = 0; i < 1000; ++i) {
        std::vector<double> u(v), w(v);
        for (std::size_t j = 0; j < v; ++j) {
          u[j] = lo[j] + (rng.Uniform() * 3 - 1) * width;
          w[j] = lo[j] + (rng.Uniform() * 3 - 1) * width;
        }
        const auto p = ToProbabilities(ClipAndScale(u, b, t));
        const auto q = ToProbabilities(ClipAndScale(w, b, t));
        for (std::size_t j = 0; j < v; ++j) {
          const double r = p[j] / q[j];
          worst_margin = std::max(worst_margin, r / bound);
          Check(o, r <= bound * (1 + 1e-9),
                Fmt("ratio %g exceeds bound %g", r, bound));
        }
      }
    }
  }
  if (o.pass) o.detail = Fmt("max ratio / bound = %.4f", worst_margin);
  return o;
}

Outcome MadlibNoise() {
  Outcome o;
  const std::size_t d = 50;
  const int n = 100000;
  RngStream rng(2026, 4);
  double norm = 0;
  std::vector<double> sum(d), sq(d);
  for (int i = 0; i < n; ++i) {
    const auto z = SamplePlanarLaplace(d, 5.0, rng);
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) {
      s += z[k] * z[k];
      sum[k] += z[k];
      sq[k] += z[k] * z[k];
    }
    norm += std::sqrt(s);
  }
  norm /= n;
  Check(o, std::abs(norm - 10.0) <= 0.2, Fmt("mean norm %.4f", norm));
  for (std::size_t k = 0; k < d; ++k) {
    const double m = sum[k] / n;
    const double se = std::sqrt((sq[k] / n - m * m) / n);
    Check(o, std::abs(m) <= 3 * se,
          Fmt("coordinate %g mean %g (se %g)", double(k), m, se));
  }
  if (o.pass) o.detail = Fmt("mean norm %.4f", norm);
  return o;
}

Outcome TemOracle() {
  Outcome o;
  RngStream gen(2026, 5);
  std::vector<std::string> words;
  std::vector<double> m;
  for (int i = 0; i < 10; ++i) {
    words.push_back("w" + std::to_string(i));
    for (int k = 0; k < 4; ++k) m.push_back(0.6 * gen.Normal());
  }
  const EmbeddingTable table(Vocabulary(words), m, 4);
  double worst = 0;
  for (double eps : {2.0, 5.0}) {
    // Gamma at the median pairwise distance exercises both branches.
    std::vector<double> all;
    for (TokenId i = 0; i < 10; ++i) {
      for (TokenId j = i + 1; j < 10; ++j) all.push_back(table.Distance(i, j));
    }
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    const double gamma = all[all.size() / 2];
    TemMechanism tem(table, eps, gamma);
    for (TokenId w : {0, 7}) {
      std::vector<double> want(10);
      double z = 0;
      for (TokenId j = 0; j < 10; ++j) {
        const double dist = table.Distance(w, j);
        z += want[j] = std::exp(-eps * std::min(dist, gamma) / 2);
      }
      for (double& x : want) x /= z;
      std::vector<double> freq(10);
      const int n = 100000;
      for (int i = 0; i < n; ++i) freq[tem.Select(w, gen)] += 1.0 / n;
      const double tv = TotalVariation(freq, want);
      worst = std::max(worst, tv);
      Check(o, tv < 0.01, Fmt("epsilon %g word %g TV %.4f", eps, w, tv));
    }
  }
  if (o.pass) o.detail = Fmt("worst TV %.4f", worst);
  return o;
}

Outcome TruncatedLaplace() {
  Outcome o;
  RngStream rng(2026, 6);
  const std::size_t d = 8;
  std::vector<SentenceEmbedding> pub;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.Normal();
    pub.push_back({"p" + std::to_string(i), v});
  }
  const TruncationBounds b = LearnTruncationBounds(pub, 0.05, 0.95);
  const double eps = 20.0;
  const int n = 10000;
  int out_of_bounds = 0;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    SentenceEmbedding e{"x", std::vector<double>(d)};
    for (double& x : e.vector) x = 2 * rng.Normal();
    const auto draw = TruncatedLaplaceSample(e, b, eps, rng);
    for (std::size_t k = 0; k < d; ++k) {
      const double y = draw.output.vector[k];
      out_of_bounds += y < b.lower()[k] || y > b.upper()[k];
      const double noise =
          draw.unclamped[k] - std::clamp(e.vector[k], b.lower()[k], b.upper()[k]);
      s += noise;
      s2 += noise * noise;
    }
  }
  const double total = double(n) * d;
  const double sd = std::sqrt(s2 / total - (s / total) * (s / total));
  const double want = std::sqrt(2.0) * b.sensitivity() / eps;
  Check(o, out_of_bounds == 0, Fmt("%g outputs out of bounds", out_of_bounds));
  Check(o, std::abs(sd / want - 1) <= 0.05,
        Fmt("noise std %.4f vs %.4f", sd, want));
  if (o.pass) o.detail = Fmt("noise std %.4f vs %.4f, 0 out of bounds", sd, want);
  return o;
}

Outcome RandomBaseline() {
  Outcome o;
  const std::vector<std::vector<double>> dists{
      {0.5, 0.5},
      std::vector<double>(10, 0.1),
      {0.75, 0.25},
      {0.6, 0.3, 0.1},
      {0.4, 0.2, 0.2, 0.1, 0.05, 0.05}};
  RngStream rng(2026, 7);
  double worst = 0;
  for (const auto& f : dists) {
    const int l = static_cast<int>(f.size());
    const int n = 400000;
    std::vector<int> labels(n), preds(n);
    for (int i = 0; i < n; ++i) {
      double u = rng.Uniform();
      int c = 0;
      while (c + 1 < l && u >= f[c]) u -= f[c++];
      labels[i] = c;
      preds[i] = static_cast<int>(rng.UniformInt(l));
    }
    const double got = MacroF1(preds, labels, l);
    const double want = ExpectedRandomF1(f);
    worst = std::max(worst, std::abs(got - want));
    Check(o, std::abs(got - want) <= 0.01,
          Fmt("l=%g empirical %.4f expected %.4f", l, got, want));
  }
  const std::vector<double> half{0.5, 0.5}, ten(10, 0.1);
  Check(o, std::abs(ExpectedRandomF1(half) - 0.5) < 1e-12, "balanced binary");
  Check(o, std::abs(ExpectedRandomF1(ten) - 0.1) < 1e-12, "uniform ten");
  if (o.pass) o.detail = Fmt("worst gap %.4f over 5 distributions", worst);
  return o;
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path ScratchRoot() {
  static const fs::path root =
      fs::temp_directory_path() /
      ("ldptext_acceptance_" + std::to_string(::getpid()));
  return root;
}

Outcome Curve() {
  Outcome o;
  ExperimentConfig config =
      LoadConfig(LDPTEXT_SOURCE_DIR "/tools/configs/synthetic_curve.json");
  RunOptions options;
  options.output_dir = (ScratchRoot() / "curve").string();
  options.resume = false;
  const RunSummary s = RunExperiment(config, options);
  Check(o, s.complete && s.cells_failed == 0, "run incomplete or failed");
  if (!o.pass) return o;
  const auto results = ReadCsv(fs::path(s.output_dir) / "results.csv");
  const auto reference = ReadCsv(fs::path(s.output_dir) / "reference.csv");
  // Columns: mechanism,param,scenario,author_f1_mean,author_f1_std,
  // utility_f1_mean,utility_f1_std,epsilon,status
  std::vector<double> temps, author, utility;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const auto& r = results[i];
    Check(o, r.size() == 9 && r[8] == "ok", "unexpected results row");
    if (!o.pass) return o;
    temps.push_back(std::stod(r[1]));
    author.push_back(std::stod(r[3]));
    utility.push_back(std::stod(r[5]));
  }
  Check(o, temps == std::vector<double>{0.75, 1.0, 1.5, 2.0},
        "temperature grid differs");
  Check(o, reference.size() == 2, "reference table malformed");
  if (!o.pass) return o;
  const double random_author = std::stod(reference[1][3]);
  for (std::size_t i = 1; i < author.size(); ++i) {
    Check(o, author[i] <= author[i - 1] + 0.05,
          Fmt("author F1 rises from %.3f to %.3f at T=%g", author[i - 1],
              author[i], temps[i]));
  }
  Check(o, std::abs(author.back() - random_author) <= 0.10,
        Fmt("author F1 %.3f at T=2 vs random %.3f", author.back(),
            random_author));
  Check(o, utility.front() > 0.80,
        Fmt("sentiment F1 %.3f at T=0.75", utility.front()));
  std::ostringstream detail;
  detail << "author F1";
  for (double a : author) detail << ' ' << Fmt("%.3f", a);
  detail << " (random " << Fmt("%.3f", random_author) << "), sentiment F1 at "
         << "T=0.75 " << Fmt("%.3f", utility.front());
  if (o.pass) o.detail = detail.str();
  return o;
}

Outcome Determinism() {
  Outcome o;
  const fs::path first = ScratchRoot() / "curve";
  if (!fs::exists(first / "manifest.json")) {
    return {false, "criterion 8 produced no manifest"};
  }
  const ExperimentConfig config =
      ConfigFromManifest((first / "manifest.json").string());
  RunOptions options;
  options.output_dir = (ScratchRoot() / "replay").string();
  options.resume = false;
  RunExperiment(config, options);
  const std::string a = Slurp(first / "results.csv");
  const std::string b = Slurp(ScratchRoot() / "replay" / "results.csv");
  Check(o, !a.empty() && a == b, "results.csv differs on replay");
  Check(o, Slurp(first / "reference.csv") ==
               Slurp(ScratchRoot() / "replay" / "reference.csv"),
        "reference.csv differs on replay");
  if (o.pass) o.detail = std::to_string(a.size()) + " bytes identical";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace ldptext

int main() {
  using namespace ldptext;
  const std::vector<Criterion> criteria{
      {1, "accountant exactness", 1, Accountant},
      {2, "sampler fidelity", 10, Sampler},
      {3, "ldp ratio bound", 30, LdpRatio},
      {4, "madlib noise law", 30, MadlibNoise},
      {5, "tem oracle equivalence", 60, TemOracle},
      {6, "truncated laplace", 30, TruncatedLaplace},
      {7, "random baseline formula", 30, RandomBaseline},
      {8, "privacy-utility curve", 300, Curve},
      {9, "determinism from manifest", 300, Determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (o.pass && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " (over time budget)";
    }
    failures += !o.pass;
    std::printf("criterion %d: %s  %s  [%.2fs / %.0fs]  %s\n", c.id,
                o.pass ? "PASS" : "FAIL", c.name, secs, c.budget_seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::filesystem::remove_all(ScratchRoot());
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
