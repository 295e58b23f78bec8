// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite. Prints one PASS or FAIL line per criterion AC1..AC11 and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "support/procedural_corpus.h"
#include "synthaudit/attack.h"
#include "synthaudit/corpus.h"
#include "synthaudit/embedding.h"
#include "synthaudit/features.h"
#include "synthaudit/fidelity.h"
#include "synthaudit/genharness.h"
#include "synthaudit/logreg.h"
#include "synthaudit/report.h"
#include "synthaudit/rng.h"
#include "synthaudit/sampling.h"

namespace synthaudit {
namespace {

namespace fs = std::filesystem;

// Collects failed checks for one criterion.
class Check {
 public:
  void Near(const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      Fail(what + ": got " + Str(got) + ", want " + Str(want) + " +- " +
           Str(tol));
    }
  }
  void True(const std::string& what, bool ok) {
    if (!ok) Fail(what);
  }
  void Fail(const std::string& why) {
    if (failures_.empty()) first_ = why;
    failures_.push_back(why);
  }
  bool ok() const { return failures_.empty(); }
  size_t failures() const { return failures_.size(); }
  const std::string& first() const { return first_; }

  static std::string Str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
  }

 private:
  std::vector<std::string> failures_;
  std::string first_;
};

struct Outcome {
  Check check;
  std::string detail;
};

std::vector<corpus::TokenizedPost> Docs(const std::vector<std::string>& texts) {
  std::vector<corpus::TokenizedPost> out;
  for (size_t i = 0; i < texts.size(); ++i) {
    out.push_back(corpus::Tokenize(
        {"d" + std::to_string(i), "u", texts[i], std::nullopt, std::nullopt}));
  }
  return out;
}

attack::PredictionSet OneHot(const std::vector<std::string>& labels,
                             const std::vector<std::string>& predicted) {
  attack::PredictionSet p;
  p.labels = labels;
  for (size_t i = 0; i < predicted.size(); ++i) {
    p.post_ids.push_back("p" + std::to_string(i));
    for (const auto& l : labels) p.probabilities.push_back(l == predicted[i]);
  }
  return p;
}

std::map<std::string, std::string> Truth(
    const std::vector<std::string>& authors) {
  std::map<std::string, std::string> t;
  for (size_t i = 0; i < authors.size(); ++i) {
    t["p" + std::to_string(i)] = authors[i];
  }
  return t;
}

Outcome Ac1FormulaOracles() {
  Outcome o;
  Check& c = o.check;
  // Cochran: Z^2 sigma2 / E^2 and the finite-population correction.
  c.Near("cochran infinite", sampling::CochranInfinite(1.96, 25, 1),
         1.96 * 1.96 * 25, 1e-9);
  c.Near("cochran finite", sampling::CochranFinite(1.96, 25, 1, 1000),
         std::ceil(96040.0 / 1095.04), 1e-9);
  c.Near("cochran finite clamp", sampling::CochranFinite(1.96, 1e6, 0.01, 500),
         500, 0);

  const auto alloc =
      sampling::NeymanAllocate(10, {{100, 2}, {300, 1}, {100, 4}});
  const double weights[] = {200, 300, 400};
  for (size_t i = 0; i < 3; ++i) {
    c.Near("neyman raw share " + std::to_string(i), alloc.raw_shares[i],
           10.0 * weights[i] / 900, 1e-9);
    c.Near("neyman allocation " + std::to_string(i),
           static_cast<double>(alloc.allocations[i]),
           std::ceil(10.0 * weights[i] / 900), 0);
  }

  c.Near("flesch ease", *features::FleschReadingEase(3, 1, 3),
         206.835 - 1.015 * 3 - 84.6 * 1, 1e-9);
  c.Near("flesch grade", *features::FleschKincaidGrade(20, 2, 30),
         0.39 * 10 + 11.8 * 1.5 - 15.59, 1e-9);

  const auto docs = Docs({"a b", "a c", "a d"});
  const auto vocab =
      features::BuildTfidfVocab(docs, {.max_features = 3000, .max_ngram = 1});
  const auto v = features::TfidfFeatures(docs[0], vocab);
  const double idf_b = std::log(4.0 / 2.0) + 1.0;
  const double norm = std::hypot(1.0, idf_b);
  c.True("tfidf vocabulary",
         vocab.terms() == std::vector<std::string>{"a", "b", "c", "d"});
  c.Near("tfidf a", v[0], 1.0 / norm, 1e-9);
  c.Near("tfidf b", v[1], idf_b / norm, 1e-9);
  c.Near("tfidf c", v[2], 0.0, 0);

  const auto s = attack::Evaluate(OneHot({"a", "b"}, {"a", "b", "b", "b"}),
                                  Truth({"a", "a", "b", "b"}));
  const double f1_a = 2.0 * 1.0 * 0.5 / 1.5;
  const double f1_b = 2.0 * (2.0 / 3.0) / (5.0 / 3.0);
  c.Near("accuracy", s.accuracy, 0.75, 1e-9);
  c.Near("macro f1", s.macro_f1, (f1_a + f1_b) / 2, 1e-9);
  const auto constant = attack::Evaluate(
      OneHot({"a", "b"}, {"a", "a", "a", "a"}), Truth({"a", "a", "b", "b"}));
  c.Near("macro f1 constant", constant.macro_f1, (2.0 / 3.0) / 2, 1e-9);
  o.detail = "cochran, neyman, flesch, tf-idf, macro-F1";
  return o;
}

Outcome Ac2RelativeReduction() {
  Outcome o;
  const double a = attack::RelativeReduction(0.81, 0.297);
  const double b = attack::RelativeReduction(0.81, 0.165);
  o.check.Near("0.81 -> 0.297", a, 63.33, 0.01);
  o.check.Near("0.81 -> 0.165", b, 79.63, 0.01);
  o.detail = Check::Str(a) + "% and " + Check::Str(b) + "%";
  return o;
}

Outcome Ac3Gradient() {
  Outcome o;
  Rng rng(31);
  const size_t n = 5, d = 4, k = 3;
  std::vector<double> x(n * d), w(k * d), b(k);
  for (double& v : x) v = rng.Normal();
  for (double& v : w) v = 0.5 * rng.Normal();
  for (double& v : b) v = 0.5 * rng.Normal();
  const std::vector<size_t> y = {0, 1, 2, 1, 0};
  const double lambda = 0.3;
  const auto obj = attack::EvaluateObjective(x, d, y, k, w, b, lambda);
  const double h = 1e-5;
  double worst = 0.0;
  auto compare = [&](double analytic, double plus, double minus) {
    const double numeric = (plus - minus) / (2 * h);
    const double scale =
        std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (size_t i = 0; i < w.size(); ++i) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    compare(obj.grad_weights[i],
            attack::EvaluateObjective(x, d, y, k, wp, b, lambda).loss,
            attack::EvaluateObjective(x, d, y, k, wm, b, lambda).loss);
  }
  for (size_t i = 0; i < b.size(); ++i) {
    auto bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    compare(obj.grad_bias[i],
            attack::EvaluateObjective(x, d, y, k, w, bp, lambda).loss,
            attack::EvaluateObjective(x, d, y, k, w, bm, lambda).loss);
  }
  o.check.True("max relative error " + Check::Str(worst) + " >= 1e-5",
               worst < 1e-5);
  o.detail = "max relative error " + Check::Str(worst);
  return o;
}

// Scans for the strictly largest free entry, row-major, until none clears
// the threshold.
std::vector<std::pair<size_t, size_t>> GreedyTrace(const fidelity::Matrix& m,
                                                   double threshold) {
  std::vector<bool> row_used(m.rows), col_used(m.cols);
  std::vector<std::pair<size_t, size_t>> out;
  for (;;) {
    bool found = false;
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < m.rows; ++i) {
      for (size_t j = 0; j < m.cols; ++j) {
        if (row_used[i] || col_used[j] || m.at(i, j) < threshold) continue;
        if (!found || m.at(i, j) > m.at(bi, bj)) {
          found = true;
          bi = i;
          bj = j;
        }
      }
    }
    if (!found) return out;
    row_used[bi] = col_used[bj] = true;
    out.emplace_back(bi, bj);
  }
}

Outcome Ac4GreedyMatch() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(4);
  size_t cases = 0, agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    fidelity::Matrix m;
    m.rows = 1 + rng.UniformIndex(6);
    m.cols = 1 + rng.UniformIndex(6);
    const bool coarse = trial % 4 == 0;
    for (size_t i = 0; i < m.rows * m.cols; ++i) {
      m.values.push_back(coarse ? static_cast<double>(rng.UniformIndex(11)) / 10
                                : 2 * rng.UniformDouble() - 1);
    }
    for (double threshold : {0.3, 0.7, 0.9}) {
      ++cases;
      const auto got = fidelity::GreedyMatch(m, threshold);
      const auto want = GreedyTrace(m, threshold);
      bool same = got.pairs.size() == want.size() &&
                  got.shared == want.size() &&
                  got.unique_real == m.rows - want.size() &&
                  got.unique_synth == m.cols - want.size();
      for (size_t p = 0; same && p < want.size(); ++p) {
        same = got.pairs[p].real == want[p].first &&
               got.pairs[p].synth == want[p].second;
      }
      agree += same;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  o.check.True(std::to_string(cases - agree) + " disagreements",
               agree == cases);
  o.check.True("runtime over 10 s", seconds < 10);
  o.detail =
      std::to_string(agree) + "/" + std::to_string(cases) + " cases agree";
  return o;
}

// Desk corpus used by AC5 to AC7.
struct DeskRun {
  corpus::Corpus real;
  corpus::Corpus perturbed;
  attack::AttackReport report;
  attack::AttackReport shuffled;
  double seconds = 0;
};

attack::AttackOptions DeskOptions() {
  attack::AttackOptions o;
  o.models = {attack::PredictionSource::kTfidf};
  o.fractions = {0.25, 1.0};
  o.seed = 17;
  o.threads = 4;
  return o;
}

corpus::Corpus ShuffleLabels(const corpus::Corpus& c, uint64_t seed) {
  std::vector<std::string> authors;
  for (const auto& p : c.posts()) authors.push_back(p.author);
  Rng(seed).Shuffle(authors);
  std::vector<corpus::Post> posts = c.posts();
  for (size_t i = 0; i < posts.size(); ++i) posts[i].author = authors[i];
  return corpus::Corpus(std::move(posts), c.kind(), c.label());
}

const DeskRun& Desk() {
  static const DeskRun run = [] {
    DeskRun r;
    const auto start = std::chrono::steady_clock::now();
    r.real = testing::MakeProceduralCorpus(
        {.authors = 12, .posts_per_author = 60, .seed = 11});
    const auto loaded = testing::Perturb(r.real, 12);
    r.perturbed = corpus::Corpus(loaded.posts(), loaded.kind(), "perturbed");
    const std::vector<corpus::Corpus> synthetic = {r.perturbed};
    r.report = attack::RunAttack(r.real, synthetic, DeskOptions());
    auto control = DeskOptions();
    control.fractions = {1.0};
    r.shuffled = attack::RunAttack(ShuffleLabels(r.real, 13), {}, control);
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return r;
  }();
  return run;
}

double SubsetAccuracy(const attack::AttackReport& r, double fraction) {
  for (const auto& s : r.subsets) {
    if (s.fraction == fraction && !s.models.empty()) {
      return s.models.front().accuracy;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome Ac5AttackRealism() {
  Outcome o;
  const auto& d = Desk();
  const double acc = SubsetAccuracy(d.report, 1.0);
  const double control = SubsetAccuracy(d.shuffled, 1.0);
  o.check.True("tf-idf accuracy " + Check::Str(acc) + " below 5/12",
               acc >= 5.0 / 12);
  o.check.Near("shuffled control", control, 1.0 / 12, 0.05);
  o.check.True("runtime over 60 s", d.seconds < 60);
  o.detail = "tf-idf " + Check::Str(acc) + ", shuffled " + Check::Str(control) +
             ", " + Check::Str(d.seconds) + " s";
  return o;
}

Outcome Ac6PrivacyDirection() {
  Outcome o;
  const auto& d = Desk();
  std::optional<double> reduction;
  double synth_acc = 0;
  for (const auto& s : d.report.synthetic) {
    if (s.corpus_label == "perturbed" && s.model == "tfidf") {
      reduction = s.relative_reduction;
      synth_acc = s.accuracy;
    }
  }
  o.check.True("no reduction reported", reduction.has_value());
  if (reduction) {
    o.check.True("reduction " + Check::Str(*reduction) + "% below 20%",
                 *reduction >= 20);
    o.detail = "perturbed accuracy " + Check::Str(synth_acc) + ", reduction " +
               Check::Str(*reduction) + "%";
  }
  return o;
}

Outcome Ac7SubsetMonotonicity() {
  Outcome o;
  const auto& d = Desk();
  const double quarter = SubsetAccuracy(d.report, 0.25);
  const double full = SubsetAccuracy(d.report, 1.0);
  o.check.True("25% subset " + Check::Str(quarter) + " below 100% subset " +
                   Check::Str(full) + " - 0.02",
               quarter >= full - 0.02);
  o.detail = "25%: " + Check::Str(quarter) + ", 100%: " + Check::Str(full);
  return o;
}

Outcome Ac8KMeans() {
  Outcome o;
  Rng rng(8);
  embedding::PointSet points(4, std::vector<double>(1000 * 4));
  for (size_t i = 0; i < 1000; ++i) {
    const double shift = static_cast<double>(i % 7);
    for (double& v : points.row(i)) v = rng.Normal() + shift;
  }
  size_t increases = 0, steps = 0;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    const auto c = embedding::KMeans(points, 10, seed);
    for (size_t t = 1; t < c.inertia_trace.size(); ++t) {
      ++steps;
      if (c.inertia_trace[t] > c.inertia_trace[t - 1] * (1 + 1e-12)) {
        ++increases;
      }
    }
  }
  o.check.True(std::to_string(increases) + " inertia increases",
               increases == 0);

  // Every split of {0, 0.1, 10, 10.1} into two non-empty groups.
  const std::vector<double> xs = {0.0, 0.1, 10.0, 10.1};
  double best = std::numeric_limits<double>::infinity();
  std::vector<size_t> best_mask;
  for (unsigned mask = 1; mask + 1 < (1u << xs.size()); ++mask) {
    double sum[2] = {0, 0}, count[2] = {0, 0};
    for (size_t i = 0; i < xs.size(); ++i) {
      sum[(mask >> i) & 1] += xs[i];
      count[(mask >> i) & 1] += 1;
    }
    double cost = 0;
    std::vector<size_t> side;
    for (size_t i = 0; i < xs.size(); ++i) {
      const size_t s = (mask >> i) & 1;
      const double m = sum[s] / count[s];
      cost += (xs[i] - m) * (xs[i] - m);
      side.push_back(s);
    }
    if (cost < best) {
      best = cost;
      best_mask = side;
    }
  }
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = embedding::KMeans(embedding::PointSet(1, xs), 2, seed);
    bool same_partition = true;
    for (size_t i = 0; i < xs.size(); ++i) {
      for (size_t j = 0; j < xs.size(); ++j) {
        same_partition &= (c.assignments[i] == c.assignments[j]) ==
                          (best_mask[i] == best_mask[j]);
      }
    }
    o.check.True("partition differs for seed " + std::to_string(seed),
                 same_partition);
    o.check.Near("inertia seed " + std::to_string(seed), c.inertia, best,
                 1e-12);
  }
  o.detail = std::to_string(steps) + " monotone steps, brute-force inertia " +
             Check::Str(best);
  return o;
}

Outcome Ac9Determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "synthaudit_acceptance_ac9";
  fs::remove_all(dir);
  const auto fixture = testing::WriteAuditFixture(dir);
  const auto config = report::LoadAuditConfig(fixture.config);
  const auto a = report::RunPipeline(config, 1);
  const auto b = report::RunPipeline(config, 1);
  const auto c = report::RunPipeline(config, 4);
  const std::string ja = report::SerializeReport(a.report);
  o.check.True("repeat run differs", ja == report::SerializeReport(b.report));
  o.check.True("4 threads differ", ja == report::SerializeReport(c.report));
  o.check.True("markdown differs", report::RenderMarkdown(a.report) ==
                                       report::RenderMarkdown(c.report));
  fs::remove_all(dir);
  o.detail = std::to_string(ja.size()) + " bytes, threads 1/1/4";
  return o;
}

genharness::Reply Status(int code, std::string text = "") {
  return {code, std::move(text), false, ""};
}

Outcome Ac10Harness() {
  Outcome o;
  using genharness::BatchStatus;
  corpus::Corpus source(
      {{"r1", "ann", "first post", std::nullopt, std::nullopt},
       {"r2", "bob", "second post", std::nullopt, std::nullopt},
       {"r3", "cat", "third post", std::nullopt, std::nullopt}},
      corpus::CorpusKind::kReal);
  const auto requests = genharness::PlanBatches(source, {});
  std::vector<long long> sleeps;
  genharness::SubmitOptions opts;
  opts.max_in_flight = 1;
  opts.sleep = [&](std::chrono::milliseconds ms) {
    sleeps.push_back(ms.count());
  };
  const fs::path journal =
      fs::temp_directory_path() / "synthaudit_acceptance_ac10.jsonl";
  fs::remove(journal);
  opts.journal = journal;

  // ann: success; bob: two rate limits then success; cat: garbage.
  genharness::ScriptedTransport mock({Status(200, "Post1: hello"), Status(429),
                                      Status(429), Status(200, "Post1: again"),
                                      Status(200, "I cannot help with that")});
  const auto first = genharness::SubmitBatches(requests, mock, opts);
  o.check.True("three batches", first.size() == 3);
  if (first.size() == 3) {
    o.check.True("ann ok",
                 first[0].status == BatchStatus::kOk && first[0].attempts == 1);
    o.check.True("bob ok after 3 attempts",
                 first[1].status == BatchStatus::kOk && first[1].attempts == 3);
    o.check.True("cat parse_error",
                 first[2].status == BatchStatus::kParseError);
  }
  o.check.True("backoff 1000, 2000",
               sleeps == std::vector<long long>{1000, 2000});

  genharness::ScriptedTransport untouched({}, Status(500));
  const auto resumed = genharness::SubmitBatches(requests, untouched, opts);
  o.check.True("resume re-submitted " + std::to_string(untouched.calls()),
               untouched.calls() == 0);
  o.check.True("resume returns journal records",
               resumed.size() == 3 && resumed[1].attempts == 3);
  fs::remove(journal);
  o.detail = std::to_string(mock.calls()) + " scripted calls, " +
             std::to_string(untouched.calls()) + " on resume";
  return o;
}

Outcome Ac11Preservation() {
  Outcome o;
  using fidelity::Sentiment;
  auto labels = [](const std::string& prefix,
                   const std::vector<Sentiment>& values) {
    fidelity::SentimentLabels l;
    for (size_t i = 0; i < values.size(); ++i) {
      l.labels[prefix + std::to_string(i)] = values[i];
    }
    return l;
  };
  auto pairs = [](size_t n) {
    corpus::AlignedCorpus a;
    for (size_t i = 0; i < n; ++i) {
      const std::string id = std::to_string(i);
      a.pairs.push_back({{"r" + id, "u", "x", std::nullopt, std::nullopt},
                         {"s" + id, "u", "x", std::nullopt, "r" + id}});
    }
    return a;
  };
  constexpr Sentiment kPos = Sentiment::kPositive;
  constexpr Sentiment kNeg = Sentiment::kNegative;
  const size_t pos = static_cast<size_t>(kPos);
  const size_t neg = static_cast<size_t>(kNeg);
  const size_t neu = static_cast<size_t>(Sentiment::kNeutral);

  const auto hand =
      fidelity::SentimentPreservation(pairs(3), labels("r", {kPos, kPos, kNeg}),
                                      labels("s", {kPos, kNeg, kNeg}));
  o.check.True("positive 50%", hand.percent[pos] == 50.0);
  o.check.True("negative 100%", hand.percent[neg] == 100.0);
  o.check.True("neutral undefined", !hand.percent[neu].has_value());

  // A procedural corpus against itself, labeled by the lexicon.
  const auto real = testing::MakeProceduralCorpus(
      {.authors = 6, .posts_per_author = 40, .seed = 21});
  std::vector<corpus::Post> copies;
  for (const auto& p : real.posts()) {
    copies.push_back({"copy-" + p.id, p.author, p.text, std::nullopt, p.id});
  }
  const corpus::Corpus synth(std::move(copies), corpus::CorpusKind::kSynthetic);
  const auto real_labels = fidelity::LexiconLabels(corpus::TokenizeAll(real));
  const auto synth_labels = fidelity::LexiconLabels(corpus::TokenizeAll(synth));
  const auto self = fidelity::SentimentPreservation(corpus::Align(real, synth),
                                                    real_labels, synth_labels);
  size_t populated = 0;
  for (size_t cat = 0; cat < 3; ++cat) {
    if (self.support[cat] == 0) continue;
    ++populated;
    o.check.True("self-comparison category " + std::to_string(cat),
                 self.percent[cat] == 100.0);
  }
  o.check.True("no populated category", populated > 0);
  o.detail = std::to_string(self.pairs) + " self pairs, " +
             std::to_string(populated) + " populated categories";
  return o;
}

}  // namespace
}  // namespace synthaudit

int main() {
  using synthaudit::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {{"AC1 formula oracles", synthaudit::Ac1FormulaOracles},
       {"AC2 relative-reduction anchors", synthaudit::Ac2RelativeReduction},
       {"AC3 gradient check", synthaudit::Ac3Gradient},
       {"AC4 greedy matcher equivalence", synthaudit::Ac4GreedyMatch},
       {"AC5 desk-scale attack realism", synthaudit::Ac5AttackRealism},
       {"AC6 privacy direction", synthaudit::Ac6PrivacyDirection},
       {"AC7 subset monotonicity", synthaudit::Ac7SubsetMonotonicity},
       {"AC8 k-means", synthaudit::Ac8KMeans},
       {"AC9 determinism", synthaudit::Ac9Determinism},
       {"AC10 generation harness", synthaudit::Ac10Harness},
       {"AC11 sentiment preservation", synthaudit::Ac11Preservation}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome.check.Fail(std::string("exception: ") + e.what());
    }
    if (outcome.check.ok()) {
      std::printf("PASS %s (%s)\n", name.c_str(), outcome.detail.c_str());
    } else {
      ++failed;
      std::printf("FAIL %s: %s (%zu failed checks)\n", name.c_str(),
                  outcome.check.first().c_str(), outcome.check.failures());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
