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

#include "synthaudit/attack.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "support/procedural_corpus.h"
#include "synthaudit/errors.h"
#include "synthaudit/rng.h"

namespace synthaudit::attack {
namespace {

using corpus::Corpus;
using corpus::CorpusKind;
using corpus::Post;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

PredictionSet OneHot(const std::vector<std::string>& labels,
                     const std::vector<std::string>& predicted) {
  PredictionSet set;
  set.labels = labels;
  for (size_t i = 0; i < predicted.size(); ++i) {
    set.post_ids.push_back("p" + std::to_string(i));
    for (const auto& l : labels) {
      set.probabilities.push_back(l == predicted[i] ? 1.0 : 0.0);
    }
  }
  return set;
}

std::map<std::string, std::string> Truth(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::string> t;
  for (size_t i = 0; i < labels.size(); ++i)
    t["p" + std::to_string(i)] = labels[i];
  return t;
}

Corpus Authored(const std::vector<std::pair<std::string, size_t>>& counts) {
  std::vector<Post> posts;
  size_t id = 0;
  for (const auto& [author, n] : counts) {
    for (size_t i = 0; i < n; ++i) {
      posts.push_back({"id" + std::to_string(id++), author, "text", {}, {}});
    }
  }
  return Corpus(std::move(posts), CorpusKind::kReal);
}

std::vector<std::string> AuthorsOf(const Corpus& c) { return c.Authors(); }

TEST(EvaluateTest, HandConfusionMatrix) {
  const auto s = Evaluate(OneHot({"a", "b"}, {"a", "b", "b", "b"}),
                          Truth({"a", "a", "b", "b"}));
  EXPECT_DOUBLE_EQ(s.accuracy, 0.75);
  const double f1_a = 2 * (1.0 * 0.5) / (1.0 + 0.5);
  const double f1_b = 2 * (2.0 / 3.0 * 1.0) / (2.0 / 3.0 + 1.0);
  EXPECT_NEAR(s.macro_f1, (f1_a + f1_b) / 2, 1e-12);
  EXPECT_NEAR(s.macro_f1, 0.7333333333333333, 1e-12);
}

TEST(EvaluateTest, PerfectAndConstantPredictions) {
  const auto perfect =
      Evaluate(OneHot({"a", "b"}, {"a", "b", "a"}), Truth({"a", "b", "a"}));
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.macro_f1, 1.0);
  const auto constant = Evaluate(OneHot({"a", "b"}, {"a", "a", "a", "a"}),
                                 Truth({"a", "a", "b", "b"}));
  EXPECT_EQ(constant.accuracy, 0.5);
  // F1(a) = 2*2/(4+2+0) = 2/3, F1(b) = 0.
  EXPECT_NEAR(constant.macro_f1, 1.0 / 3.0, 1e-12);
}

TEST(EvaluateTest, UnseenLabelContributesZero) {
  const auto s =
      Evaluate(OneHot({"a", "b", "c"}, {"a", "b"}), Truth({"a", "b"}));
  EXPECT_EQ(s.accuracy, 1.0);
  EXPECT_NEAR(s.macro_f1, 2.0 / 3.0, 1e-12);
}

TEST(EvaluateTest, TiesGoToEarliestLabel) {
  PredictionSet set;
  set.labels = {"a", "b"};
  set.post_ids = {"p0"};
  set.probabilities = {0.5, 0.5};
  EXPECT_EQ(set.Argmax(0), 0u);
}

TEST(EvaluateTest, InvariantUnderRowPermutation) {
  Rng rng(4);
  std::vector<std::string> truth_labels, predicted;
  for (int i = 0; i < 50; ++i) {
    truth_labels.push_back(
        std::string(1, static_cast<char>('a' + rng.UniformIndex(4))));
    predicted.push_back(
        std::string(1, static_cast<char>('a' + rng.UniformIndex(4))));
  }
  const auto set = OneHot({"a", "b", "c", "d"}, predicted);
  const auto truth = Truth(truth_labels);
  const auto base = Evaluate(set, truth);
  std::vector<std::string> ids = set.post_ids;
  for (int trial = 0; trial < 10; ++trial) {
    rng.Shuffle(ids);
    const auto s = Evaluate(set.Subset(ids), truth);
    EXPECT_EQ(s.accuracy, base.accuracy);
    EXPECT_DOUBLE_EQ(s.macro_f1, base.macro_f1);
  }
}

TEST(EvaluateTest, RejectsIdMismatch) {
  auto t = Truth({"a", "b"});
  EXPECT_THROW(Evaluate(OneHot({"a", "b"}, {"a"}), t), DataError);
  t.erase("p1");
  t["zz"] = "b";
  EXPECT_THROW(Evaluate(OneHot({"a", "b"}, {"a", "b"}), t), DataError);
}

TEST(RelativeReductionTest, ReferenceAnchors) {
  EXPECT_NEAR(RelativeReduction(0.81, 0.297), 63.33, 0.01);
  EXPECT_NEAR(RelativeReduction(0.81, 0.165), 79.63, 0.01);
  EXPECT_NEAR(RelativeReduction(0.81, 0.297), 100 * (0.81 - 0.297) / 0.81,
              1e-12);
  EXPECT_EQ(RelativeReduction(0.4, 0.4), 0.0);
  EXPECT_THROW(RelativeReduction(0.0, 0.1), InvalidArgument);
}

TEST(SubsetTest, TopAuthorsByCount) {
  const auto c = Authored({{"h", 1},
                           {"g", 2},
                           {"f", 3},
                           {"e", 4},
                           {"d", 5},
                           {"c", 6},
                           {"b", 7},
                           {"a", 8}});
  const std::vector<double> fractions = {0.25, 0.5, 1.0};
  const auto subsets = BuildSubsets(c, fractions);
  EXPECT_THAT(AuthorsOf(subsets[0]), ElementsAre("a", "b"));
  EXPECT_EQ(subsets[0].size(), 15u);
  EXPECT_EQ(AuthorsOf(subsets[1]).size(), 4u);
  EXPECT_EQ(subsets[2], c);
}

TEST(SubsetTest, TieAtCutGoesToLexicographicallySmaller) {
  const auto c = Authored({{"y", 3}, {"x", 3}, {"z", 5}, {"w", 1}});
  const std::vector<double> half = {0.5};
  EXPECT_THAT(AuthorsOf(BuildSubsets(c, half)[0]), ElementsAre("x", "z"));
  EXPECT_THAT(RankAuthors(c),
              ElementsAre(std::pair<std::string, size_t>{"z", 5},
                          std::pair<std::string, size_t>{"x", 3},
                          std::pair<std::string, size_t>{"y", 3},
                          std::pair<std::string, size_t>{"w", 1}));
}

TEST(SubsetTest, RejectsBadInput) {
  const std::vector<double> bad = {0.0};
  EXPECT_THROW(BuildSubsets(Authored({{"a", 1}}), bad), ConfigError);
  const std::vector<double> ok = {1.0};
  EXPECT_THROW(BuildSubsets(Corpus(), ok), DataError);
}

TEST(SplitTest, PerAuthorCounts) {
  const auto c = Authored({{"ten", 10}, {"two", 2}, {"one", 1}, {"seven", 7}});
  const auto split = StratifiedSplit(c, 0.2, 42);
  std::map<std::string, size_t> test_counts;
  for (size_t i : split.test) ++test_counts[c.posts()[i].author];
  EXPECT_EQ(test_counts["ten"], 2u);
  EXPECT_EQ(test_counts["two"], 1u);
  EXPECT_EQ(test_counts["seven"], 1u);
  EXPECT_EQ(test_counts.count("one"), 0u);
  EXPECT_THAT(split.flagged_authors, ElementsAre("one"));
  EXPECT_THAT(split.labels, ElementsAre("one", "seven", "ten", "two"));
}

TEST(SplitTest, BruteForceProperties) {
  testing::ProceduralOptions po;
  po.authors = 7;
  po.posts_per_author = 23;
  po.uneven = true;
  const auto c = testing::MakeProceduralCorpus(po);
  for (uint64_t seed : {1u, 2u, 3u}) {
    const auto split = StratifiedSplit(c, 0.2, seed);
    std::set<size_t> train(split.train.begin(), split.train.end());
    std::set<size_t> test(split.test.begin(), split.test.end());
    EXPECT_EQ(train.size() + test.size(), c.size());
    for (size_t t : test) EXPECT_EQ(train.count(t), 0u);
    std::set<std::string> train_authors, test_authors;
    std::map<std::string, size_t> total, in_test;
    for (size_t i : train) train_authors.insert(c.posts()[i].author);
    for (size_t i : test) {
      test_authors.insert(c.posts()[i].author);
      ++in_test[c.posts()[i].author];
    }
    for (const auto& p : c.posts()) ++total[p.author];
    EXPECT_EQ(train_authors, test_authors);
    for (const auto& [author, n] : total) {
      const double share = static_cast<double>(in_test[author]);
      EXPECT_LE(std::abs(share - 0.2 * static_cast<double>(n)), 1.0) << author;
    }
    EXPECT_EQ(split.test, StratifiedSplit(c, 0.2, seed).test);
  }
}

TEST(SplitTest, AuthorSplitIsStableAcrossSubsets) {
  const auto c = Authored({{"a", 10}, {"b", 9}, {"c", 4}});
  const std::vector<double> fractions = {0.34, 1.0};
  const auto subsets = BuildSubsets(c, fractions);
  auto test_ids = [](const Corpus& corpus) {
    std::set<std::string> ids;
    for (size_t i : StratifiedSplit(corpus, 0.2, 5).test) {
      if (corpus.posts()[i].author == "a") ids.insert(corpus.posts()[i].id);
    }
    return ids;
  };
  EXPECT_EQ(test_ids(subsets[0]), test_ids(subsets[1]));
}

TEST(ExternalPredictionsTest, ReadsAndRenormalizes) {
  std::istringstream in(
      "post_id,b,a\n"
      "p1,0.25,0.75\n"
      "p2,0.2,0.3\n");
  const auto set = ReadExternalPredictions(in, {"a", "b"});
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.source, PredictionSource::kExternal);
  const auto row0 = set.row(0);
  EXPECT_THAT(std::vector<double>(row0.begin(), row0.end()),
              ElementsAre(0.75, 0.25));
  EXPECT_NEAR(set.row(1)[0], 0.6, 1e-12);
  EXPECT_NEAR(set.row(1)[1], 0.4, 1e-12);
  EXPECT_EQ(set.renormalized_rows, 1u);
}

TEST(ExternalPredictionsTest, Errors) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return ReadExternalPredictions(in, {"alice", "bob"});
  };
  try {
    read("post_id,alice\np1,1\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_THAT(e.what(), HasSubstr("bob"));
  }
  EXPECT_THROW(read("post_id,alice,bob\np1,-0.1,1.1\n"), DataError);
  EXPECT_THROW(read("post_id,alice,bob,carol\np1,0.5,0.5,0\n"), DataError);
  EXPECT_THROW(read("post_id,alice,bob\np1,0.5,0.5\np1,0.5,0.5\n"), DataError);
  EXPECT_THROW(read("post_id,alice,bob\np1,0,0\n"), DataError);
  EXPECT_THROW(read("post_id,alice,bob\np1,x,1\n"), DataError);
  EXPECT_THROW(read("id,alice,bob\n"), DataError);
}

// Base predictions that put `confidence` on a chosen label.
PredictionSet Confident(const std::vector<std::string>& labels,
                        const std::vector<size_t>& chosen, double confidence,
                        size_t offset = 0) {
  PredictionSet set;
  set.source = PredictionSource::kStylometric;
  set.labels = labels;
  const double rest =
      (1.0 - confidence) / static_cast<double>(labels.size() - 1);
  for (size_t i = 0; i < chosen.size(); ++i) {
    set.post_ids.push_back("p" + std::to_string(i + offset));
    for (size_t l = 0; l < labels.size(); ++l) {
      set.probabilities.push_back(l == chosen[i] ? confidence : rest);
    }
  }
  return set;
}

PredictionSet Uniform(const PredictionSet& like) {
  PredictionSet set = like;
  set.source = PredictionSource::kNGram;
  std::fill(set.probabilities.begin(), set.probabilities.end(),
            1.0 / static_cast<double>(like.labels.size()));
  return set;
}

struct StackToy {
  std::vector<std::string> labels = {"a", "b", "c"};
  std::vector<size_t> y_train, y_test;
  std::vector<size_t> noisy_train, noisy_test;
};

StackToy MakeStackToy() {
  StackToy toy;
  Rng rng(21);
  auto draw = [&](size_t n, std::vector<size_t>& y,
                  std::vector<size_t>& noisy) {
    for (size_t i = 0; i < n; ++i) {
      const size_t label = i % 3;
      y.push_back(label);
      noisy.push_back(rng.UniformDouble() < 0.7 ? label : rng.UniformIndex(3));
    }
  };
  draw(150, toy.y_train, toy.noisy_train);
  draw(60, toy.y_test, toy.noisy_test);
  return toy;
}

std::map<std::string, std::string> TruthFrom(const StackToy& toy,
                                             const std::vector<size_t>& y,
                                             size_t offset) {
  std::map<std::string, std::string> t;
  for (size_t i = 0; i < y.size(); ++i) {
    t["p" + std::to_string(i + offset)] = toy.labels[y[i]];
  }
  return t;
}

TEST(StackingTest, IdenticalBasesAddNoSignal) {
  const auto toy = MakeStackToy();
  auto train = Confident(toy.labels, toy.noisy_train, 0.6);
  auto test = Confident(toy.labels, toy.noisy_test, 0.6, 1000);
  auto train2 = train;
  train2.source = PredictionSource::kTfidf;
  auto test2 = test;
  test2.source = PredictionSource::kTfidf;
  const std::vector<PredictionSet> train_bases = {train, train2};
  const std::vector<PredictionSet> test_bases = {test, test2};
  const auto ensemble =
      TrainStackedEnsemble(train_bases, toy.y_train, toy.labels, {});
  const auto out = ApplyStackedEnsemble(ensemble, test_bases);
  EXPECT_EQ(out.source, PredictionSource::kEnsemble);
  const auto truth = TruthFrom(toy, toy.y_test, 1000);
  const double base_acc = Evaluate(test, truth).accuracy;
  const double ens_acc = Evaluate(out, truth).accuracy;
  EXPECT_LE(std::abs(base_acc - ens_acc), 1.0 / 60.0 + 1e-12);
}

TEST(StackingTest, PerfectPlusUniformKeepsPerfectAccuracy) {
  const auto toy = MakeStackToy();
  const auto perfect_train = Confident(toy.labels, toy.y_train, 0.9);
  const auto perfect_test = Confident(toy.labels, toy.y_test, 0.9, 1000);
  const std::vector<PredictionSet> train_bases = {perfect_train,
                                                  Uniform(perfect_train)};
  const std::vector<PredictionSet> test_bases = {perfect_test,
                                                 Uniform(perfect_test)};
  const auto ensemble =
      TrainStackedEnsemble(train_bases, toy.y_train, toy.labels, {});
  const auto truth = TruthFrom(toy, toy.y_test, 1000);
  EXPECT_GE(
      Evaluate(ApplyStackedEnsemble(ensemble, test_bases), truth).accuracy,
      1.0 - 1.0 / 60.0);
}

TEST(StackingTest, Preconditions) {
  const auto toy = MakeStackToy();
  const auto base = Confident(toy.labels, toy.y_train, 0.9);
  const std::vector<PredictionSet> one = {base};
  EXPECT_THROW(TrainStackedEnsemble(one, toy.y_train, toy.labels, {}),
               InvalidArgument);
  auto shifted = Confident(toy.labels, toy.y_train, 0.9, 1);
  const std::vector<PredictionSet> mismatched = {base, shifted};
  EXPECT_THROW(TrainStackedEnsemble(mismatched, toy.y_train, toy.labels, {}),
               DataError);
}

TEST(StackingTest, OutOfFoldRowsAreDistributions) {
  Rng rng(6);
  std::vector<double> values;
  std::vector<size_t> y;
  std::vector<std::string> ids;
  for (size_t i = 0; i < 40; ++i) {
    y.push_back(i % 4);
    values.push_back(static_cast<double>(y.back()) + rng.Normal() * 0.3);
    values.push_back(rng.Normal());
    ids.push_back("q" + std::to_string(i));
  }
  const features::FeatureMatrix x({"f0", "f1"}, ids, values);
  LogRegOptions o;
  o.epochs = 50;
  const auto a = OutOfFoldPredictions(x, y, {"a", "b", "c", "d"}, o, 5,
                                      PredictionSource::kNGram);
  const auto b = OutOfFoldPredictions(x, y, {"a", "b", "c", "d"}, o, 5,
                                      PredictionSource::kNGram);
  EXPECT_EQ(a.probabilities, b.probabilities);
  EXPECT_EQ(a.post_ids, ids);
  for (size_t i = 0; i < a.size(); ++i) {
    double s = 0;
    for (double p : a.row(i)) s += p;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

AttackOptions FastOptions() {
  AttackOptions o;
  o.logreg.epochs = 40;
  o.seed = 9;
  return o;
}

TEST(RunAttackTest, ReportShapeAndSignal) {
  testing::ProceduralOptions po;
  po.authors = 6;
  po.posts_per_author = 30;
  po.uneven = true;
  const auto real = testing::MakeProceduralCorpus(po);
  const std::vector<Corpus> synth = {testing::Perturb(real, 4)};
  const auto report = RunAttack(real, synth, FastOptions());
  ASSERT_EQ(report.subsets.size(), 4u);
  EXPECT_EQ(report.subsets[0].authors, 2u);
  EXPECT_EQ(report.subsets[3].posts, real.size());
  for (const auto& s : report.subsets) {
    ASSERT_EQ(s.models.size(), 4u);
    EXPECT_EQ(s.models[0].model, "stylometric");
    EXPECT_EQ(s.models[3].model, "ensemble");
    for (const auto& m : s.models) {
      EXPECT_GE(m.accuracy, 0.0);
      EXPECT_LE(m.accuracy, 1.0);
      EXPECT_GE(m.macro_f1, 0.0);
      EXPECT_LE(m.macro_f1, 1.0);
    }
  }
  // Chance is 1/6 on the full subset.
  EXPECT_GT(report.subsets[3].models[2].accuracy, 1.0 / 6.0);
  EXPECT_GT(report.subsets[3].models[3].accuracy, 2.0 / 6.0);
  ASSERT_EQ(report.synthetic.size(), 4u);
  for (const auto& r : report.synthetic) {
    EXPECT_EQ(r.posts, real.size());
    ASSERT_TRUE(r.relative_reduction.has_value());
    EXPECT_NEAR(*r.relative_reduction,
                RelativeReduction(r.baseline_accuracy, r.accuracy), 1e-12);
  }
  EXPECT_FALSE(report.partial);
}

TEST(RunAttackTest, ThreadCountDoesNotChangeResults) {
  testing::ProceduralOptions po;
  po.authors = 5;
  po.posts_per_author = 20;
  const auto real = testing::MakeProceduralCorpus(po);
  const std::vector<Corpus> synth = {testing::Perturb(real, 2)};
  auto o = FastOptions();
  o.threads = 1;
  const auto a = ToJson(RunAttack(real, synth, o)).dump();
  o.threads = 4;
  const auto b = ToJson(RunAttack(real, synth, o)).dump();
  EXPECT_EQ(a, b);
}

TEST(RunAttackTest, JsonRoundTrip) {
  testing::ProceduralOptions po;
  po.authors = 3;
  po.posts_per_author = 10;
  const auto real = testing::MakeProceduralCorpus(po);
  auto o = FastOptions();
  o.models = {PredictionSource::kTfidf};
  o.fractions = {1.0};
  const auto report = RunAttack(real, {}, o);
  const auto j = ToJson(report);
  EXPECT_EQ(
      ToJson(AttackReportFromJson(nlohmann::json::parse(j.dump()))).dump(),
      j.dump());
}

TEST(RunAttackTest, ExternalPredictionsAreScored) {
  testing::ProceduralOptions po;
  po.authors = 3;
  po.posts_per_author = 10;
  const auto real = testing::MakeProceduralCorpus(po);
  const auto labels = real.Authors();
  const auto path =
      std::filesystem::temp_directory_path() / "synthaudit_external_test.csv";
  {
    std::ofstream out(path);
    out << "post_id";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (const auto& p : real.posts()) {
      out << p.id;
      for (const auto& l : labels) out << ',' << (l == p.author ? 1 : 0);
      out << '\n';
    }
  }
  auto o = FastOptions();
  o.models = {PredictionSource::kExternal};
  o.fractions = {1.0};
  o.external_path = path;
  const auto report = RunAttack(real, {}, o);
  ASSERT_EQ(report.subsets[0].models.size(), 1u);
  EXPECT_EQ(report.subsets[0].models[0].model, "external");
  EXPECT_EQ(report.subsets[0].models[0].accuracy, 1.0);
  std::filesystem::remove(path);
}

TEST(PredictionSourceTest, NamesRoundTrip) {
  for (auto s : {PredictionSource::kStylometric, PredictionSource::kNGram,
                 PredictionSource::kTfidf, PredictionSource::kExternal,
                 PredictionSource::kEnsemble}) {
    EXPECT_EQ(ParsePredictionSource(PredictionSourceName(s)), s);
  }
  EXPECT_THROW(ParsePredictionSource("roberta"), ConfigError);
}

}  // namespace
}  // namespace synthaudit::attack
