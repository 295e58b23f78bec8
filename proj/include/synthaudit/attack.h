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

#ifndef SYNTHAUDIT_ATTACK_H_
#define SYNTHAUDIT_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synthaudit/corpus.h"
#include "synthaudit/features.h"
#include "synthaudit/logreg.h"

namespace synthaudit::attack {

enum class PredictionSource {
  kStylometric,
  kNGram,
  kTfidf,
  kExternal,
  kEnsemble
};

std::string_view PredictionSourceName(PredictionSource source);
PredictionSource ParsePredictionSource(std::string_view name);

// Per-post probability vectors over a fixed label order.
struct PredictionSet {
  PredictionSource source = PredictionSource::kExternal;
  std::vector<std::string> labels;
  std::vector<std::string> post_ids;
  std::vector<double> probabilities;  // rows x labels, row-major
  // Rows that were rescaled to sum to one on import.
  size_t renormalized_rows = 0;

  size_t size() const { return post_ids.size(); }
  std::span<const double> row(size_t i) const {
    return {probabilities.data() + i * labels.size(), labels.size()};
  }
  // Index of the highest probability; ties go to the earliest label.
  size_t Argmax(size_t i) const;
  // Rows for the given ids in that order; DataError when one is missing.
  PredictionSet Subset(std::span<const std::string> ids) const;
};

struct Scores {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// truth maps every predicted post id to its author. Macro-F1 averages over the
// union of prediction and truth labels; a label never predicted and never true
// contributes 0.
Scores Evaluate(const PredictionSet& predictions,
                const std::map<std::string, std::string>& truth);

double RelativeReduction(double baseline_accuracy, double synthetic_accuracy);

// Authors ordered by post count descending, ties by label.
std::vector<std::pair<std::string, size_t>> RankAuthors(
    const corpus::Corpus& corpus);

// For each fraction f, all posts of the top ceil(f * A) ranked authors.
std::vector<corpus::Corpus> BuildSubsets(const corpus::Corpus& corpus,
                                         std::span<const double> fractions);

struct Split {
  // Indices into the corpus, ascending.
  std::vector<size_t> train;
  std::vector<size_t> test;
  std::vector<std::string> labels;  // sorted author labels
  // Authors with a single post; all their posts stay in train.
  std::vector<std::string> flagged_authors;
};

// Per author, max(1, floor(test_fraction * count)) posts go to test. Each
// author's draw is seeded from (seed, author) alone, so an author splits the
// same way in every subset.
Split StratifiedSplit(const corpus::Corpus& corpus, double test_fraction,
                      uint64_t seed);

// Probabilities for each row of x from models trained on the other folds.
// Folds are assigned round-robin per label after a seeded shuffle.
PredictionSet OutOfFoldPredictions(const features::FeatureMatrix& x,
                                   std::span<const size_t> y,
                                   const std::vector<std::string>& labels,
                                   const LogRegOptions& options, size_t folds,
                                   PredictionSource source);

PredictionSet Predict(const LogRegModel& model,
                      const features::FeatureMatrix& x,
                      PredictionSource source);

// Concatenated base probabilities as a feature matrix.
features::FeatureMatrix StackFeatures(std::span<const PredictionSet> bases);

struct StackedEnsemble {
  LogRegModel meta;
};

// Trains the meta-model on out-of-fold train-side predictions. Requires two
// or more sources whose post ids agree.
StackedEnsemble TrainStackedEnsemble(std::span<const PredictionSet> train_bases,
                                     std::span<const size_t> y,
                                     const std::vector<std::string>& labels,
                                     const LogRegOptions& options);

PredictionSet ApplyStackedEnsemble(const StackedEnsemble& ensemble,
                                   std::span<const PredictionSet> bases);

// CSV with header `post_id,<label>...`. Every label must have a column; extra
// columns are an error too. Rows off from 1 by more than 1e-3 are rescaled and
// counted.
PredictionSet ReadExternalPredictions(std::istream& in,
                                      const std::vector<std::string>& labels,
                                      std::string_view source = "predictions");
PredictionSet LoadExternalPredictions(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels);

struct AttackOptions {
  std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::vector<PredictionSource> models = {
      PredictionSource::kStylometric, PredictionSource::kNGram,
      PredictionSource::kTfidf, PredictionSource::kEnsemble};
  double test_fraction = 0.2;
  LogRegOptions logreg;
  size_t ngram_top_k = 100;
  features::TfidfOptions tfidf;
  size_t stack_folds = 5;
  uint64_t seed = 0;
  int threads = 1;
  // Externally produced probabilities keyed by post id. Used for a subset
  // when it covers every test post of that subset.
  std::optional<std::filesystem::path> external_path;
};

struct ModelScore {
  std::string model;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

struct SubsetResult {
  double fraction = 0.0;
  size_t authors = 0;
  size_t posts = 0;
  size_t train_posts = 0;
  size_t test_posts = 0;
  std::vector<std::string> flagged_authors;
  std::vector<ModelScore> models;
};

// One attacker trained on the full real corpus, applied to a synthetic corpus
// whose posts keep their original author labels.
struct SyntheticResult {
  std::string corpus_label;
  std::string model;
  size_t posts = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double baseline_accuracy = 0.0;
  std::optional<double> relative_reduction;
};

struct AttackReport {
  std::vector<SubsetResult> subsets;
  std::vector<SyntheticResult> synthetic;
  std::vector<std::string> warnings;
  // Whether the report lacks something requested (for example an external
  // file that covered no subset).
  bool partial = false;
};

AttackReport RunAttack(const corpus::Corpus& real,
                       std::span<const corpus::Corpus> synthetic,
                       const AttackOptions& options);

nlohmann::ordered_json ToJson(const AttackReport& report);
AttackReport AttackReportFromJson(const nlohmann::json& j);

}  // namespace synthaudit::attack

#endif  // SYNTHAUDIT_ATTACK_H_
