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

#ifndef SYNTHAUDIT_FIDELITY_H_
#define SYNTHAUDIT_FIDELITY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "synthaudit/corpus.h"
#include "synthaudit/embedding.h"

namespace synthaudit::fidelity {

// Per-post averages of social-media traits and textual characteristics.
struct TraitsSummary {
  size_t posts = 0;
  double hashtags = 0.0;
  double mentions = 0.0;
  double urls = 0.0;
  double emojis = 0.0;
  double text_length = 0.0;  // words
  double punctuation = 0.0;
  // Averaged over posts with at least one word and one sentence.
  double readability = 0.0;
  double lexical_diversity = 0.0;
  size_t readable_posts = 0;
  // Words per sentence, averaged over posts with at least one sentence.
  double avg_sentence_length = 0.0;
  size_t sentence_posts = 0;
};

TraitsSummary ComputeTraits(std::span<const corpus::TokenizedPost> posts);

enum class Sentiment { kNegative = 0, kNeutral = 1, kPositive = 2 };
inline constexpr std::array<Sentiment, 3> kSentiments = {
    Sentiment::kNegative, Sentiment::kNeutral, Sentiment::kPositive};

std::string_view SentimentName(Sentiment s);
Sentiment ParseSentiment(std::string_view name);

enum class SentimentSource { kImported, kLexiconFallback };
std::string_view SentimentSourceName(SentimentSource s);

struct SentimentLabels {
  std::unordered_map<std::string, Sentiment> labels;
  SentimentSource source = SentimentSource::kImported;
};

// CSV `post_id,label` with labels negative / neutral / positive
// (case-insensitive).
SentimentLabels ReadSentimentLabels(std::istream& in,
                                    std::string_view source = "labels");
SentimentLabels LoadSentimentLabels(const std::filesystem::path& path);

// Shipped English and Dutch polarity lexicon (+1 / -1 per word).
const std::unordered_map<std::string, int>& SentimentLexicon();

// Sum of word polarities: positive above zero, negative below, else neutral.
Sentiment LexiconSentiment(const corpus::TokenizedPost& tokenized);
SentimentLabels LexiconLabels(std::span<const corpus::TokenizedPost> posts);

// Proportions of (negative, neutral, positive). Every post must be labeled.
std::array<double, 3> SentimentDistribution(const SentimentLabels& labels,
                                            const corpus::Corpus& corpus);

struct Preservation {
  size_t pairs = 0;
  std::array<size_t, 3> support{};    // pairs whose real label is the category
  std::array<size_t, 3> preserved{};  // ... and whose synthetic label matches
  // Percent per category; nullopt when the category has no real support.
  std::array<std::optional<double>, 3> percent{};
};

Preservation SentimentPreservation(const corpus::AlignedCorpus& aligned,
                                   const SentimentLabels& real_labels,
                                   const SentimentLabels& synth_labels);

struct Topic {
  int id = 0;
  std::vector<double> vector;
  std::vector<std::string> keywords;
  size_t size = 0;
};

struct TopicSet {
  std::vector<Topic> topics;
  // Fewer than two topics survived merging.
  bool degenerate = false;
  bool imported = false;
};

// k-means over post embeddings with k = clamp(N / (4 min_topic_size), 2, 50),
// folding undersized clusters into the nearest remaining centroid. Keywords
// are the top ten terms by class TF-IDF. Topics are ordered by size
// descending, then by first member.
TopicSet ExtractTopics(std::span<const corpus::TokenizedPost> posts,
                       const embedding::PointSet& embeddings,
                       size_t min_topic_size = 10, uint64_t seed = 0,
                       int threads = 1);

// {"topics":[{"id":0,"vector":[...],"keywords":[...],"size":n}]}
TopicSet ReadTopicSet(std::istream& in, std::string_view source = "topics");
TopicSet LoadTopicSet(const std::filesystem::path& path);
nlohmann::ordered_json ToJson(const TopicSet& topics);

struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;
  double at(size_t i, size_t j) const { return values[i * cols + j]; }
};

// Cosine similarity, 0 when either vector is all zeros.
double Cosine(std::span<const double> a, std::span<const double> b);

Matrix TopicCosineMatrix(const TopicSet& real, const TopicSet& synth);

struct MatchedPair {
  size_t real = 0;
  size_t synth = 0;
  double similarity = 0.0;
};

struct TopicMatchReport {
  double threshold = 0.7;
  size_t shared = 0;
  size_t unique_real = 0;
  size_t unique_synth = 0;
  std::vector<MatchedPair> pairs;  // in selection order
};

// Repeatedly takes the largest remaining entry >= threshold whose row and
// column are both free; ties go to the lower row, then the lower column.
TopicMatchReport GreedyMatch(const Matrix& similarity, double threshold = 0.7);

// Mean Euclidean distance over all centroid pairs; nullopt for fewer than two.
std::optional<double> MeanPairwiseDistance(
    const embedding::PointSet& centroids);

struct CentroidAnalysis {
  embedding::Clustering clustering;
  std::optional<double> d_global;
};

// Points are reordered by post id before clustering so the result does not
// depend on input order.
CentroidAnalysis AnalyzeCentroids(const embedding::PointSet& points,
                                  std::span<const std::string> post_ids,
                                  size_t k = 50, uint64_t seed = 0,
                                  int threads = 1);

enum class IntraMode {
  // Cluster each writer's posts separately with k_w = max(2, k * share).
  kPerWriter,
  // Reuse the global partition: writer centroids are the means of the
  // writer's posts inside each global cluster they occupy.
  kShared,
};

std::string_view IntraModeName(IntraMode mode);
IntraMode ParseIntraMode(std::string_view name);

struct WriterDelta {
  std::string writer;
  size_t posts = 0;
  size_t centroids = 0;
  std::optional<double> d_intra;
  std::optional<double> delta;
};

struct CentroidReport {
  size_t k = 0;
  IntraMode mode = IntraMode::kPerWriter;
  std::optional<double> d_global;
  std::vector<WriterDelta> writers;  // sorted by writer name
};

// writer_of[i] names the persona writer of point i. Throws InvalidArgument
// when a writer has fewer than two posts.
CentroidReport PersonaDelta(const embedding::PointSet& points,
                            std::span<const std::string> post_ids,
                            std::span<const std::string> writer_of, size_t k,
                            uint64_t seed,
                            IntraMode mode = IntraMode::kPerWriter,
                            int threads = 1);

struct SentimentSection {
  SentimentSource source = SentimentSource::kImported;
  std::array<double, 3> real{};
  std::array<double, 3> synth{};
  Preservation preservation;
};

struct TopicSection {
  bool imported = false;
  size_t real_topics = 0;
  size_t synth_topics = 0;
  bool real_degenerate = false;
  bool synth_degenerate = false;
  // Keywords per topic, in topic order.
  std::vector<std::vector<std::string>> real_keywords;
  std::vector<std::vector<std::string>> synth_keywords;
  TopicMatchReport match;
};

struct FidelityInputs {
  const corpus::Corpus* real = nullptr;
  const corpus::Corpus* synth = nullptr;
  // Needed for built-in topics and centroid geometry.
  const embedding::EmbeddingTable* embeddings = nullptr;
  // Imported labels; used only when they cover every real and synthetic post.
  const SentimentLabels* sentiment = nullptr;
  // Imported topic sets; both or neither.
  const TopicSet* real_topics = nullptr;
  const TopicSet* synth_topics = nullptr;
  // Persona writer per synthetic post. Empty: only d_global is reported.
  std::vector<std::string> writer_of;
};

struct FidelityOptions {
  double topic_threshold = 0.7;
  size_t min_topic_size = 10;
  size_t centroid_k = 50;
  IntraMode intra_mode = IntraMode::kPerWriter;
  uint64_t seed = 0;
  int threads = 1;
};

struct FidelityReport {
  std::string corpus_label;
  std::optional<TraitsSummary> real_traits;
  std::optional<TraitsSummary> synth_traits;
  std::optional<SentimentSection> sentiment;
  std::optional<TopicSection> topics;
  std::optional<CentroidReport> centroids;
  std::vector<std::string> warnings;
  // Some section could not be computed; see warnings.
  bool partial = false;
};

// Computes every section it has inputs for. A section that fails on its data
// is left empty with a warning; the others are still reported.
FidelityReport RunFidelity(const FidelityInputs& inputs,
                           const FidelityOptions& options);

nlohmann::ordered_json ToJson(const FidelityReport& report);
FidelityReport FidelityReportFromJson(const nlohmann::json& j);

}  // namespace synthaudit::fidelity

#endif  // SYNTHAUDIT_FIDELITY_H_
