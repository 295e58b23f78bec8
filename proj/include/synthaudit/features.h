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

#ifndef SYNTHAUDIT_FEATURES_H_
#define SYNTHAUDIT_FEATURES_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "synthaudit/corpus.h"

namespace synthaudit::features {

// Slot layout of the stylometric vector.
namespace slot {
inline constexpr size_t kTotalWords = 0;
inline constexpr size_t kTotalSentences = 1;
inline constexpr size_t kAvgWordLength = 2;
inline constexpr size_t kLexicalRichness = 3;
inline constexpr size_t kFleschReadingEase = 4;
inline constexpr size_t kFleschKincaidGrade = 5;
inline constexpr size_t kDigitCount = 6;
inline constexpr size_t kPunctuationCount = 7;
inline constexpr size_t kSpecialCount = 8;
inline constexpr size_t kEmojiCount = 9;
inline constexpr size_t kEmoticonCount = 10;
inline constexpr size_t kEmojiDensity = 11;
inline constexpr size_t kEmoticonDensity = 12;
inline constexpr size_t kHashtagDensity = 13;
inline constexpr size_t kMentionDensity = 14;
inline constexpr size_t kUrlDensity = 15;
inline constexpr size_t kRepeatedWordCount = 16;
inline constexpr size_t kRepeatedEmojiCount = 17;
inline constexpr size_t kLetterFreq = 18;                // 26 slots
inline constexpr size_t kDigitFreq = kLetterFreq + 26;   // 10 slots
inline constexpr size_t kSpecialFreq = kDigitFreq + 10;  // 14 slots
inline constexpr size_t kWidth = kSpecialFreq + corpus::kSpecialChars.size();
}  // namespace slot

using StylometricVector = std::array<double, slot::kWidth>;

const std::vector<std::string>& StylometricColumns();

// Vowel-group heuristic: maximal runs of aeiouy (accented vowels included),
// minus a silent trailing 'e', at least 1 for any word.
size_t CountSyllables(std::string_view word);

// 206.835 - 1.015 (words / sentences) - 84.6 (syllables / words).
// nullopt when words or sentences is zero.
std::optional<double> FleschReadingEase(size_t words, size_t sentences,
                                        size_t syllables);
// 0.39 (words / sentences) + 11.8 (syllables / words) - 15.59.
std::optional<double> FleschKincaidGrade(size_t words, size_t sentences,
                                         size_t syllables);

// Type-token ratio of word tokens; nullopt for a post without words.
std::optional<double> LexicalDiversity(const corpus::TokenizedPost& tokenized);

size_t TotalSyllables(const corpus::TokenizedPost& tokenized);

// Degenerate readability/diversity values become 0 in the vector.
StylometricVector ExtractStylometric(const corpus::TokenizedPost& tokenized);

// Per-post numeric rows with a column schema. Values are always finite.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns,
                std::vector<std::string> post_ids, std::vector<double> values);

  size_t rows() const { return post_ids_.size(); }
  size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::string>& post_ids() const { return post_ids_; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> row(size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }

  // Rows at the given indices, in that order.
  FeatureMatrix Select(std::span<const size_t> indices) const;

  void WriteCsv(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> post_ids_;
  std::vector<double> values_;
};

FeatureMatrix StylometricMatrix(
    std::span<const corpus::TokenizedPost> tokenized, int threads = 1);

using NGram = std::vector<std::string>;

struct NGramVocabulary {
  size_t top_k = 100;
  // Sorted by corpus frequency descending, ties by lexicographic n-gram.
  std::vector<std::pair<NGram, size_t>> bigrams;
  std::vector<std::pair<NGram, size_t>> trigrams;

  size_t width() const { return 2 * top_k; }
};

// The top_k most frequent word bigrams and trigrams (each size separately).
NGramVocabulary BuildNGramVocab(std::span<const corpus::TokenizedPost> docs,
                                size_t top_k = 100);

// Counts of each vocabulary n-gram in the post: top_k bigram slots followed by
// top_k trigram slots, zero-filled.
std::vector<double> NGramFeatures(const corpus::TokenizedPost& tokenized,
                                  const NGramVocabulary& vocab);

FeatureMatrix NGramMatrix(std::span<const corpus::TokenizedPost> tokenized,
                          const NGramVocabulary& vocab, int threads = 1);

nlohmann::ordered_json ToJson(const NGramVocabulary& vocab);
NGramVocabulary NGramVocabFromJson(const nlohmann::json& j);

struct TfidfOptions {
  size_t max_features = 3000;
  // 1 = unigrams only, 2 = unigrams and word bigrams.
  int max_ngram = 2;
};

class TfidfVocabulary {
 public:
  TfidfVocabulary() = default;
  TfidfVocabulary(std::vector<std::string> terms,
                  std::vector<size_t> document_frequency, size_t document_count,
                  int max_ngram);

  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<size_t>& document_frequency() const { return df_; }
  size_t document_count() const { return document_count_; }
  int max_ngram() const { return max_ngram_; }
  std::optional<size_t> Find(std::string_view term) const;
  // ln((1 + documents) / (1 + df)) + 1
  double Idf(size_t term_index) const;

 private:
  std::vector<std::string> terms_;
  std::vector<size_t> df_;
  size_t document_count_ = 0;
  int max_ngram_ = 2;
  std::unordered_map<std::string, size_t> index_;
};

// Terms of a post: word tokens, hashtags and mentions as unigrams, plus
// space-joined consecutive word bigrams when max_ngram >= 2.
std::vector<std::string> TfidfTerms(const corpus::TokenizedPost& tokenized,
                                    int max_ngram);

// Keeps the max_features terms with the highest document frequency, ties in
// lexicographic order.
TfidfVocabulary BuildTfidfVocab(std::span<const corpus::TokenizedPost> docs,
                                const TfidfOptions& options = {});

// Raw term count times smoothed idf, L2-normalized (zero stays zero).
std::vector<double> TfidfFeatures(const corpus::TokenizedPost& tokenized,
                                  const TfidfVocabulary& vocab);

FeatureMatrix TfidfMatrix(std::span<const corpus::TokenizedPost> tokenized,
                          const TfidfVocabulary& vocab, int threads = 1);

nlohmann::ordered_json ToJson(const TfidfVocabulary& vocab);
TfidfVocabulary TfidfVocabFromJson(const nlohmann::json& j);

}  // namespace synthaudit::features

#endif  // SYNTHAUDIT_FEATURES_H_
