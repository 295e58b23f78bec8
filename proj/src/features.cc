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

#include "synthaudit/features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "synthaudit/csv.h"
#include "synthaudit/errors.h"
#include "synthaudit/parallel.h"
#include "synthaudit/unicode.h"

namespace synthaudit::features {
namespace {

bool IsVowel(char32_t cp) {
  switch (cp) {
    case U'a':
    case U'e':
    case U'i':
    case U'o':
    case U'u':
    case U'y':
    case U'à':
    case U'á':
    case U'â':
    case U'ä':
    case U'è':
    case U'é':
    case U'ê':
    case U'ë':
    case U'ì':
    case U'í':
    case U'î':
    case U'ï':
    case U'ò':
    case U'ó':
    case U'ô':
    case U'ö':
    case U'ù':
    case U'ú':
    case U'û':
    case U'ü':
    case U'ÿ':
      return true;
    default:
      return false;
  }
}

// Distinct items occurring more than once.
size_t RepeatedCount(const std::vector<std::string>& items) {
  std::map<std::string_view, size_t> counts;
  for (const auto& item : items) ++counts[item];
  size_t repeated = 0;
  for (const auto& [item, n] : counts) {
    if (n > 1) ++repeated;
  }
  return repeated;
}

std::string JoinNGram(const NGram& gram) {
  std::string out;
  for (size_t i = 0; i < gram.size(); ++i) {
    if (i > 0) out += ' ';
    out += gram[i];
  }
  return out;
}

std::vector<std::pair<NGram, size_t>> TopNGrams(
    std::span<const corpus::TokenizedPost> docs, size_t n, size_t top_k) {
  std::map<NGram, size_t> counts;
  for (const auto& doc : docs) {
    const auto& words = doc.word_tokens;
    for (size_t i = 0; i + n <= words.size(); ++i) {
      ++counts[NGram(words.begin() + i, words.begin() + i + n)];
    }
  }
  // std::map iteration is lexicographic, so a stable sort on count keeps the
  // lexicographic tie order.
  std::vector<std::pair<NGram, size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(
      ranked.begin(), ranked.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

std::vector<std::pair<NGram, size_t>> NGramListFromJson(
    const nlohmann::json& list, size_t n) {
  std::vector<std::pair<NGram, size_t>> out;
  for (const auto& entry : list) {
    NGram gram = entry.at("ngram").get<NGram>();
    if (gram.size() != n) {
      throw DataError("n-gram vocabulary entry has " +
                      std::to_string(gram.size()) + " tokens, expected " +
                      std::to_string(n));
    }
    out.emplace_back(std::move(gram), entry.at("count").get<size_t>());
  }
  return out;
}

template <typename RowFn>
FeatureMatrix BuildMatrix(std::span<const corpus::TokenizedPost> tokenized,
                          std::vector<std::string> columns, int threads,
                          RowFn&& row_fn) {
  const size_t width = columns.size();
  std::vector<double> values(tokenized.size() * width, 0.0);
  ParallelFor(tokenized.size(), threads, [&](size_t i) {
    const auto row = row_fn(tokenized[i]);
    std::copy(row.begin(), row.end(), values.begin() + i * width);
  });
  std::vector<std::string> ids;
  ids.reserve(tokenized.size());
  for (const auto& t : tokenized) ids.push_back(t.post_id);
  return FeatureMatrix(std::move(columns), std::move(ids), std::move(values));
}

}  // namespace

const std::vector<std::string>& StylometricColumns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c = {
        "total_words",      "total_sentences",     "avg_word_length",
        "lexical_richness", "flesch_reading_ease", "flesch_kincaid_grade",
        "digit_count",      "punctuation_count",   "special_count",
        "emoji_count",      "emoticon_count",      "emoji_density",
        "emoticon_density", "hashtag_density",     "mention_density",
        "url_density",      "repeated_word_count", "repeated_emoji_count"};
    for (char letter = 'a'; letter <= 'z'; ++letter) {
      c.push_back(std::string("letter_freq_") + letter);
    }
    for (char digit = '0'; digit <= '9'; ++digit) {
      c.push_back(std::string("digit_freq_") + digit);
    }
    for (char special : corpus::kSpecialChars) {
      c.push_back(std::string("special_freq_") + special);
    }
    return c;
  }();
  return columns;
}

size_t CountSyllables(std::string_view word) {
  const std::u32string cps = unicode::Decode(unicode::ToLower(word));
  size_t groups = 0;
  bool in_group = false;
  for (char32_t cp : cps) {
    const bool vowel = IsVowel(cp);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  if (!cps.empty() && cps.back() == U'e' && groups > 1) --groups;
  return std::max<size_t>(groups, 1);
}

std::optional<double> FleschReadingEase(size_t words, size_t sentences,
                                        size_t syllables) {
  if (words == 0 || sentences == 0) return std::nullopt;
  const double w = static_cast<double>(words);
  return 206.835 - 1.015 * (w / static_cast<double>(sentences)) -
         84.6 * (static_cast<double>(syllables) / w);
}

std::optional<double> FleschKincaidGrade(size_t words, size_t sentences,
                                         size_t syllables) {
  if (words == 0 || sentences == 0) return std::nullopt;
  const double w = static_cast<double>(words);
  return 0.39 * (w / static_cast<double>(sentences)) +
         11.8 * (static_cast<double>(syllables) / w) - 15.59;
}

std::optional<double> LexicalDiversity(const corpus::TokenizedPost& tokenized) {
  if (tokenized.word_tokens.empty()) return std::nullopt;
  std::set<std::string_view> types(tokenized.word_tokens.begin(),
                                   tokenized.word_tokens.end());
  return static_cast<double>(types.size()) /
         static_cast<double>(tokenized.word_tokens.size());
}

size_t TotalSyllables(const corpus::TokenizedPost& tokenized) {
  size_t total = 0;
  for (const auto& word : tokenized.word_tokens) total += CountSyllables(word);
  return total;
}

StylometricVector ExtractStylometric(const corpus::TokenizedPost& t) {
  StylometricVector v{};
  const size_t words = t.word_tokens.size();
  const size_t sentences = t.sentences.size();
  const size_t syllables = TotalSyllables(t);
  const double denom = static_cast<double>(std::max<size_t>(1, words));

  v[slot::kTotalWords] = static_cast<double>(words);
  v[slot::kTotalSentences] = static_cast<double>(sentences);
  if (words > 0) {
    size_t chars = 0;
    for (const auto& w : t.word_tokens) chars += unicode::Length(w);
    v[slot::kAvgWordLength] =
        static_cast<double>(chars) / static_cast<double>(words);
  }
  v[slot::kLexicalRichness] = LexicalDiversity(t).value_or(0.0);
  v[slot::kFleschReadingEase] =
      FleschReadingEase(words, sentences, syllables).value_or(0.0);
  v[slot::kFleschKincaidGrade] =
      FleschKincaidGrade(words, sentences, syllables).value_or(0.0);
  v[slot::kDigitCount] = static_cast<double>(t.digits_count);
  v[slot::kPunctuationCount] = static_cast<double>(t.punctuation_count);
  v[slot::kSpecialCount] = static_cast<double>(t.special_count);
  v[slot::kEmojiCount] = static_cast<double>(t.emojis.size());
  v[slot::kEmoticonCount] = static_cast<double>(t.emoticons.size());
  v[slot::kEmojiDensity] = static_cast<double>(t.emojis.size()) / denom;
  v[slot::kEmoticonDensity] = static_cast<double>(t.emoticons.size()) / denom;
  v[slot::kHashtagDensity] = static_cast<double>(t.hashtags.size()) / denom;
  v[slot::kMentionDensity] = static_cast<double>(t.mentions.size()) / denom;
  v[slot::kUrlDensity] = static_cast<double>(t.urls.size()) / denom;
  v[slot::kRepeatedWordCount] =
      static_cast<double>(RepeatedCount(t.word_tokens));
  v[slot::kRepeatedEmojiCount] = static_cast<double>(RepeatedCount(t.emojis));
  std::copy(t.letter_frequencies.begin(), t.letter_frequencies.end(),
            v.begin() + slot::kLetterFreq);
  std::copy(t.digit_frequencies.begin(), t.digit_frequencies.end(),
            v.begin() + slot::kDigitFreq);
  std::copy(t.special_frequencies.begin(), t.special_frequencies.end(),
            v.begin() + slot::kSpecialFreq);
  return v;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns,
                             std::vector<std::string> post_ids,
                             std::vector<double> values)
    : columns_(std::move(columns)),
      post_ids_(std::move(post_ids)),
      values_(std::move(values)) {
  if (values_.size() != columns_.size() * post_ids_.size()) {
    throw InvalidArgument("feature matrix has " +
                          std::to_string(values_.size()) + " values for " +
                          std::to_string(post_ids_.size()) + " rows x " +
                          std::to_string(columns_.size()) + " columns");
  }
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite feature value in row '" +
                      post_ids_[i / columns_.size()] + "', column '" +
                      columns_[i % columns_.size()] + "'");
    }
  }
}

FeatureMatrix FeatureMatrix::Select(std::span<const size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(indices.size());
  values.reserve(indices.size() * cols());
  for (size_t i : indices) {
    ids.push_back(post_ids_.at(i));
    const auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return FeatureMatrix(columns_, std::move(ids), std::move(values));
}

void FeatureMatrix::WriteCsv(std::ostream& out) const {
  out << "post_id";
  for (const auto& c : columns_) {
    out << ',';
    out << csv::Escape(c);
  }
  out << '\n';
  char buf[32];
  for (size_t i = 0; i < rows(); ++i) {
    out << csv::Escape(post_ids_[i]);
    for (double x : row(i)) {
      std::snprintf(buf, sizeof(buf), "%.10g", x);
      out << ',' << buf;
    }
    out << '\n';
  }
}

FeatureMatrix StylometricMatrix(
    std::span<const corpus::TokenizedPost> tokenized, int threads) {
  return BuildMatrix(
      tokenized, StylometricColumns(), threads,
      [](const corpus::TokenizedPost& t) { return ExtractStylometric(t); });
}

NGramVocabulary BuildNGramVocab(std::span<const corpus::TokenizedPost> docs,
                                size_t top_k) {
  NGramVocabulary vocab;
  vocab.top_k = top_k;
  vocab.bigrams = TopNGrams(docs, 2, top_k);
  vocab.trigrams = TopNGrams(docs, 3, top_k);
  return vocab;
}

std::vector<double> NGramFeatures(const corpus::TokenizedPost& tokenized,
                                  const NGramVocabulary& vocab) {
  std::vector<double> out(vocab.width(), 0.0);
  const auto& words = tokenized.word_tokens;
  auto fill = [&](const std::vector<std::pair<NGram, size_t>>& entries,
                  size_t n, size_t offset) {
    if (entries.empty()) return;
    std::map<NGram, size_t> counts;
    for (size_t i = 0; i + n <= words.size(); ++i) {
      ++counts[NGram(words.begin() + i, words.begin() + i + n)];
    }
    for (size_t k = 0; k < entries.size() && k < vocab.top_k; ++k) {
      auto it = counts.find(entries[k].first);
      if (it != counts.end()) out[offset + k] = static_cast<double>(it->second);
    }
  };
  fill(vocab.bigrams, 2, 0);
  fill(vocab.trigrams, 3, vocab.top_k);
  return out;
}

FeatureMatrix NGramMatrix(std::span<const corpus::TokenizedPost> tokenized,
                          const NGramVocabulary& vocab, int threads) {
  std::vector<std::string> columns;
  columns.reserve(vocab.width());
  for (size_t k = 0; k < vocab.top_k; ++k) {
    columns.push_back(k < vocab.bigrams.size()
                          ? "bigram:" + JoinNGram(vocab.bigrams[k].first)
                          : "bigram:<empty" + std::to_string(k) + ">");
  }
  for (size_t k = 0; k < vocab.top_k; ++k) {
    columns.push_back(k < vocab.trigrams.size()
                          ? "trigram:" + JoinNGram(vocab.trigrams[k].first)
                          : "trigram:<empty" + std::to_string(k) + ">");
  }
  return BuildMatrix(
      tokenized, std::move(columns), threads,
      [&](const corpus::TokenizedPost& t) { return NGramFeatures(t, vocab); });
}

nlohmann::ordered_json ToJson(const NGramVocabulary& vocab) {
  auto list = [](const std::vector<std::pair<NGram, size_t>>& entries) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [gram, count] : entries) {
      arr.push_back({{"ngram", gram}, {"count", count}});
    }
    return arr;
  };
  nlohmann::ordered_json j;
  j["kind"] = "ngram";
  j["top_k"] = vocab.top_k;
  j["bigrams"] = list(vocab.bigrams);
  j["trigrams"] = list(vocab.trigrams);
  return j;
}

NGramVocabulary NGramVocabFromJson(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "ngram") {
      throw DataError("vocabulary kind is not 'ngram'");
    }
    NGramVocabulary vocab;
    vocab.top_k = j.at("top_k").get<size_t>();
    vocab.bigrams = NGramListFromJson(j.at("bigrams"), 2);
    vocab.trigrams = NGramListFromJson(j.at("trigrams"), 3);
    if (vocab.bigrams.size() > vocab.top_k ||
        vocab.trigrams.size() > vocab.top_k) {
      throw DataError("n-gram vocabulary holds more than top_k entries");
    }
    return vocab;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed n-gram vocabulary: ") + e.what());
  }
}

TfidfVocabulary::TfidfVocabulary(std::vector<std::string> terms,
                                 std::vector<size_t> document_frequency,
                                 size_t document_count, int max_ngram)
    : terms_(std::move(terms)),
      df_(std::move(document_frequency)),
      document_count_(document_count),
      max_ngram_(max_ngram) {
  if (terms_.size() != df_.size()) {
    throw InvalidArgument("tf-idf vocabulary terms and frequencies differ");
  }
  if (max_ngram_ < 1 || max_ngram_ > 2) {
    throw InvalidArgument("tf-idf max_ngram must be 1 or 2");
  }
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw DataError("duplicate tf-idf term '" + terms_[i] + "'");
    }
  }
}

std::optional<size_t> TfidfVocabulary::Find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TfidfVocabulary::Idf(size_t term_index) const {
  return std::log((1.0 + static_cast<double>(document_count_)) /
                  (1.0 + static_cast<double>(df_.at(term_index)))) +
         1.0;
}

std::vector<std::string> TfidfTerms(const corpus::TokenizedPost& tokenized,
                                    int max_ngram) {
  const auto& words = tokenized.word_tokens;
  std::vector<std::string> terms(words.begin(), words.end());
  terms.insert(terms.end(), tokenized.hashtags.begin(),
               tokenized.hashtags.end());
  terms.insert(terms.end(), tokenized.mentions.begin(),
               tokenized.mentions.end());
  if (max_ngram >= 2) {
    for (size_t i = 0; i + 1 < words.size(); ++i) {
      terms.push_back(words[i] + ' ' + words[i + 1]);
    }
  }
  return terms;
}

TfidfVocabulary BuildTfidfVocab(std::span<const corpus::TokenizedPost> docs,
                                const TfidfOptions& options) {
  std::map<std::string, size_t> df;
  for (const auto& doc : docs) {
    auto terms = TfidfTerms(doc, options.max_ngram);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& term : terms) ++df[std::move(term)];
  }
  std::vector<std::pair<std::string, size_t>> ranked(df.begin(), df.end());
  std::stable_sort(
      ranked.begin(), ranked.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > options.max_features) {
    ranked.resize(options.max_features);
  }
  std::vector<std::string> terms;
  std::vector<size_t> freqs;
  for (auto& [term, count] : ranked) {
    terms.push_back(std::move(term));
    freqs.push_back(count);
  }
  return TfidfVocabulary(std::move(terms), std::move(freqs), docs.size(),
                         options.max_ngram);
}

std::vector<double> TfidfFeatures(const corpus::TokenizedPost& tokenized,
                                  const TfidfVocabulary& vocab) {
  std::vector<double> out(vocab.terms().size(), 0.0);
  for (const auto& term : TfidfTerms(tokenized, vocab.max_ngram())) {
    if (auto k = vocab.Find(term)) out[*k] += 1.0;
  }
  double norm2 = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    if (out[k] != 0.0) {
      out[k] *= vocab.Idf(k);
      norm2 += out[k] * out[k];
    }
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : out) x *= inv;
  }
  return out;
}

FeatureMatrix TfidfMatrix(std::span<const corpus::TokenizedPost> tokenized,
                          const TfidfVocabulary& vocab, int threads) {
  std::vector<std::string> columns;
  columns.reserve(vocab.terms().size());
  for (const auto& term : vocab.terms()) columns.push_back("tfidf:" + term);
  return BuildMatrix(
      tokenized, std::move(columns), threads,
      [&](const corpus::TokenizedPost& t) { return TfidfFeatures(t, vocab); });
}

nlohmann::ordered_json ToJson(const TfidfVocabulary& vocab) {
  nlohmann::ordered_json j;
  j["kind"] = "tfidf";
  j["max_ngram"] = vocab.max_ngram();
  j["document_count"] = vocab.document_count();
  auto terms = nlohmann::ordered_json::array();
  for (size_t i = 0; i < vocab.terms().size(); ++i) {
    terms.push_back(
        {{"term", vocab.terms()[i]}, {"df", vocab.document_frequency()[i]}});
  }
  j["terms"] = std::move(terms);
  return j;
}

TfidfVocabulary TfidfVocabFromJson(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "tfidf") {
      throw DataError("vocabulary kind is not 'tfidf'");
    }
    std::vector<std::string> terms;
    std::vector<size_t> df;
    for (const auto& entry : j.at("terms")) {
      terms.push_back(entry.at("term").get<std::string>());
      df.push_back(entry.at("df").get<size_t>());
    }
    return TfidfVocabulary(std::move(terms), std::move(df),
                           j.at("document_count").get<size_t>(),
                           j.at("max_ngram").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed tf-idf vocabulary: ") + e.what());
  }
}

}  // namespace synthaudit::features
