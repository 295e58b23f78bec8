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

#ifndef SYNTHAUDIT_CORPUS_H_
#define SYNTHAUDIT_CORPUS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace synthaudit::corpus {

struct Post {
  std::string id;
  std::string author;
  std::string text;
  std::optional<std::string> timestamp;
  // Id of the real post a synthetic post was derived from.
  std::optional<std::string> source_id;

  // Whitespace-only or empty text. Degenerate posts are kept and contribute
  // zeros to features.
  bool degenerate() const;

  friend bool operator==(const Post&, const Post&) = default;
};

enum class CorpusKind { kReal, kSynthetic };

std::string_view CorpusKindName(CorpusKind kind);
CorpusKind ParseCorpusKind(std::string_view name);

// Ordered, id-unique collection of posts. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  // Throws DataError on empty/duplicate ids or empty authors.
  Corpus(std::vector<Post> posts, CorpusKind kind, std::string label = "");

  const std::vector<Post>& posts() const { return posts_; }
  CorpusKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  size_t size() const { return posts_.size(); }
  bool empty() const { return posts_.empty(); }

  // Index of the post with this id, if present.
  std::optional<size_t> Find(std::string_view id) const;

  // Distinct author labels in lexicographic order.
  std::vector<std::string> Authors() const;

  // Posts whose index satisfies keep(i), in original order.
  template <typename Pred>
  Corpus Filter(Pred keep) const {
    std::vector<Post> out;
    for (size_t i = 0; i < posts_.size(); ++i) {
      if (keep(i)) out.push_back(posts_[i]);
    }
    return Corpus(std::move(out), kind_, label_);
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.posts_ == b.posts_ && a.kind_ == b.kind_;
  }

 private:
  std::vector<Post> posts_;
  CorpusKind kind_ = CorpusKind::kReal;
  std::string label_;
  std::unordered_map<std::string, size_t> index_;
};

// Reads line-delimited JSON records {id, author, text[, timestamp]
// [, source_id]}. Text is lowercased. Blank lines are skipped. Errors carry the
// 1-based line number.
Corpus ReadCorpus(std::istream& in, CorpusKind kind, std::string label = "");
Corpus LoadCorpus(const std::filesystem::path& path, CorpusKind kind);

// Canonical writer: fixed key order, compact JSON, LF endings.
void WriteCorpus(const Corpus& corpus, std::ostream& out);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

// Index range [begin, end) into TokenizedPost::word_tokens.
struct Span {
  size_t begin = 0;
  size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

inline constexpr std::string_view kSpecialChars = "#@/\\_-*&%$+=~^";

struct TokenizedPost {
  std::string post_id;
  std::vector<std::string> word_tokens;
  std::vector<Span> sentences;
  std::vector<std::string> emojis;
  std::vector<std::string> emoticons;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> urls;
  size_t digits_count = 0;
  size_t punctuation_count = 0;
  size_t special_count = 0;
  std::array<double, 26> letter_frequencies{};
  std::array<double, 10> digit_frequencies{};
  std::array<double, kSpecialChars.size()> special_frequencies{};

  friend bool operator==(const TokenizedPost&, const TokenizedPost&) = default;
};

// The fixed ASCII emoticon list recognised by Tokenize (lowercase forms).
const std::vector<std::string>& EmoticonList();

TokenizedPost Tokenize(const Post& post);

// Tokenizes every post, optionally across threads. Output order = post order.
std::vector<TokenizedPost> TokenizeAll(const Corpus& corpus, int threads = 1);

struct AlignedCorpus {
  std::vector<std::pair<Post, Post>> pairs;  // (real, synthetic)
  std::vector<Post> unmatched_real;
  std::vector<Post> unmatched_synth;
  // Synthetic posts whose source_id names no real post.
  size_t dangling_source_warnings = 0;
};

// Pairs synthetic posts with their real source. Throws DataError when one real
// post is claimed by two synthetic posts.
AlignedCorpus Align(const Corpus& real, const Corpus& synth);

struct HistogramBin {
  size_t lower = 0;  // inclusive
  size_t upper = 0;  // exclusive
  size_t count = 0;
};

struct AuthorStats {
  // Descending by count, ties by label.
  std::vector<std::pair<std::string, size_t>> posts_per_author;
  // Words per post.
  std::vector<HistogramBin> length_histogram;
  double mean_words = 0.0;
  double median_words = 0.0;
  size_t max_words = 0;
};

AuthorStats ComputeAuthorStats(const Corpus& corpus, size_t bin_width = 10);

}  // namespace synthaudit::corpus

#endif  // SYNTHAUDIT_CORPUS_H_
