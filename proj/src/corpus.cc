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

#include "synthaudit/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"
#include "synthaudit/errors.h"
#include "synthaudit/parallel.h"
#include "synthaudit/unicode.h"

namespace synthaudit::corpus {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string LineError(size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::optional<std::string> OptionalString(const json& record, const char* field,
                                          size_t line) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError(
        LineError(line, std::string("field '") + field + "' must be a string"));
  }
  return it->get<std::string>();
}

std::string RequiredString(const json& record, const char* field, size_t line) {
  auto value = OptionalString(record, field, line);
  if (!value) {
    throw DataError(
        LineError(line, std::string("missing required field '") + field + "'"));
  }
  return *value;
}

bool IsWordChar(char32_t cp) {
  return unicode::IsLetter(cp) || unicode::IsDigit(cp) || cp == U'_';
}

bool IsSentenceTerminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x2026;
}

bool StartsWith(const std::u32string& s, size_t pos, std::u32string_view p) {
  return s.size() >= pos + p.size() && s.compare(pos, p.size(), p) == 0;
}

class Tokenizer {
 public:
  explicit Tokenizer(const Post& post) : cps_(unicode::Decode(post.text)) {
    out_.post_id = post.id;
  }

  TokenizedPost Run() {
    size_t i = 0;
    while (i < cps_.size()) i = Step(i);
    CloseSentence();
    Normalize();
    return std::move(out_);
  }

 private:
  size_t Step(size_t i) {
    const char32_t c = cps_[i];
    const bool at_boundary = i == 0 || unicode::IsWhitespace(cps_[i - 1]);
    if (unicode::IsWhitespace(c)) {
      if (c == U'\n') CloseSentence();
      return i + 1;
    }
    if (StartsWith(cps_, i, U"http://") || StartsWith(cps_, i, U"https://")) {
      size_t j = i;
      while (j < cps_.size() && !unicode::IsWhitespace(cps_[j])) ++j;
      out_.urls.push_back(unicode::Encode(cps_.substr(i, j - i)));
      return j;
    }
    if ((c == U'#' || c == U'@') && i + 1 < cps_.size() &&
        IsWordChar(cps_[i + 1]) && (i == 0 || !IsWordChar(cps_[i - 1]))) {
      size_t j = i + 1;
      while (j < cps_.size() && IsWordChar(cps_[j])) ++j;
      std::u32string tag = cps_.substr(i, j - i);
      for (char32_t& t : tag) t = unicode::ToLower(t);
      for (size_t k = i; k < j; ++k) CountChar(cps_[k]);
      (c == U'#' ? out_.hashtags : out_.mentions)
          .push_back(unicode::Encode(tag));
      return j;
    }
    if (unicode::IsEmojiBase(c)) return ReadEmoji(i);
    if (at_boundary) {
      if (size_t len = MatchEmoticon(i); len > 0) {
        for (size_t k = i; k < i + len; ++k) CountChar(cps_[k]);
        out_.emoticons.push_back(unicode::Encode(cps_.substr(i, len)));
        return i + len;
      }
    }
    if (unicode::IsLetter(c) ||
        (unicode::IsApostrophe(c) && i + 1 < cps_.size() &&
         unicode::IsLetter(cps_[i + 1]))) {
      size_t j = i;
      while (j < cps_.size() &&
             (unicode::IsLetter(cps_[j]) || unicode::IsApostrophe(cps_[j]))) {
        CountChar(cps_[j]);
        ++j;
      }
      size_t b = i, e = j;
      while (b < e && unicode::IsApostrophe(cps_[b])) ++b;
      while (e > b && unicode::IsApostrophe(cps_[e - 1])) --e;
      std::u32string word = cps_.substr(b, e - b);
      for (char32_t& w : word) w = unicode::ToLower(w);
      if (!word.empty()) out_.word_tokens.push_back(unicode::Encode(word));
      return j;
    }
    CountChar(c);
    if (IsSentenceTerminator(c)) {
      const bool decimal_point = c == U'.' && i > 0 && i + 1 < cps_.size() &&
                                 unicode::IsDigit(cps_[i - 1]) &&
                                 unicode::IsDigit(cps_[i + 1]);
      if (!decimal_point) CloseSentence();
    }
    return i + 1;
  }

  size_t ReadEmoji(size_t i) {
    size_t j = i;
    if (unicode::IsRegionalIndicator(cps_[j])) {
      ++j;
      if (j < cps_.size() && unicode::IsRegionalIndicator(cps_[j])) ++j;
    } else {
      ++j;
      for (;;) {
        while (j < cps_.size() && unicode::IsEmojiModifier(cps_[j])) ++j;
        if (j + 1 < cps_.size() && cps_[j] == unicode::kZeroWidthJoiner &&
            unicode::IsEmojiBase(cps_[j + 1])) {
          j += 2;
          continue;
        }
        break;
      }
    }
    out_.emojis.push_back(unicode::Encode(cps_.substr(i, j - i)));
    return j;
  }

  // Length of the longest emoticon at i that ends at whitespace or text end.
  size_t MatchEmoticon(size_t i) const {
    size_t best = 0;
    for (const std::string& e : EmoticonList()) {
      const size_t len = e.size();  // ASCII only
      if (len <= best || i + len > cps_.size()) continue;
      bool match = true;
      for (size_t k = 0; k < len && match; ++k) {
        match = unicode::ToLower(cps_[i + k]) == static_cast<char32_t>(e[k]);
      }
      if (!match) continue;
      if (i + len < cps_.size() && !unicode::IsWhitespace(cps_[i + len])) {
        continue;
      }
      best = len;
    }
    return best;
  }

  void CountChar(char32_t c) {
    const char32_t lower = unicode::ToLower(c);
    if (lower >= U'a' && lower <= U'z') {
      ++letters_[lower - U'a'];
    } else if (unicode::IsDigit(c)) {
      ++out_.digits_count;
      ++digits_[c - U'0'];
    } else if (c < 0x80 && kSpecialChars.find(static_cast<char>(c)) !=
                               std::string_view::npos) {
      ++out_.special_count;
      ++specials_[kSpecialChars.find(static_cast<char>(c))];
    } else if (unicode::IsPunctuation(c)) {
      ++out_.punctuation_count;
    }
  }

  void CloseSentence() {
    if (out_.word_tokens.size() > sentence_start_) {
      out_.sentences.push_back({sentence_start_, out_.word_tokens.size()});
      sentence_start_ = out_.word_tokens.size();
    }
  }

  template <size_t N>
  static void ToFrequencies(const std::array<size_t, N>& counts,
                            std::array<double, N>& freqs) {
    size_t total = 0;
    for (size_t c : counts) total += c;
    for (size_t k = 0; k < N; ++k) {
      freqs[k] = total == 0 ? 0.0
                            : static_cast<double>(counts[k]) /
                                  static_cast<double>(total);
    }
  }

  void Normalize() {
    ToFrequencies(letters_, out_.letter_frequencies);
    ToFrequencies(digits_, out_.digit_frequencies);
    ToFrequencies(specials_, out_.special_frequencies);
  }

  std::u32string cps_;
  TokenizedPost out_;
  size_t sentence_start_ = 0;
  std::array<size_t, 26> letters_{};
  std::array<size_t, 10> digits_{};
  std::array<size_t, kSpecialChars.size()> specials_{};
};

}  // namespace

bool Post::degenerate() const {
  for (char32_t cp : unicode::Decode(text)) {
    if (!unicode::IsWhitespace(cp)) return false;
  }
  return true;
}

std::string_view CorpusKindName(CorpusKind kind) {
  return kind == CorpusKind::kReal ? "real" : "synthetic";
}

CorpusKind ParseCorpusKind(std::string_view name) {
  if (name == "real") return CorpusKind::kReal;
  if (name == "synthetic") return CorpusKind::kSynthetic;
  throw ConfigError("unknown corpus kind '" + std::string(name) + "'");
}

Corpus::Corpus(std::vector<Post> posts, CorpusKind kind, std::string label)
    : posts_(std::move(posts)), kind_(kind), label_(std::move(label)) {
  index_.reserve(posts_.size());
  for (size_t i = 0; i < posts_.size(); ++i) {
    const Post& p = posts_[i];
    if (p.id.empty()) throw DataError("post with empty id");
    if (p.author.empty()) throw DataError("post '" + p.id + "' has no author");
    if (!index_.emplace(p.id, i).second) {
      throw DataError("duplicate post id '" + p.id + "'");
    }
  }
}

std::optional<size_t> Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Corpus::Authors() const {
  std::set<std::string> authors;
  for (const Post& p : posts_) authors.insert(p.author);
  return {authors.begin(), authors.end()};
}

Corpus ReadCorpus(std::istream& in, CorpusKind kind, std::string label) {
  std::vector<Post> posts;
  std::map<std::string, size_t> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(
          LineError(line_no, "malformed record: " + std::string(e.what())));
    }
    if (!record.is_object()) {
      throw DataError(LineError(line_no, "record is not a JSON object"));
    }
    Post post;
    post.id = RequiredString(record, "id", line_no);
    post.author = RequiredString(record, "author", line_no);
    post.text = unicode::ToLower(RequiredString(record, "text", line_no));
    post.timestamp = OptionalString(record, "timestamp", line_no);
    post.source_id = OptionalString(record, "source_id", line_no);
    if (post.id.empty()) throw DataError(LineError(line_no, "empty id"));
    if (post.author.empty()) {
      throw DataError(LineError(line_no, "empty author"));
    }
    if (auto [it, inserted] = seen.emplace(post.id, line_no); !inserted) {
      throw DataError(LineError(line_no, "duplicate id '" + post.id +
                                             "' (first seen on line " +
                                             std::to_string(it->second) + ")"));
    }
    posts.push_back(std::move(post));
  }
  return Corpus(std::move(posts), kind, std::move(label));
}

Corpus LoadCorpus(const std::filesystem::path& path, CorpusKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  try {
    return ReadCorpus(in, kind, path.filename().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteCorpus(const Corpus& corpus, std::ostream& out) {
  for (const Post& p : corpus.posts()) {
    ordered_json record;
    record["id"] = p.id;
    record["author"] = p.author;
    record["text"] = p.text;
    if (p.timestamp) record["timestamp"] = *p.timestamp;
    if (p.source_id) record["source_id"] = *p.source_id;
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  WriteCorpus(corpus, out);
}

const std::vector<std::string>& EmoticonList() {
  static const std::vector<std::string> kList = {
      ":)",  ":-)", ":(", ":-(", ":d",  ":-d",  ";)", ";-)", ":p",  ":-p",
      ";p",  ";-p", ":o", ":-o", ":'(", ":'-(", ":/", ":-/", ":|",  ":-|",
      ":*",  ":-*", "<3", "</3", ":3",  "=)",   "=(", "=d",  "=p",  ":-]",
      ">:(", ":]",  ":[", ":>",  ":<",  ":$",   ":s", "^^",  "^_^", "-_-",
  };
  return kList;
}

TokenizedPost Tokenize(const Post& post) { return Tokenizer(post).Run(); }

std::vector<TokenizedPost> TokenizeAll(const Corpus& corpus, int threads) {
  std::vector<TokenizedPost> out(corpus.size());
  ParallelFor(corpus.size(), threads,
              [&](size_t i) { out[i] = Tokenize(corpus.posts()[i]); });
  return out;
}

AlignedCorpus Align(const Corpus& real, const Corpus& synth) {
  AlignedCorpus aligned;
  std::vector<bool> claimed(real.size(), false);
  for (const Post& s : synth.posts()) {
    if (!s.source_id) {
      aligned.unmatched_synth.push_back(s);
      ++aligned.dangling_source_warnings;
      continue;
    }
    auto idx = real.Find(*s.source_id);
    if (!idx) {
      aligned.unmatched_synth.push_back(s);
      ++aligned.dangling_source_warnings;
      continue;
    }
    if (claimed[*idx]) {
      throw DataError("real post '" + *s.source_id +
                      "' is claimed by more than one synthetic post");
    }
    claimed[*idx] = true;
    aligned.pairs.emplace_back(real.posts()[*idx], s);
  }
  for (size_t i = 0; i < real.size(); ++i) {
    if (!claimed[i]) aligned.unmatched_real.push_back(real.posts()[i]);
  }
  return aligned;
}

AuthorStats ComputeAuthorStats(const Corpus& corpus, size_t bin_width) {
  if (corpus.empty()) throw DataError("author statistics of an empty corpus");
  if (bin_width == 0) throw InvalidArgument("histogram bin width must be > 0");
  AuthorStats stats;
  std::map<std::string, size_t> counts;
  std::vector<size_t> lengths;
  lengths.reserve(corpus.size());
  for (const Post& p : corpus.posts()) {
    ++counts[p.author];
    lengths.push_back(Tokenize(p).word_tokens.size());
  }
  stats.posts_per_author.assign(counts.begin(), counts.end());
  std::stable_sort(
      stats.posts_per_author.begin(), stats.posts_per_author.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  double total = 0.0;
  for (size_t len : lengths) total += static_cast<double>(len);
  stats.mean_words = total / static_cast<double>(lengths.size());
  std::vector<size_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size();
  stats.median_words =
      m % 2 == 1 ? static_cast<double>(sorted[m / 2])
                 : 0.5 * static_cast<double>(sorted[m / 2 - 1] + sorted[m / 2]);
  stats.max_words = sorted.back();
  const size_t bins = stats.max_words / bin_width + 1;
  stats.length_histogram.resize(bins);
  for (size_t b = 0; b < bins; ++b) {
    stats.length_histogram[b].lower = b * bin_width;
    stats.length_histogram[b].upper = (b + 1) * bin_width;
  }
  for (size_t len : lengths) ++stats.length_histogram[len / bin_width].count;
  return stats;
}

}  // namespace synthaudit::corpus
