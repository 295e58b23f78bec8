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

#include "synthaudit/fidelity.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "synthaudit/csv.h"
#include "synthaudit/errors.h"
#include "synthaudit/features.h"

namespace synthaudit::fidelity {
namespace {

double Mean(double sum, size_t n) {
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

const Sentiment& LabelOf(const SentimentLabels& labels, const std::string& id,
                         std::string_view side) {
  auto it = labels.labels.find(id);
  if (it == labels.labels.end()) {
    throw DataError("no " + std::string(side) + " sentiment label for post '" +
                    id + "'");
  }
  return it->second;
}

std::vector<std::string> Keywords(
    const std::vector<std::map<std::string, size_t>>& counts, size_t cluster) {
  const size_t k = counts.size();
  const auto& mine = counts[cluster];
  size_t total = 0;
  for (const auto& [term, n] : mine) total += n;
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [term, n] : mine) {
    size_t df = 0;
    for (const auto& other : counts) df += other.count(term);
    const double tf = static_cast<double>(n) / static_cast<double>(total);
    const double idf =
        std::log(1.0 + static_cast<double>(k) / static_cast<double>(df));
    scored.emplace_back(term, tf * idf);
  }
  // Map order is lexicographic, so a stable sort keeps it for equal scores.
  std::stable_sort(
      scored.begin(), scored.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (size_t i = 0; i < scored.size() && i < 10; ++i) {
    out.push_back(scored[i].first);
  }
  return out;
}

std::vector<size_t> SortedByIdOrder(std::span<const std::string> ids) {
  std::vector<size_t> order(ids.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return ids[a] < ids[b]; });
  return order;
}

embedding::PointSet Gather(const embedding::PointSet& points,
                           std::span<const size_t> rows) {
  embedding::PointSet out;
  out.dim = points.dim;
  out.values.reserve(rows.size() * points.dim);
  for (size_t r : rows) out.Append(points.row(r));
  return out;
}

}  // namespace

TraitsSummary ComputeTraits(std::span<const corpus::TokenizedPost> posts) {
  if (posts.empty()) throw DataError("traits of an empty corpus");
  TraitsSummary t;
  t.posts = posts.size();
  double hashtags = 0, mentions = 0, urls = 0, emojis = 0, words = 0,
         punctuation = 0, readability = 0, diversity = 0, sentence_len = 0;
  for (const auto& p : posts) {
    hashtags += static_cast<double>(p.hashtags.size());
    mentions += static_cast<double>(p.mentions.size());
    urls += static_cast<double>(p.urls.size());
    emojis += static_cast<double>(p.emojis.size());
    words += static_cast<double>(p.word_tokens.size());
    punctuation += static_cast<double>(p.punctuation_count);
    const size_t w = p.word_tokens.size();
    const size_t s = p.sentences.size();
    if (s > 0) {
      sentence_len += static_cast<double>(w) / static_cast<double>(s);
      ++t.sentence_posts;
    }
    const auto fre =
        features::FleschReadingEase(w, s, features::TotalSyllables(p));
    const auto ttr = features::LexicalDiversity(p);
    if (fre && ttr) {
      readability += *fre;
      diversity += *ttr;
      ++t.readable_posts;
    }
  }
  t.hashtags = Mean(hashtags, t.posts);
  t.mentions = Mean(mentions, t.posts);
  t.urls = Mean(urls, t.posts);
  t.emojis = Mean(emojis, t.posts);
  t.text_length = Mean(words, t.posts);
  t.punctuation = Mean(punctuation, t.posts);
  t.readability = Mean(readability, t.readable_posts);
  t.lexical_diversity = Mean(diversity, t.readable_posts);
  t.avg_sentence_length = Mean(sentence_len, t.sentence_posts);
  return t;
}

std::string_view SentimentName(Sentiment s) {
  switch (s) {
    case Sentiment::kNegative:
      return "negative";
    case Sentiment::kNeutral:
      return "neutral";
    case Sentiment::kPositive:
      return "positive";
  }
  return "neutral";
}

Sentiment ParseSentiment(std::string_view name) {
  const std::string lower = Lower(name);
  for (Sentiment s : kSentiments) {
    if (SentimentName(s) == lower) return s;
  }
  throw DataError("unknown sentiment label '" + std::string(name) + "'");
}

std::string_view SentimentSourceName(SentimentSource s) {
  return s == SentimentSource::kImported ? "imported" : "lexicon_fallback";
}

SentimentLabels ReadSentimentLabels(std::istream& in, std::string_view source) {
  const csv::Table table = csv::Read(in, source);
  const auto& h = table.header;
  auto id_col = std::find(h.begin(), h.end(), "post_id");
  auto label_col = std::find(h.begin(), h.end(), "label");
  if (id_col == h.end() || label_col == h.end()) {
    throw DataError(std::string(source) +
                    ": sentiment CSV needs post_id and label columns");
  }
  const size_t ic = static_cast<size_t>(id_col - h.begin());
  const size_t lc = static_cast<size_t>(label_col - h.begin());
  SentimentLabels out;
  out.source = SentimentSource::kImported;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where =
        std::string(source) + " line " + std::to_string(table.lines[r]);
    Sentiment s;
    try {
      s = ParseSentiment(row[lc]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!out.labels.emplace(row[ic], s).second) {
      throw DataError(where + ": duplicate post_id '" + row[ic] + "'");
    }
  }
  return out;
}

SentimentLabels LoadSentimentLabels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadSentimentLabels(in, path.string());
}

Sentiment LexiconSentiment(const corpus::TokenizedPost& tokenized) {
  const auto& lexicon = SentimentLexicon();
  int score = 0;
  for (const auto& word : tokenized.word_tokens) {
    auto it = lexicon.find(word);
    if (it != lexicon.end()) score += it->second;
  }
  if (score > 0) return Sentiment::kPositive;
  if (score < 0) return Sentiment::kNegative;
  return Sentiment::kNeutral;
}

SentimentLabels LexiconLabels(std::span<const corpus::TokenizedPost> posts) {
  SentimentLabels out;
  out.source = SentimentSource::kLexiconFallback;
  for (const auto& p : posts) out.labels[p.post_id] = LexiconSentiment(p);
  return out;
}

std::array<double, 3> SentimentDistribution(const SentimentLabels& labels,
                                            const corpus::Corpus& corpus) {
  if (corpus.empty()) throw DataError("sentiment distribution of empty corpus");
  std::array<size_t, 3> counts{};
  for (const auto& p : corpus.posts()) {
    ++counts[static_cast<size_t>(LabelOf(labels, p.id, "corpus"))];
  }
  std::array<double, 3> out{};
  for (size_t c = 0; c < 3; ++c) {
    out[c] =
        static_cast<double>(counts[c]) / static_cast<double>(corpus.size());
  }
  return out;
}

Preservation SentimentPreservation(const corpus::AlignedCorpus& aligned,
                                   const SentimentLabels& real_labels,
                                   const SentimentLabels& synth_labels) {
  Preservation p;
  p.pairs = aligned.pairs.size();
  for (const auto& [real, synth] : aligned.pairs) {
    const auto r = static_cast<size_t>(LabelOf(real_labels, real.id, "real"));
    const auto s =
        static_cast<size_t>(LabelOf(synth_labels, synth.id, "synthetic"));
    ++p.support[r];
    if (r == s) ++p.preserved[r];
  }
  for (size_t c = 0; c < 3; ++c) {
    if (p.support[c] > 0) {
      p.percent[c] = 100.0 * static_cast<double>(p.preserved[c]) /
                     static_cast<double>(p.support[c]);
    }
  }
  return p;
}

TopicSet ExtractTopics(std::span<const corpus::TokenizedPost> posts,
                       const embedding::PointSet& embeddings,
                       size_t min_topic_size, uint64_t seed, int threads) {
  const size_t n = posts.size();
  if (min_topic_size == 0) throw InvalidArgument("min_topic_size must be >= 1");
  if (embeddings.size() != n) {
    throw InvalidArgument("one embedding per post is required");
  }
  if (n < 2 * min_topic_size) {
    throw InvalidArgument("topic extraction needs at least " +
                          std::to_string(2 * min_topic_size) + " posts, got " +
                          std::to_string(n));
  }
  const size_t k = std::clamp<size_t>(n / (4 * min_topic_size), 2, 50);
  const auto clustering = embedding::KMeans(
      embeddings, k, seed, {.max_iter = 300, .threads = threads});

  std::vector<std::vector<size_t>> members(k);
  for (size_t i = 0; i < n; ++i)
    members[clustering.assignments[i]].push_back(i);
  std::vector<std::vector<double>> centroids(k);
  for (size_t c = 0; c < k; ++c) {
    const auto row = clustering.centroids.row(c);
    centroids[c].assign(row.begin(), row.end());
  }
  std::vector<bool> active(k, true);
  auto recompute = [&](size_t c) {
    std::vector<double> mean(embeddings.dim, 0.0);
    for (size_t i : members[c]) {
      const auto row = embeddings.row(i);
      for (size_t d = 0; d < mean.size(); ++d) mean[d] += row[d];
    }
    for (double& v : mean) v /= static_cast<double>(members[c].size());
    centroids[c] = std::move(mean);
  };
  while (true) {
    std::optional<size_t> smallest;
    size_t active_count = 0;
    for (size_t c = 0; c < k; ++c) {
      if (!active[c]) continue;
      ++active_count;
      if (members[c].size() < min_topic_size &&
          (!smallest || members[c].size() < members[*smallest].size())) {
        smallest = c;
      }
    }
    if (!smallest || active_count < 2) break;
    const size_t from = *smallest;
    std::optional<size_t> target;
    double best = 0.0;
    for (size_t c = 0; c < k; ++c) {
      if (!active[c] || c == from) continue;
      const double d =
          embedding::SquaredDistance(centroids[from], centroids[c]);
      if (!target || d < best) {
        target = c;
        best = d;
      }
    }
    auto& dst = members[*target];
    dst.insert(dst.end(), members[from].begin(), members[from].end());
    std::sort(dst.begin(), dst.end());
    members[from].clear();
    active[from] = false;
    recompute(*target);
  }

  std::vector<size_t> kept;
  for (size_t c = 0; c < k; ++c) {
    if (active[c] && !members[c].empty()) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [&](size_t a, size_t b) {
    if (members[a].size() != members[b].size()) {
      return members[a].size() > members[b].size();
    }
    return members[a].front() < members[b].front();
  });

  std::vector<std::map<std::string, size_t>> term_counts;
  for (size_t c : kept) {
    std::map<std::string, size_t> counts;
    for (size_t i : members[c]) {
      for (auto& term : features::TfidfTerms(posts[i], 1)) ++counts[term];
    }
    term_counts.push_back(std::move(counts));
  }
  TopicSet set;
  for (size_t t = 0; t < kept.size(); ++t) {
    Topic topic;
    topic.id = static_cast<int>(t);
    topic.vector = centroids[kept[t]];
    topic.size = members[kept[t]].size();
    if (!term_counts[t].empty()) topic.keywords = Keywords(term_counts, t);
    set.topics.push_back(std::move(topic));
  }
  set.degenerate = set.topics.size() < 2;
  return set;
}

TopicSet ReadTopicSet(std::istream& in, std::string_view source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
  TopicSet set;
  set.imported = true;
  try {
    size_t dim = 0;
    for (const auto& jt : j.at("topics")) {
      Topic t;
      t.id = jt.at("id").get<int>();
      t.vector = jt.at("vector").get<std::vector<double>>();
      if (jt.contains("keywords")) {
        t.keywords = jt.at("keywords").get<std::vector<std::string>>();
      }
      if (jt.contains("size")) t.size = jt.at("size").get<size_t>();
      if (t.vector.empty()) {
        throw DataError(std::string(source) + ": topic " +
                        std::to_string(t.id) + " has an empty vector");
      }
      if (dim == 0) dim = t.vector.size();
      if (t.vector.size() != dim) {
        throw DataError(std::string(source) + ": topic " +
                        std::to_string(t.id) + " has dimension " +
                        std::to_string(t.vector.size()) + ", expected " +
                        std::to_string(dim));
      }
      for (double v : t.vector) {
        if (!std::isfinite(v)) {
          throw DataError(std::string(source) + ": non-finite topic vector");
        }
      }
      set.topics.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string(source) +
                    ": malformed topic file: " + e.what());
  }
  set.degenerate = set.topics.size() < 2;
  return set;
}

TopicSet LoadTopicSet(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadTopicSet(in, path.string());
}

nlohmann::ordered_json ToJson(const TopicSet& topics) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : topics.topics) {
    arr.push_back({{"id", t.id},
                   {"vector", t.vector},
                   {"keywords", t.keywords},
                   {"size", t.size}});
  }
  nlohmann::ordered_json j;
  j["topics"] = std::move(arr);
  return j;
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("cosine of vectors with different dimensions");
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Matrix TopicCosineMatrix(const TopicSet& real, const TopicSet& synth) {
  Matrix m;
  m.rows = real.topics.size();
  m.cols = synth.topics.size();
  m.values.reserve(m.rows * m.cols);
  for (const auto& r : real.topics) {
    for (const auto& s : synth.topics) {
      if (r.vector.size() != s.vector.size()) {
        throw InvalidArgument("topic vectors differ in dimension (" +
                              std::to_string(r.vector.size()) + " vs " +
                              std::to_string(s.vector.size()) + ")");
      }
      m.values.push_back(Cosine(r.vector, s.vector));
    }
  }
  return m;
}

TopicMatchReport GreedyMatch(const Matrix& similarity, double threshold) {
  if (similarity.values.size() != similarity.rows * similarity.cols) {
    throw InvalidArgument("similarity matrix shape mismatch");
  }
  struct Entry {
    double value;
    size_t row;
    size_t col;
  };
  std::vector<Entry> candidates;
  for (size_t i = 0; i < similarity.rows; ++i) {
    for (size_t j = 0; j < similarity.cols; ++j) {
      const double v = similarity.at(i, j);
      if (!std::isfinite(v)) throw InvalidArgument("non-finite similarity");
      if (v >= threshold) candidates.push_back({v, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Entry& a, const Entry& b) {
              if (a.value != b.value) return a.value > b.value;
              if (a.row != b.row) return a.row < b.row;
              return a.col < b.col;
            });
  TopicMatchReport report;
  report.threshold = threshold;
  std::vector<bool> row_used(similarity.rows), col_used(similarity.cols);
  for (const auto& e : candidates) {
    if (row_used[e.row] || col_used[e.col]) continue;
    row_used[e.row] = col_used[e.col] = true;
    report.pairs.push_back({e.row, e.col, e.value});
  }
  report.shared = report.pairs.size();
  report.unique_real = similarity.rows - report.shared;
  report.unique_synth = similarity.cols - report.shared;
  return report;
}

std::optional<double> MeanPairwiseDistance(
    const embedding::PointSet& centroids) {
  const size_t k = centroids.size();
  if (k < 2) return std::nullopt;
  double sum = 0.0;
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      sum += std::sqrt(
          embedding::SquaredDistance(centroids.row(a), centroids.row(b)));
    }
  }
  return sum / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

CentroidAnalysis AnalyzeCentroids(const embedding::PointSet& points,
                                  std::span<const std::string> post_ids,
                                  size_t k, uint64_t seed, int threads) {
  if (post_ids.size() != points.size()) {
    throw InvalidArgument("one post id per point is required");
  }
  if (points.size() < k) {
    throw InvalidArgument("centroid analysis with k=" + std::to_string(k) +
                          " needs at least that many posts, got " +
                          std::to_string(points.size()));
  }
  const auto order = SortedByIdOrder(post_ids);
  CentroidAnalysis out;
  out.clustering = embedding::KMeans(Gather(points, order), k, seed,
                                     {.max_iter = 300, .threads = threads});
  std::vector<size_t> assignments(points.size());
  for (size_t r = 0; r < order.size(); ++r) {
    assignments[order[r]] = out.clustering.assignments[r];
  }
  out.clustering.assignments = std::move(assignments);
  out.d_global = MeanPairwiseDistance(out.clustering.centroids);
  return out;
}

std::string_view IntraModeName(IntraMode mode) {
  return mode == IntraMode::kPerWriter ? "per_writer" : "shared";
}

IntraMode ParseIntraMode(std::string_view name) {
  if (name == "per_writer") return IntraMode::kPerWriter;
  if (name == "shared") return IntraMode::kShared;
  throw ConfigError("unknown centroid mode '" + std::string(name) +
                    "' (expected per_writer or shared)");
}

CentroidReport PersonaDelta(const embedding::PointSet& points,
                            std::span<const std::string> post_ids,
                            std::span<const std::string> writer_of, size_t k,
                            uint64_t seed, IntraMode mode, int threads) {
  if (writer_of.size() != points.size()) {
    throw InvalidArgument("one writer per point is required");
  }
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < writer_of.size(); ++i)
    groups[writer_of[i]].push_back(i);
  for (auto& [writer, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(), [&](size_t a, size_t b) {
      return post_ids[a] < post_ids[b];
    });
    if (rows.size() < 2) {
      throw InvalidArgument("writer '" + writer + "' has fewer than two posts");
    }
  }
  const auto global = AnalyzeCentroids(points, post_ids, k, seed, threads);
  CentroidReport report;
  report.k = k;
  report.mode = mode;
  report.d_global = global.d_global;
  const double n = static_cast<double>(points.size());
  for (const auto& [writer, rows] : groups) {
    WriterDelta w;
    w.writer = writer;
    w.posts = rows.size();
    if (mode == IntraMode::kPerWriter) {
      const double share = static_cast<double>(rows.size()) / n;
      const auto scaled = static_cast<size_t>(
          std::floor(static_cast<double>(k) * share + 1e-9));
      const size_t kw = std::min(std::max<size_t>(2, scaled), rows.size());
      std::vector<std::string> ids;
      for (size_t r : rows) ids.push_back(post_ids[r]);
      const auto local =
          AnalyzeCentroids(Gather(points, rows), ids, kw, seed, threads);
      w.centroids = kw;
      w.d_intra = local.d_global;
    } else {
      std::map<size_t, std::pair<std::vector<double>, size_t>> sums;
      for (size_t r : rows) {
        auto& [sum, count] = sums[global.clustering.assignments[r]];
        sum.resize(points.dim, 0.0);
        const auto row = points.row(r);
        for (size_t d = 0; d < points.dim; ++d) sum[d] += row[d];
        ++count;
      }
      embedding::PointSet centroids;
      centroids.dim = points.dim;
      for (auto& [cluster, entry] : sums) {
        for (double& v : entry.first) v /= static_cast<double>(entry.second);
        centroids.Append(entry.first);
      }
      w.centroids = centroids.size();
      w.d_intra = MeanPairwiseDistance(centroids);
    }
    if (w.d_intra && report.d_global) w.delta = *w.d_intra - *report.d_global;
    report.writers.push_back(std::move(w));
  }
  return report;
}

}  // namespace synthaudit::fidelity
