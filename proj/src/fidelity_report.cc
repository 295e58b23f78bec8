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

#include <exception>
#include <string>
#include <utility>

#include "synthaudit/errors.h"
#include "synthaudit/fidelity.h"
#include "synthaudit/rng.h"

namespace synthaudit::fidelity {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Sub-seed offsets for the stochastic sections.
constexpr uint64_t kRealTopicSeed = 1;
constexpr uint64_t kSynthTopicSeed = 2;
constexpr uint64_t kCentroidSeed = 3;

bool Covers(const SentimentLabels& labels, const corpus::Corpus& corpus) {
  for (const auto& post : corpus.posts()) {
    if (!labels.labels.contains(post.id)) return false;
  }
  return true;
}

SentimentSection ComputeSentiment(
    const FidelityInputs& in,
    const std::vector<corpus::TokenizedPost>& real_tokens,
    const std::vector<corpus::TokenizedPost>& synth_tokens,
    std::vector<std::string>& warnings) {
  SentimentLabels real_labels, synth_labels;
  if (in.sentiment != nullptr && Covers(*in.sentiment, *in.real) &&
      Covers(*in.sentiment, *in.synth)) {
    real_labels = synth_labels = *in.sentiment;
  } else {
    if (in.sentiment != nullptr) {
      warnings.push_back(
          "imported sentiment labels do not cover every post; using the "
          "lexicon for both corpora");
    }
    real_labels = LexiconLabels(real_tokens);
    synth_labels = LexiconLabels(synth_tokens);
  }
  SentimentSection s;
  s.source = real_labels.source;
  s.real = SentimentDistribution(real_labels, *in.real);
  s.synth = SentimentDistribution(synth_labels, *in.synth);
  s.preservation = SentimentPreservation(corpus::Align(*in.real, *in.synth),
                                         real_labels, synth_labels);
  if (s.preservation.pairs == 0) {
    warnings.push_back(
        "no synthetic post names a real source; preservation "
        "is undefined");
  }
  return s;
}

std::vector<std::vector<std::string>> Keywords(const TopicSet& set) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : set.topics) out.push_back(t.keywords);
  return out;
}

TopicSection ComputeTopics(
    const FidelityInputs& in, const FidelityOptions& options,
    const std::vector<corpus::TokenizedPost>& real_tokens,
    const std::vector<corpus::TokenizedPost>& synth_tokens) {
  TopicSet real, synth;
  if (in.real_topics != nullptr && in.synth_topics != nullptr) {
    real = *in.real_topics;
    synth = *in.synth_topics;
  } else {
    real = ExtractTopics(real_tokens,
                         embedding::ToPointSet(embedding::EmbedAll(
                             real_tokens, *in.embeddings, options.threads)),
                         options.min_topic_size,
                         DeriveSeed(options.seed, kRealTopicSeed),
                         options.threads);
    synth = ExtractTopics(synth_tokens,
                          embedding::ToPointSet(embedding::EmbedAll(
                              synth_tokens, *in.embeddings, options.threads)),
                          options.min_topic_size,
                          DeriveSeed(options.seed, kSynthTopicSeed),
                          options.threads);
  }
  TopicSection t;
  t.imported = real.imported && synth.imported;
  t.real_topics = real.topics.size();
  t.synth_topics = synth.topics.size();
  t.real_degenerate = real.degenerate;
  t.synth_degenerate = synth.degenerate;
  t.real_keywords = Keywords(real);
  t.synth_keywords = Keywords(synth);
  t.match =
      GreedyMatch(TopicCosineMatrix(real, synth), options.topic_threshold);
  return t;
}

CentroidReport ComputeCentroids(
    const FidelityInputs& in, const FidelityOptions& options,
    const std::vector<corpus::TokenizedPost>& synth_tokens) {
  const auto points = embedding::ToPointSet(
      embedding::EmbedAll(synth_tokens, *in.embeddings, options.threads));
  std::vector<std::string> ids;
  for (const auto& post : in.synth->posts()) ids.push_back(post.id);
  const uint64_t seed = DeriveSeed(options.seed, kCentroidSeed);
  if (!in.writer_of.empty()) {
    return PersonaDelta(points, ids, in.writer_of, options.centroid_k, seed,
                        options.intra_mode, options.threads);
  }
  CentroidReport r;
  r.k = options.centroid_k;
  r.mode = options.intra_mode;
  r.d_global =
      AnalyzeCentroids(points, ids, options.centroid_k, seed, options.threads)
          .d_global;
  return r;
}

// Runs one section, turning data problems into a warning.
template <typename Fn>
void Section(const char* name, FidelityReport& report, Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    report.warnings.push_back(std::string(name) + " not computed: " + e.what());
    report.partial = true;
  } catch (const InvalidArgument& e) {
    report.warnings.push_back(std::string(name) + " not computed: " + e.what());
    report.partial = true;
  }
}

ordered_json Opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> OptFrom(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ordered_json TraitsJson(const TraitsSummary& t) {
  return {{"posts", t.posts},
          {"hashtags", t.hashtags},
          {"mentions", t.mentions},
          {"urls", t.urls},
          {"emojis", t.emojis},
          {"text_length", t.text_length},
          {"punctuation", t.punctuation},
          {"readability", t.readability},
          {"lexical_diversity", t.lexical_diversity},
          {"readable_posts", t.readable_posts},
          {"avg_sentence_length", t.avg_sentence_length},
          {"sentence_posts", t.sentence_posts}};
}

TraitsSummary TraitsFrom(const json& j) {
  TraitsSummary t;
  t.posts = j.at("posts").get<size_t>();
  t.hashtags = j.at("hashtags").get<double>();
  t.mentions = j.at("mentions").get<double>();
  t.urls = j.at("urls").get<double>();
  t.emojis = j.at("emojis").get<double>();
  t.text_length = j.at("text_length").get<double>();
  t.punctuation = j.at("punctuation").get<double>();
  t.readability = j.at("readability").get<double>();
  t.lexical_diversity = j.at("lexical_diversity").get<double>();
  t.readable_posts = j.at("readable_posts").get<size_t>();
  t.avg_sentence_length = j.at("avg_sentence_length").get<double>();
  t.sentence_posts = j.at("sentence_posts").get<size_t>();
  return t;
}

ordered_json Distribution(const std::array<double, 3>& d) {
  ordered_json j;
  for (Sentiment s : kSentiments) {
    j[std::string(SentimentName(s))] = d[static_cast<size_t>(s)];
  }
  return j;
}

std::array<double, 3> DistributionFrom(const json& j) {
  std::array<double, 3> d{};
  for (Sentiment s : kSentiments) {
    d[static_cast<size_t>(s)] =
        j.at(std::string(SentimentName(s))).get<double>();
  }
  return d;
}

template <typename T>
std::optional<T> Maybe(const json& j, const char* key, T (*read)(const json&)) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read(j.at(key));
}

SentimentSection SentimentFrom(const json& j) {
  SentimentSection s;
  s.source = j.at("source").get<std::string>() == "imported"
                 ? SentimentSource::kImported
                 : SentimentSource::kLexiconFallback;
  s.real = DistributionFrom(j.at("real"));
  s.synth = DistributionFrom(j.at("synthetic"));
  const json& p = j.at("preservation");
  s.preservation.pairs = p.at("pairs").get<size_t>();
  for (Sentiment c : kSentiments) {
    const auto i = static_cast<size_t>(c);
    const json& cat = p.at("categories").at(std::string(SentimentName(c)));
    s.preservation.support[i] = cat.at("support").get<size_t>();
    s.preservation.preserved[i] = cat.at("preserved").get<size_t>();
    s.preservation.percent[i] = OptFrom(cat.at("percent"));
  }
  return s;
}

TopicSection TopicsFrom(const json& j) {
  TopicSection t;
  t.imported = j.at("imported").get<bool>();
  t.real_topics = j.at("real_topics").get<size_t>();
  t.synth_topics = j.at("synthetic_topics").get<size_t>();
  t.real_degenerate = j.at("real_degenerate").get<bool>();
  t.synth_degenerate = j.at("synthetic_degenerate").get<bool>();
  t.real_keywords =
      j.at("real_keywords").get<std::vector<std::vector<std::string>>>();
  t.synth_keywords =
      j.at("synthetic_keywords").get<std::vector<std::vector<std::string>>>();
  t.match.threshold = j.at("threshold").get<double>();
  t.match.shared = j.at("shared").get<size_t>();
  t.match.unique_real = j.at("unique_real").get<size_t>();
  t.match.unique_synth = j.at("unique_synthetic").get<size_t>();
  for (const auto& p : j.at("pairs")) {
    t.match.pairs.push_back({p.at("real").get<size_t>(),
                             p.at("synthetic").get<size_t>(),
                             p.at("similarity").get<double>()});
  }
  return t;
}

CentroidReport CentroidsFrom(const json& j) {
  CentroidReport c;
  c.k = j.at("k").get<size_t>();
  c.mode = ParseIntraMode(j.at("mode").get<std::string>());
  c.d_global = OptFrom(j.at("d_global"));
  for (const auto& w : j.at("writers")) {
    c.writers.push_back({w.at("writer").get<std::string>(),
                         w.at("posts").get<size_t>(),
                         w.at("centroids").get<size_t>(),
                         OptFrom(w.at("d_intra")), OptFrom(w.at("delta"))});
  }
  return c;
}

}  // namespace

FidelityReport RunFidelity(const FidelityInputs& in,
                           const FidelityOptions& options) {
  if (in.real == nullptr || in.synth == nullptr) {
    throw InvalidArgument("fidelity needs a real and a synthetic corpus");
  }
  if (!in.writer_of.empty() && in.writer_of.size() != in.synth->size()) {
    throw InvalidArgument(
        "writer_of must name a writer for every synthetic post");
  }
  if ((in.real_topics == nullptr) != (in.synth_topics == nullptr)) {
    throw ConfigError("imported topics must be given for both corpora");
  }
  FidelityReport report;
  report.corpus_label = in.synth->label();
  const auto real_tokens = corpus::TokenizeAll(*in.real, options.threads);
  const auto synth_tokens = corpus::TokenizeAll(*in.synth, options.threads);

  Section("traits", report, [&] {
    report.real_traits = ComputeTraits(real_tokens);
    report.synth_traits = ComputeTraits(synth_tokens);
  });
  Section("sentiment", report, [&] {
    report.sentiment =
        ComputeSentiment(in, real_tokens, synth_tokens, report.warnings);
  });
  const bool have_topics = in.real_topics != nullptr;
  if (have_topics || in.embeddings != nullptr) {
    Section("topics", report, [&] {
      report.topics = ComputeTopics(in, options, real_tokens, synth_tokens);
    });
  } else {
    report.warnings.push_back(
        "topics not computed: no embedding table or imported topics");
    report.partial = true;
  }
  if (in.embeddings != nullptr) {
    Section("centroids", report, [&] {
      report.centroids = ComputeCentroids(in, options, synth_tokens);
    });
  } else {
    report.warnings.push_back("centroids not computed: no embedding table");
    report.partial = true;
  }
  return report;
}

ordered_json ToJson(const FidelityReport& r) {
  ordered_json j;
  j["corpus"] = r.corpus_label;
  ordered_json traits = nullptr;
  if (r.real_traits && r.synth_traits) {
    traits = {{"real", TraitsJson(*r.real_traits)},
              {"synthetic", TraitsJson(*r.synth_traits)}};
  }
  j["traits"] = std::move(traits);

  ordered_json sentiment = nullptr;
  if (r.sentiment) {
    const auto& s = *r.sentiment;
    ordered_json categories;
    for (Sentiment c : kSentiments) {
      const auto i = static_cast<size_t>(c);
      categories[std::string(SentimentName(c))] = {
          {"support", s.preservation.support[i]},
          {"preserved", s.preservation.preserved[i]},
          {"percent", Opt(s.preservation.percent[i])}};
    }
    sentiment = {{"source", SentimentSourceName(s.source)},
                 {"real", Distribution(s.real)},
                 {"synthetic", Distribution(s.synth)},
                 {"preservation",
                  {{"pairs", s.preservation.pairs},
                   {"categories", std::move(categories)}}}};
  }
  j["sentiment"] = std::move(sentiment);

  ordered_json topics = nullptr;
  if (r.topics) {
    const auto& t = *r.topics;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : t.match.pairs) {
      pairs.push_back({{"real", p.real},
                       {"synthetic", p.synth},
                       {"similarity", p.similarity}});
    }
    topics = {{"imported", t.imported},
              {"threshold", t.match.threshold},
              {"real_topics", t.real_topics},
              {"synthetic_topics", t.synth_topics},
              {"real_degenerate", t.real_degenerate},
              {"synthetic_degenerate", t.synth_degenerate},
              {"shared", t.match.shared},
              {"unique_real", t.match.unique_real},
              {"unique_synthetic", t.match.unique_synth},
              {"pairs", std::move(pairs)},
              {"real_keywords", t.real_keywords},
              {"synthetic_keywords", t.synth_keywords}};
  }
  j["topics"] = std::move(topics);

  ordered_json centroids = nullptr;
  if (r.centroids) {
    const auto& c = *r.centroids;
    ordered_json writers = ordered_json::array();
    for (const auto& w : c.writers) {
      writers.push_back({{"writer", w.writer},
                         {"posts", w.posts},
                         {"centroids", w.centroids},
                         {"d_intra", Opt(w.d_intra)},
                         {"delta", Opt(w.delta)}});
    }
    centroids = {{"k", c.k},
                 {"mode", IntraModeName(c.mode)},
                 {"d_global", Opt(c.d_global)},
                 {"writers", std::move(writers)}};
  }
  j["centroids"] = std::move(centroids);
  j["warnings"] = r.warnings;
  j["partial"] = r.partial;
  return j;
}

FidelityReport FidelityReportFromJson(const json& j) {
  try {
    FidelityReport r;
    r.corpus_label = j.at("corpus").get<std::string>();
    if (!j.at("traits").is_null()) {
      r.real_traits = TraitsFrom(j.at("traits").at("real"));
      r.synth_traits = TraitsFrom(j.at("traits").at("synthetic"));
    }
    r.sentiment = Maybe<SentimentSection>(j, "sentiment", &SentimentFrom);
    r.topics = Maybe<TopicSection>(j, "topics", &TopicsFrom);
    r.centroids = Maybe<CentroidReport>(j, "centroids", &CentroidsFrom);
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.partial = j.at("partial").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed fidelity report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed fidelity report: ") + e.what());
  }
}

}  // namespace synthaudit::fidelity
