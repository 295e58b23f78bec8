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

#include "synthaudit/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include "synthaudit/csv.h"
#include "synthaudit/embedding.h"
#include "synthaudit/errors.h"
#include "synthaudit/genharness.h"
#include "synthaudit/rng.h"

namespace synthaudit::report {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void CheckKeys(const json& j, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, const std::string& where, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_unsigned()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw ConfigError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + where + "." + key +
                      "' has the wrong type");
  }
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::optional<fs::path> OptionalPath(const json& j, const char* key) {
  std::string value;
  Read(j, key, "config", value);
  if (value.empty()) return std::nullopt;
  return fs::path(value);
}

void CheckExists(const AuditConfig& c, const fs::path& p,
                 const std::string& key) {
  if (!fs::is_regular_file(c.Resolve(p))) {
    throw ConfigError(key + ": file not found: " + c.Resolve(p).string());
  }
}

ordered_json PathOrNull(const std::optional<fs::path>& p) {
  return p ? ordered_json(p->generic_string()) : ordered_json(nullptr);
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s = buf;
  // Avoid "-0.00" for values that round to zero.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string Cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

std::string Row(std::initializer_list<std::string> cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

constexpr std::string_view kNotComputed = "_not computed_\n";

std::string OptFixed(const std::optional<double>& v, int digits) {
  return v ? Fixed(*v, digits) : "n/a";
}

void RenderSampling(const AuditReport& r, std::string& md) {
  md += "## Sampling plan\n\n";
  if (!r.sampling) {
    md += kNotComputed;
    return;
  }
  const auto& p = *r.sampling;
  md += "Cochran size " + std::to_string(p.n) + " of " +
        std::to_string(p.population) + " posts (z = " + Fixed(p.z, 2) +
        ", margin = " + Fixed(p.error_margin, 4) +
        ", total variance = " + Fixed(p.sigma2, 4) + "); " +
        std::to_string(p.allocated) + " allocated.\n\n";
  md += Row({"Author", "Posts", "Sigma", "Share", "Allocated"});
  md += "|---|---:|---:|---:|---:|\n";
  for (const auto& s : p.strata) {
    md += Row({Cell(s.author), std::to_string(s.size), Fixed(s.sigma, 4),
               Fixed(s.raw_share, 2), std::to_string(s.allocated)});
  }
}

void RenderAttack(const AuditReport& r, std::string& md) {
  md += "## Attribution on real data\n\n";
  if (!r.attack) {
    md += kNotComputed;
    md += "\n## Attribution on synthetic data\n\n";
    md += kNotComputed;
    return;
  }
  md += Row({"Subset", "Authors", "Test posts", "Model", "Accuracy (%)",
             "Macro-F1 (%)"});
  md += "|---|---:|---:|---|---:|---:|\n";
  for (const auto& s : r.attack->subsets) {
    for (const auto& m : s.models) {
      md += Row({FormatPercent(s.fraction) + "%", std::to_string(s.authors),
                 std::to_string(s.test_posts), Cell(m.model),
                 FormatPercent(m.accuracy), FormatPercent(m.macro_f1)});
    }
  }
  md += "\n## Attribution on synthetic data\n\n";
  if (r.attack->synthetic.empty()) {
    md += kNotComputed;
    return;
  }
  md += Row({"Corpus", "Model", "Posts", "Accuracy (%)", "Macro-F1 (%)",
             "Real accuracy (%)", "Reduction (%)"});
  md += "|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto& s : r.attack->synthetic) {
    md += Row({Cell(s.corpus_label), Cell(s.model), std::to_string(s.posts),
               FormatPercent(s.accuracy), FormatPercent(s.macro_f1),
               FormatPercent(s.baseline_accuracy),
               s.relative_reduction ? Fixed(*s.relative_reduction, 2) : "n/a"});
  }
}

void RenderTraits(const fidelity::FidelityReport& f, std::string& md) {
  md += "### Traits\n\n";
  if (!f.real_traits || !f.synth_traits) {
    md += kNotComputed;
    return;
  }
  const auto& a = *f.real_traits;
  const auto& b = *f.synth_traits;
  md += Row({"Trait", "Real", "Synthetic"});
  md += "|---|---:|---:|\n";
  const std::pair<const char*, std::pair<double, double>> rows[] = {
      {"Hashtags", {a.hashtags, b.hashtags}},
      {"Mentions", {a.mentions, b.mentions}},
      {"URLs", {a.urls, b.urls}},
      {"Emojis", {a.emojis, b.emojis}},
      {"Text length (words)", {a.text_length, b.text_length}},
      {"Readability (Flesch)", {a.readability, b.readability}},
      {"Lexical diversity", {a.lexical_diversity, b.lexical_diversity}},
      {"Avg sentence length", {a.avg_sentence_length, b.avg_sentence_length}},
      {"Punctuation", {a.punctuation, b.punctuation}}};
  for (const auto& [name, values] : rows) {
    md += Row({name, Fixed(values.first, 4), Fixed(values.second, 4)});
  }
}

void RenderSentiment(const fidelity::FidelityReport& f, std::string& md) {
  if (!f.sentiment) {
    md += "### Sentiment\n\n";
    md += kNotComputed;
    return;
  }
  const auto& s = *f.sentiment;
  md += "### Sentiment (" +
        std::string(fidelity::SentimentSourceName(s.source)) + ")\n\n";
  md +=
      Row({"Sentiment", "Real (%)", "Synthetic (%)", "Pairs", "Preserved (%)"});
  md += "|---|---:|---:|---:|---:|\n";
  for (auto c : fidelity::kSentiments) {
    const auto i = static_cast<size_t>(c);
    const auto& pct = s.preservation.percent[i];
    md += Row({std::string(fidelity::SentimentName(c)),
               FormatPercent(s.real[i]), FormatPercent(s.synth[i]),
               std::to_string(s.preservation.support[i]),
               pct ? Fixed(*pct, 2) : "n/a"});
  }
}

// "3 (pasta, recipe, oven)" with up to three keywords.
std::string TopicLabel(const std::vector<std::vector<std::string>>& keywords,
                       size_t topic) {
  std::string out = std::to_string(topic);
  if (topic >= keywords.size() || keywords[topic].empty()) return out;
  out += " (";
  for (size_t i = 0; i < std::min<size_t>(3, keywords[topic].size()); ++i) {
    if (i > 0) out += ", ";
    out += keywords[topic][i];
  }
  return Cell(out + ")");
}

void RenderTopics(const fidelity::FidelityReport& f, std::string& md) {
  if (!f.topics) {
    md += "### Topics\n\n";
    md += kNotComputed;
    return;
  }
  const auto& t = *f.topics;
  md += "### Topics (" + std::string(t.imported ? "imported" : "built-in") +
        ", threshold " + Fixed(t.match.threshold, 2) + ")\n\n";
  md += Row({"Real topics", "Synthetic topics", "Shared", "Unique real",
             "Unique synthetic"});
  md += "|---:|---:|---:|---:|---:|\n";
  md +=
      Row({std::to_string(t.real_topics), std::to_string(t.synth_topics),
           std::to_string(t.match.shared), std::to_string(t.match.unique_real),
           std::to_string(t.match.unique_synth)});
  if (t.match.pairs.empty()) return;
  md += "\n";
  md += Row({"Real topic", "Synthetic topic", "Cosine"});
  md += "|---|---|---:|\n";
  for (const auto& p : t.match.pairs) {
    md += Row({TopicLabel(t.real_keywords, p.real),
               TopicLabel(t.synth_keywords, p.synth), Fixed(p.similarity, 4)});
  }
}

void RenderCentroids(const fidelity::FidelityReport& f, std::string& md) {
  if (!f.centroids) {
    md += "### Centroids\n\n";
    md += kNotComputed;
    return;
  }
  const auto& c = *f.centroids;
  md += "### Centroids (k = " + std::to_string(c.k) + ", " +
        std::string(fidelity::IntraModeName(c.mode)) + ")\n\n";
  md += "Global mean centroid distance: " + OptFixed(c.d_global, 4) + "\n";
  if (c.writers.empty()) return;
  md += "\n";
  md += Row({"Writer", "Posts", "Centroids", "d_intra", "Delta"});
  md += "|---|---:|---:|---:|---:|\n";
  for (const auto& w : c.writers) {
    md += Row({Cell(w.writer), std::to_string(w.posts),
               std::to_string(w.centroids), OptFixed(w.d_intra, 4),
               w.delta ? FormatSigned4(*w.delta) : "n/a"});
  }
}

ordered_json ToJson(const CorpusSummary& c) {
  return {{"posts", c.posts},
          {"authors", c.authors},
          {"mean_words", c.mean_words},
          {"median_words", c.median_words},
          {"max_words", c.max_words}};
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string Number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

corpus::Corpus Relabel(const corpus::Corpus& c, const std::string& label) {
  return corpus::Corpus(c.posts(), c.kind(), label);
}

}  // namespace

fs::path AuditConfig::Resolve(const fs::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

AuditConfig AuditConfigFromJson(const json& j, const fs::path& base_dir) {
  CheckKeys(j, "config",
            {"seed", "real_corpus", "synthetic", "embeddings",
             "sentiment_labels", "real_topics", "external_predictions",
             "sampling", "attack", "fidelity"});
  AuditConfig c;
  c.base_dir = base_dir;
  Require(j.contains("seed"), "config key 'seed' is required");
  Read(j, "seed", "config", c.seed);
  std::string real;
  Read(j, "real_corpus", "config", real);
  Require(!real.empty(), "config key 'real_corpus' is required");
  c.real_corpus = real;
  c.embeddings = OptionalPath(j, "embeddings");
  c.sentiment_labels = OptionalPath(j, "sentiment_labels");
  c.real_topics = OptionalPath(j, "real_topics");
  c.external_predictions = OptionalPath(j, "external_predictions");

  Require(j.contains("synthetic") && j.at("synthetic").is_array() &&
              !j.at("synthetic").empty(),
          "config key 'synthetic' must list at least one corpus");
  std::set<std::string> labels;
  for (const auto& s : j.at("synthetic")) {
    CheckKeys(s, "config.synthetic[]", {"label", "path", "persona", "topics"});
    SyntheticInput in;
    std::string path, topics;
    Read(s, "label", "synthetic", in.label);
    Read(s, "path", "synthetic", path);
    Read(s, "persona", "synthetic", in.persona);
    Read(s, "topics", "synthetic", topics);
    Require(!in.label.empty(), "every synthetic corpus needs a 'label'");
    Require(!path.empty(),
            "synthetic corpus '" + in.label + "' needs a 'path'");
    Require(labels.insert(in.label).second,
            "duplicate synthetic label '" + in.label + "'");
    in.path = path;
    if (!topics.empty()) in.topics = fs::path(topics);
    c.synthetic.push_back(std::move(in));
  }

  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    CheckKeys(s, "config.sampling", {"enabled", "z", "error_margin"});
    Read(s, "enabled", "sampling", c.sampling.enabled);
    Read(s, "z", "sampling", c.sampling.z);
    Read(s, "error_margin", "sampling", c.sampling.error_margin);
    Require(c.sampling.z > 0, "sampling.z must be > 0");
    Require(c.sampling.error_margin > 0, "sampling.error_margin must be > 0");
  }

  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    CheckKeys(a, "config.attack",
              {"fractions", "models", "test_fraction", "epochs",
               "learning_rate", "lambda", "batch_size", "ngram_top_k",
               "tfidf_max_features", "tfidf_max_ngram", "stack_folds"});
    auto& o = c.attack;
    Read(a, "fractions", "attack", o.fractions);
    std::vector<std::string> models;
    Read(a, "models", "attack", models);
    if (a.contains("models")) {
      o.models.clear();
      for (const auto& m : models)
        o.models.push_back(attack::ParsePredictionSource(m));
    }
    Read(a, "test_fraction", "attack", o.test_fraction);
    Read(a, "epochs", "attack", o.logreg.epochs);
    Read(a, "learning_rate", "attack", o.logreg.learning_rate);
    Read(a, "lambda", "attack", o.logreg.lambda);
    Read(a, "batch_size", "attack", o.logreg.batch_size);
    Read(a, "ngram_top_k", "attack", o.ngram_top_k);
    Read(a, "tfidf_max_features", "attack", o.tfidf.max_features);
    Read(a, "tfidf_max_ngram", "attack", o.tfidf.max_ngram);
    Read(a, "stack_folds", "attack", o.stack_folds);
    Require(!o.fractions.empty(), "attack.fractions must not be empty");
    for (double f : o.fractions) {
      Require(f > 0 && f <= 1, "attack.fractions entries must be in (0, 1]");
    }
    Require(!o.models.empty(), "attack.models must not be empty");
    Require(o.test_fraction > 0 && o.test_fraction < 1,
            "attack.test_fraction must be in (0, 1)");
    Require(o.logreg.epochs >= 0, "attack.epochs must be >= 0");
    Require(o.logreg.learning_rate > 0, "attack.learning_rate must be > 0");
    Require(o.logreg.lambda >= 0, "attack.lambda must be >= 0");
    Require(o.ngram_top_k >= 1, "attack.ngram_top_k must be >= 1");
    Require(o.tfidf.max_features >= 1,
            "attack.tfidf_max_features must be >= 1");
    Require(o.tfidf.max_ngram == 1 || o.tfidf.max_ngram == 2,
            "attack.tfidf_max_ngram must be 1 or 2");
    Require(o.stack_folds >= 2, "attack.stack_folds must be >= 2");
  }

  if (j.contains("fidelity")) {
    const auto& f = j.at("fidelity");
    CheckKeys(
        f, "config.fidelity",
        {"topic_threshold", "min_topic_size", "centroid_k", "intra_mode"});
    auto& o = c.fidelity;
    Read(f, "topic_threshold", "fidelity", o.topic_threshold);
    Read(f, "min_topic_size", "fidelity", o.min_topic_size);
    Read(f, "centroid_k", "fidelity", o.centroid_k);
    std::string mode;
    Read(f, "intra_mode", "fidelity", mode);
    if (!mode.empty()) o.intra_mode = fidelity::ParseIntraMode(mode);
    Require(o.topic_threshold >= -1 && o.topic_threshold <= 1,
            "fidelity.topic_threshold must be in [-1, 1]");
    Require(o.min_topic_size >= 1, "fidelity.min_topic_size must be >= 1");
    Require(o.centroid_k >= 1, "fidelity.centroid_k must be >= 1");
  }

  const bool any_topics =
      std::any_of(c.synthetic.begin(), c.synthetic.end(),
                  [](const SyntheticInput& s) { return s.topics.has_value(); });
  const bool all_topics =
      std::all_of(c.synthetic.begin(), c.synthetic.end(),
                  [](const SyntheticInput& s) { return s.topics.has_value(); });
  Require(!any_topics || (all_topics && c.real_topics),
          "imported topics need 'real_topics' and a 'topics' file for every "
          "synthetic corpus");
  Require(!c.real_topics || all_topics,
          "'real_topics' needs a 'topics' file for every synthetic corpus");
  Require(!c.sampling.enabled || c.embeddings,
          "sampling needs an 'embeddings' table");

  CheckExists(c, c.real_corpus, "real_corpus");
  for (const auto& s : c.synthetic) {
    CheckExists(c, s.path, "synthetic '" + s.label + "'");
    if (s.topics) CheckExists(c, *s.topics, "topics of '" + s.label + "'");
  }
  if (c.embeddings) CheckExists(c, *c.embeddings, "embeddings");
  if (c.sentiment_labels)
    CheckExists(c, *c.sentiment_labels, "sentiment_labels");
  if (c.real_topics) CheckExists(c, *c.real_topics, "real_topics");
  if (c.external_predictions) {
    CheckExists(c, *c.external_predictions, "external_predictions");
  }
  return c;
}

AuditConfig LoadAuditConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return AuditConfigFromJson(j, path.parent_path());
}

ordered_json ToJson(const AuditConfig& c) {
  ordered_json synthetic = ordered_json::array();
  for (const auto& s : c.synthetic) {
    synthetic.push_back({{"label", s.label},
                         {"path", s.path.generic_string()},
                         {"persona", s.persona},
                         {"topics", PathOrNull(s.topics)}});
  }
  std::vector<std::string> models;
  for (auto m : c.attack.models) {
    models.emplace_back(attack::PredictionSourceName(m));
  }
  return {{"seed", c.seed},
          {"real_corpus", c.real_corpus.generic_string()},
          {"synthetic", std::move(synthetic)},
          {"embeddings", PathOrNull(c.embeddings)},
          {"sentiment_labels", PathOrNull(c.sentiment_labels)},
          {"real_topics", PathOrNull(c.real_topics)},
          {"external_predictions", PathOrNull(c.external_predictions)},
          {"sampling",
           {{"enabled", c.sampling.enabled},
            {"z", c.sampling.z},
            {"error_margin", c.sampling.error_margin}}},
          {"attack",
           {{"fractions", c.attack.fractions},
            {"models", models},
            {"test_fraction", c.attack.test_fraction},
            {"epochs", c.attack.logreg.epochs},
            {"learning_rate", c.attack.logreg.learning_rate},
            {"lambda", c.attack.logreg.lambda},
            {"batch_size", c.attack.logreg.batch_size},
            {"ngram_top_k", c.attack.ngram_top_k},
            {"tfidf_max_features", c.attack.tfidf.max_features},
            {"tfidf_max_ngram", c.attack.tfidf.max_ngram},
            {"stack_folds", c.attack.stack_folds}}},
          {"fidelity",
           {{"topic_threshold", c.fidelity.topic_threshold},
            {"min_topic_size", c.fidelity.min_topic_size},
            {"centroid_k", c.fidelity.centroid_k},
            {"intra_mode", fidelity::IntraModeName(c.fidelity.intra_mode)}}}};
}

ordered_json ToJson(const sampling::SamplingPlan& p) {
  ordered_json strata = ordered_json::array();
  for (const auto& s : p.strata) {
    strata.push_back({{"author", s.author},
                      {"size", s.size},
                      {"sigma", s.sigma},
                      {"raw_share", s.raw_share},
                      {"allocated", s.allocated}});
  }
  return {{"z", p.z},
          {"error_margin", p.error_margin},
          {"sigma2", p.sigma2},
          {"population", p.population},
          {"infinite_n", p.infinite_n},
          {"n", p.n},
          {"allocated", p.allocated},
          {"strata", std::move(strata)}};
}

sampling::SamplingPlan SamplingPlanFromJson(const json& j) {
  sampling::SamplingPlan p;
  p.z = j.at("z").get<double>();
  p.error_margin = j.at("error_margin").get<double>();
  p.sigma2 = j.at("sigma2").get<double>();
  p.population = j.at("population").get<size_t>();
  p.infinite_n = j.at("infinite_n").get<double>();
  p.n = j.at("n").get<size_t>();
  p.allocated = j.at("allocated").get<size_t>();
  for (const auto& s : j.at("strata")) {
    p.strata.push_back({s.at("author").get<std::string>(),
                        s.at("size").get<size_t>(), s.at("sigma").get<double>(),
                        s.at("raw_share").get<double>(),
                        s.at("allocated").get<size_t>()});
  }
  return p;
}

ordered_json ToJson(const AuditReport& r) {
  ordered_json fid = ordered_json::array();
  for (const auto& f : r.fidelity) fid.push_back(fidelity::ToJson(f));
  return {
      {"tool", "synthaudit"},
      {"version", r.version},
      {"config", r.config},
      {"corpus", ToJson(r.corpus)},
      {"sampling", r.sampling ? ToJson(*r.sampling) : ordered_json(nullptr)},
      {"attack", r.attack ? attack::ToJson(*r.attack) : ordered_json(nullptr)},
      {"fidelity", std::move(fid)},
      {"warnings", r.warnings},
      {"partial", r.partial}};
}

AuditReport AuditReportFromJson(const json& j) {
  try {
    if (j.at("tool") != "synthaudit")
      throw DataError("not a synthaudit report");
    AuditReport r;
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config");
    const auto& c = j.at("corpus");
    r.corpus = {c.at("posts").get<size_t>(), c.at("authors").get<size_t>(),
                c.at("mean_words").get<double>(),
                c.at("median_words").get<double>(),
                c.at("max_words").get<size_t>()};
    if (!j.at("sampling").is_null()) {
      r.sampling = SamplingPlanFromJson(j.at("sampling"));
    }
    if (!j.at("attack").is_null()) {
      r.attack = attack::AttackReportFromJson(j.at("attack"));
    }
    for (const auto& f : j.at("fidelity")) {
      r.fidelity.push_back(fidelity::FidelityReportFromJson(f));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.partial = j.at("partial").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed audit report: ") + e.what());
  }
}

std::string SerializeReport(const AuditReport& report) {
  return ToJson(report).dump(2) + "\n";
}

void WritePlotData(const PlotData& plots, const fs::path& dir) {
  fs::create_directories(dir);
  std::string authors = "author,posts\n";
  for (const auto& [author, n] : plots.real_stats.posts_per_author) {
    authors += csv::Escape(author) + "," + std::to_string(n) + "\n";
  }
  WriteFile(dir / "posts_per_author.csv", authors);

  std::string lengths = "lower,upper,count\n";
  for (const auto& b : plots.real_stats.length_histogram) {
    lengths += std::to_string(b.lower) + "," + std::to_string(b.upper) + "," +
               std::to_string(b.count) + "\n";
  }
  WriteFile(dir / "post_length_histogram.csv", lengths);

  std::string sentiment = "corpus,negative,neutral,positive\n";
  for (const auto& row : plots.sentiment) {
    sentiment += csv::Escape(row.corpus);
    for (double v : row.distribution) sentiment += "," + Number(v);
    sentiment += "\n";
  }
  WriteFile(dir / "sentiment_distribution.csv", sentiment);

  if (!plots.pca.empty()) {
    std::string pca = "corpus,post_id,pc1,pc2\n";
    for (const auto& row : plots.pca) {
      pca += csv::Escape(row.corpus) + "," + csv::Escape(row.post_id) + "," +
             Number(row.x) + "," + Number(row.y) + "\n";
    }
    WriteFile(dir / "pca_coordinates.csv", pca);
  }
}

PipelineResult RunPipeline(const AuditConfig& config, int threads) {
  // Ingest everything first so bad inputs fail before any stage runs.
  const corpus::Corpus real =
      Relabel(corpus::LoadCorpus(config.Resolve(config.real_corpus),
                                 corpus::CorpusKind::kReal),
              "real");
  std::vector<corpus::Corpus> synthetic;
  for (const auto& s : config.synthetic) {
    synthetic.push_back(
        Relabel(corpus::LoadCorpus(config.Resolve(s.path),
                                   corpus::CorpusKind::kSynthetic),
                s.label));
  }
  std::optional<embedding::EmbeddingTable> table;
  if (config.embeddings) {
    table = embedding::LoadEmbeddingTable(config.Resolve(*config.embeddings));
  }
  std::optional<fidelity::SentimentLabels> labels;
  if (config.sentiment_labels) {
    labels =
        fidelity::LoadSentimentLabels(config.Resolve(*config.sentiment_labels));
  }
  std::optional<fidelity::TopicSet> real_topics;
  std::vector<fidelity::TopicSet> synth_topics;
  if (config.real_topics) {
    real_topics = fidelity::LoadTopicSet(config.Resolve(*config.real_topics));
    for (const auto& s : config.synthetic) {
      synth_topics.push_back(fidelity::LoadTopicSet(config.Resolve(*s.topics)));
    }
  }

  PipelineResult result;
  AuditReport& report = result.report;
  report.version = SYNTHAUDIT_VERSION;
  report.config = json(ToJson(config));
  result.plots.real_stats = corpus::ComputeAuthorStats(real);
  const auto& stats = result.plots.real_stats;
  report.corpus = {real.size(), stats.posts_per_author.size(), stats.mean_words,
                   stats.median_words, stats.max_words};

  auto stage_failed = [&report](const std::string& stage,
                                const std::exception& e) {
    report.warnings.push_back(stage + " failed: " + e.what());
    report.partial = true;
  };

  if (config.sampling.enabled) {
    try {
      const auto embedded = embedding::EmbedAll(
          corpus::TokenizeAll(real, threads), *table, threads);
      report.sampling = sampling::PlanSample(real, embedded, config.sampling.z,
                                             config.sampling.error_margin);
    } catch (const DataError& e) {
      stage_failed("sampling", e);
    } catch (const InvalidArgument& e) {
      stage_failed("sampling", e);
    }
  }

  attack::AttackOptions attack_options = config.attack;
  attack_options.seed = DeriveSeed(config.seed, kAttackSeedOffset);
  attack_options.threads = threads;
  if (config.external_predictions) {
    attack_options.external_path = config.Resolve(*config.external_predictions);
  }
  try {
    report.attack = attack::RunAttack(real, synthetic, attack_options);
    for (const auto& w : report.attack->warnings) {
      report.warnings.push_back("attack: " + w);
    }
    report.partial = report.partial || report.attack->partial;
  } catch (const DataError& e) {
    stage_failed("attack", e);
  } catch (const InvalidArgument& e) {
    stage_failed("attack", e);
  }

  fidelity::FidelityOptions fidelity_options = config.fidelity;
  fidelity_options.seed = DeriveSeed(config.seed, kFidelitySeedOffset);
  fidelity_options.threads = threads;
  for (size_t i = 0; i < synthetic.size(); ++i) {
    fidelity::FidelityInputs in;
    in.real = &real;
    in.synth = &synthetic[i];
    in.embeddings = table ? &*table : nullptr;
    in.sentiment = labels ? &*labels : nullptr;
    if (real_topics) {
      in.real_topics = &*real_topics;
      in.synth_topics = &synth_topics[i];
    }
    if (config.synthetic[i].persona) {
      for (const auto& post : synthetic[i].posts()) {
        in.writer_of.emplace_back(genharness::AssignPersona(post.author));
      }
    }
    try {
      auto f = fidelity::RunFidelity(in, fidelity_options);
      for (const auto& w : f.warnings) {
        report.warnings.push_back("fidelity " + f.corpus_label + ": " + w);
      }
      report.partial = report.partial || f.partial;
      report.fidelity.push_back(std::move(f));
    } catch (const DataError& e) {
      stage_failed("fidelity " + config.synthetic[i].label, e);
    } catch (const InvalidArgument& e) {
      stage_failed("fidelity " + config.synthetic[i].label, e);
    }
  }

  bool have_real_sentiment = false;
  for (const auto& f : report.fidelity) {
    if (!f.sentiment) continue;
    if (!have_real_sentiment) {
      result.plots.sentiment.push_back({"real", f.sentiment->real});
      have_real_sentiment = true;
    }
    result.plots.sentiment.push_back({f.corpus_label, f.sentiment->synth});
  }

  if (table) {
    embedding::PointSet points;
    points.dim = table->dimension();
    std::vector<std::pair<std::string, std::string>> owners;
    auto add = [&](const corpus::Corpus& c) {
      for (const auto& e : embedding::EmbedAll(corpus::TokenizeAll(c, threads),
                                               *table, threads)) {
        points.Append(e.vector);
        owners.emplace_back(c.label(), e.post_id);
      }
    };
    add(real);
    for (const auto& s : synthetic) add(s);
    if (points.size() >= 2) {
      const auto projection = embedding::PcaProject(points, 2);
      for (size_t i = 0; i < owners.size(); ++i) {
        const auto xy = projection.coordinates.row(i);
        result.plots.pca.push_back({owners[i].first, owners[i].second, xy[0],
                                    xy.size() > 1 ? xy[1] : 0.0});
      }
    }
  }
  return result;
}

std::string FormatPercent(double fraction) {
  return Fixed(fraction * 100.0, 2);
}

std::string FormatSigned4(double value) {
  const std::string magnitude = Fixed(std::fabs(value), 4);
  if (magnitude == "0.0000") return magnitude;
  return (value < 0 ? "−" : "+") + magnitude;
}

std::string RenderMarkdown(const AuditReport& r) {
  std::string md = "# Synthetic data audit\n\n";
  md += "synthaudit " + r.version;
  if (r.config.contains("seed")) md += ", seed " + r.config.at("seed").dump();
  md += "\n\n## Real corpus\n\n";
  md += Row({"Posts", "Authors", "Mean words", "Median words", "Max words"});
  md += "|---:|---:|---:|---:|---:|\n";
  md += Row({std::to_string(r.corpus.posts), std::to_string(r.corpus.authors),
             Fixed(r.corpus.mean_words, 2), Fixed(r.corpus.median_words, 2),
             std::to_string(r.corpus.max_words)});
  md += "\n";
  RenderSampling(r, md);
  md += "\n";
  RenderAttack(r, md);
  if (r.fidelity.empty()) {
    md += "\n## Fidelity\n\n";
    md += kNotComputed;
  }
  for (const auto& f : r.fidelity) {
    md += "\n## Fidelity: " + Cell(f.corpus_label) + "\n\n";
    RenderTraits(f, md);
    md += "\n";
    RenderSentiment(f, md);
    md += "\n";
    RenderTopics(f, md);
    md += "\n";
    RenderCentroids(f, md);
  }
  md += "\n## Warnings\n\n";
  if (r.warnings.empty()) md += "none\n";
  for (const auto& w : r.warnings) md += "- " + Cell(w) + "\n";
  return md;
}

}  // namespace synthaudit::report
