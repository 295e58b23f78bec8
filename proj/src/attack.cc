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
#include <fstream>
#include <set>
#include <unordered_map>

#include "synthaudit/csv.h"
#include "synthaudit/errors.h"
#include "synthaudit/parallel.h"
#include "synthaudit/rng.h"

namespace synthaudit::attack {
namespace {

constexpr PredictionSource kBaseSources[] = {PredictionSource::kStylometric,
                                             PredictionSource::kNGram,
                                             PredictionSource::kTfidf};

std::vector<size_t> LabelIndices(const corpus::Corpus& corpus,
                                 std::span<const size_t> rows,
                                 const std::vector<std::string>& labels) {
  std::vector<size_t> y;
  y.reserve(rows.size());
  for (size_t r : rows) {
    const auto& author = corpus.posts()[r].author;
    auto it = std::lower_bound(labels.begin(), labels.end(), author);
    y.push_back(static_cast<size_t>(it - labels.begin()));
  }
  return y;
}

// Attackers trained on one split, able to score any tokenized posts.
struct Attackers {
  std::vector<std::string> labels;
  features::NGramVocabulary ngram_vocab;
  features::TfidfVocabulary tfidf_vocab;
  std::map<PredictionSource, LogRegModel> base;
  std::optional<StackedEnsemble> ensemble;

  features::FeatureMatrix Features(
      PredictionSource source,
      std::span<const corpus::TokenizedPost> posts) const {
    switch (source) {
      case PredictionSource::kStylometric:
        return features::StylometricMatrix(posts);
      case PredictionSource::kNGram:
        return features::NGramMatrix(posts, ngram_vocab);
      case PredictionSource::kTfidf:
        return features::TfidfMatrix(posts, tfidf_vocab);
      default:
        throw InvalidArgument("not a feature-based attacker");
    }
  }

  std::map<PredictionSource, PredictionSet> Predict(
      std::span<const corpus::TokenizedPost> posts) const {
    std::map<PredictionSource, PredictionSet> out;
    for (const auto& [source, model] : base) {
      out[source] = attack::Predict(model, Features(source, posts), source);
    }
    if (ensemble) {
      std::vector<PredictionSet> bases;
      for (PredictionSource s : kBaseSources) bases.push_back(out.at(s));
      out[PredictionSource::kEnsemble] = ApplyStackedEnsemble(*ensemble, bases);
    }
    return out;
  }
};

LogRegOptions OptionsFor(const AttackOptions& options, PredictionSource source,
                         uint64_t seed) {
  LogRegOptions o = options.logreg;
  o.seed = seed;
  o.standardize = source != PredictionSource::kTfidf;
  return o;
}

Attackers TrainAttackers(const corpus::Corpus& corpus,
                         std::span<const corpus::TokenizedPost> tokenized,
                         const Split& split, const AttackOptions& options,
                         bool want_ensemble) {
  Attackers a;
  a.labels = split.labels;
  std::vector<corpus::TokenizedPost> train_docs;
  for (size_t r : split.train) train_docs.push_back(tokenized[r]);
  a.ngram_vocab = features::BuildNGramVocab(train_docs, options.ngram_top_k);
  a.tfidf_vocab = features::BuildTfidfVocab(train_docs, options.tfidf);
  const auto y = LabelIndices(corpus, split.train, a.labels);

  std::vector<PredictionSet> oof;
  for (size_t s = 0; s < std::size(kBaseSources); ++s) {
    const PredictionSource source = kBaseSources[s];
    const auto x = a.Features(source, train_docs);
    const auto o =
        OptionsFor(options, source, DeriveSeed(options.seed, 10 + s));
    a.base[source] = TrainLogReg(x, y, a.labels, o);
    if (want_ensemble) {
      oof.push_back(
          OutOfFoldPredictions(x, y, a.labels, o, options.stack_folds, source));
    }
  }
  if (want_ensemble) {
    LogRegOptions meta = options.logreg;
    meta.seed = DeriveSeed(options.seed, 20);
    meta.standardize = true;
    a.ensemble = TrainStackedEnsemble(oof, y, a.labels, meta);
  }
  return a;
}

std::map<std::string, std::string> TruthFor(const corpus::Corpus& corpus,
                                            std::span<const size_t> rows) {
  std::map<std::string, std::string> truth;
  for (size_t r : rows) {
    truth[corpus.posts()[r].id] = corpus.posts()[r].author;
  }
  return truth;
}

bool Wants(const AttackOptions& options, PredictionSource source) {
  return std::find(options.models.begin(), options.models.end(), source) !=
         options.models.end();
}

bool Covers(const PredictionSet& set, std::span<const std::string> ids) {
  std::set<std::string_view> have(set.post_ids.begin(), set.post_ids.end());
  return std::all_of(ids.begin(), ids.end(),
                     [&](const std::string& id) { return have.count(id) > 0; });
}

struct SubsetOutcome {
  SubsetResult result;
  std::vector<std::string> warnings;
  std::optional<Attackers> attackers;
  bool external_used = false;
};

SubsetOutcome RunSubset(const corpus::Corpus& subset,
                        std::span<const corpus::TokenizedPost> tokenized,
                        double fraction, const AttackOptions& options,
                        const std::optional<PredictionSet>& external,
                        bool keep_attackers) {
  SubsetOutcome out;
  SubsetResult& r = out.result;
  r.fraction = fraction;
  r.posts = subset.size();
  const Split split =
      StratifiedSplit(subset, options.test_fraction, options.seed);
  r.authors = split.labels.size();
  r.train_posts = split.train.size();
  r.test_posts = split.test.size();
  r.flagged_authors = split.flagged_authors;
  if (split.labels.size() < 2 || split.test.empty()) {
    out.warnings.push_back("subset " + std::to_string(fraction) +
                           " has fewer than two authors; attackers skipped");
    return out;
  }
  const bool want_ensemble = Wants(options, PredictionSource::kEnsemble);
  Attackers attackers =
      TrainAttackers(subset, tokenized, split, options, want_ensemble);
  std::vector<corpus::TokenizedPost> test_docs;
  std::vector<std::string> test_ids;
  for (size_t t : split.test) {
    test_docs.push_back(tokenized[t]);
    test_ids.push_back(subset.posts()[t].id);
  }
  const auto truth = TruthFor(subset, split.test);
  auto predictions = attackers.Predict(test_docs);
  if (external && Wants(options, PredictionSource::kExternal)) {
    if (Covers(*external, test_ids)) {
      predictions[PredictionSource::kExternal] = external->Subset(test_ids);
      out.external_used = true;
    } else {
      out.warnings.push_back(
          "external predictions do not cover every test "
          "post of subset " +
          std::to_string(fraction));
    }
  }
  for (PredictionSource source : options.models) {
    auto it = predictions.find(source);
    if (it == predictions.end()) continue;
    const Scores s = Evaluate(it->second, truth);
    r.models.push_back(
        {std::string(PredictionSourceName(source)), s.accuracy, s.macro_f1});
  }
  if (keep_attackers) out.attackers = std::move(attackers);
  return out;
}

}  // namespace

std::string_view PredictionSourceName(PredictionSource source) {
  switch (source) {
    case PredictionSource::kStylometric:
      return "stylometric";
    case PredictionSource::kNGram:
      return "ngram";
    case PredictionSource::kTfidf:
      return "tfidf";
    case PredictionSource::kExternal:
      return "external";
    case PredictionSource::kEnsemble:
      return "ensemble";
  }
  return "unknown";
}

PredictionSource ParsePredictionSource(std::string_view name) {
  for (auto s : {PredictionSource::kStylometric, PredictionSource::kNGram,
                 PredictionSource::kTfidf, PredictionSource::kExternal,
                 PredictionSource::kEnsemble}) {
    if (PredictionSourceName(s) == name) return s;
  }
  throw ConfigError("unknown attack model '" + std::string(name) +
                    "' (expected stylometric, ngram, tfidf, external or "
                    "ensemble)");
}

size_t PredictionSet::Argmax(size_t i) const {
  const auto r = row(i);
  return static_cast<size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

PredictionSet PredictionSet::Subset(std::span<const std::string> ids) const {
  std::unordered_map<std::string_view, size_t> index;
  for (size_t i = 0; i < post_ids.size(); ++i) index.emplace(post_ids[i], i);
  PredictionSet out;
  out.source = source;
  out.labels = labels;
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw DataError("no prediction for post '" + id + "'");
    }
    out.post_ids.push_back(id);
    const auto r = row(it->second);
    out.probabilities.insert(out.probabilities.end(), r.begin(), r.end());
  }
  return out;
}

Scores Evaluate(const PredictionSet& predictions,
                const std::map<std::string, std::string>& truth) {
  if (predictions.size() != truth.size()) {
    throw DataError("prediction ids and truth ids differ (" +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
  }
  if (predictions.size() == 0) throw DataError("nothing to evaluate");
  std::map<std::string, size_t> tp, fp, fn;
  for (const auto& l : predictions.labels) tp[l];
  for (const auto& [id, label] : truth) tp[label];
  size_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    auto it = truth.find(predictions.post_ids[i]);
    if (it == truth.end()) {
      throw DataError("no ground truth for post '" + predictions.post_ids[i] +
                      "'");
    }
    const std::string& predicted = predictions.labels[predictions.Argmax(i)];
    if (predicted == it->second) {
      ++correct;
      ++tp[predicted];
    } else {
      ++fp[predicted];
      ++fn[it->second];
    }
  }
  double f1_sum = 0.0;
  for (const auto& [label, t] : tp) {
    const size_t denom = 2 * t + fp[label] + fn[label];
    if (denom > 0)
      f1_sum += 2.0 * static_cast<double>(t) / static_cast<double>(denom);
  }
  return {
      static_cast<double>(correct) / static_cast<double>(predictions.size()),
      f1_sum / static_cast<double>(tp.size())};
}

double RelativeReduction(double baseline_accuracy, double synthetic_accuracy) {
  if (!(baseline_accuracy > 0.0)) {
    throw InvalidArgument("relative reduction needs a positive baseline");
  }
  return 100.0 * (baseline_accuracy - synthetic_accuracy) / baseline_accuracy;
}

std::vector<std::pair<std::string, size_t>> RankAuthors(
    const corpus::Corpus& corpus) {
  std::map<std::string, size_t> counts;
  for (const auto& p : corpus.posts()) ++counts[p.author];
  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(),
                                                     counts.end());
  std::stable_sort(
      ranked.begin(), ranked.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

std::vector<corpus::Corpus> BuildSubsets(const corpus::Corpus& corpus,
                                         std::span<const double> fractions) {
  if (corpus.empty())
    throw DataError("cannot build subsets of an empty corpus");
  const auto ranked = RankAuthors(corpus);
  std::vector<corpus::Corpus> out;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw ConfigError("subset fraction " + std::to_string(f) +
                        " is outside (0, 1]");
    }
    const double want =
        std::ceil(f * static_cast<double>(ranked.size()) - 1e-9);
    const size_t top =
        std::clamp<size_t>(static_cast<size_t>(want), 1, ranked.size());
    std::set<std::string_view> keep;
    for (size_t i = 0; i < top; ++i) keep.insert(ranked[i].first);
    out.push_back(corpus.Filter(
        [&](size_t i) { return keep.count(corpus.posts()[i].author) > 0; }));
  }
  return out;
}

Split StratifiedSplit(const corpus::Corpus& corpus, double test_fraction,
                      uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<size_t>> by_author;
  for (size_t i = 0; i < corpus.size(); ++i) {
    by_author[corpus.posts()[i].author].push_back(i);
  }
  Split split;
  for (auto& [author, rows] : by_author) {
    split.labels.push_back(author);
    if (rows.size() < 2) {
      split.flagged_authors.push_back(author);
      split.train.insert(split.train.end(), rows.begin(), rows.end());
      continue;
    }
    const auto floor_k = static_cast<size_t>(
        std::floor(test_fraction * static_cast<double>(rows.size()) + 1e-9));
    const size_t k = std::clamp<size_t>(floor_k, 1, rows.size() - 1);
    Rng rng(DeriveSeed(seed, Fnv1a64(author)));
    rng.Shuffle(rows);
    split.test.insert(split.test.end(), rows.begin(), rows.begin() + k);
    split.train.insert(split.train.end(), rows.begin() + k, rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

PredictionSet Predict(const LogRegModel& model,
                      const features::FeatureMatrix& x,
                      PredictionSource source) {
  PredictionSet out;
  out.source = source;
  out.labels = model.labels;
  out.post_ids = x.post_ids();
  out.probabilities = PredictProbabilities(model, x);
  return out;
}

PredictionSet OutOfFoldPredictions(const features::FeatureMatrix& x,
                                   std::span<const size_t> y,
                                   const std::vector<std::string>& labels,
                                   const LogRegOptions& options, size_t folds,
                                   PredictionSource source) {
  const size_t n = x.rows();
  if (y.size() != n) throw InvalidArgument("label count differs from rows");
  folds = std::clamp<size_t>(folds, 2, std::max<size_t>(2, n));
  std::vector<std::vector<size_t>> rows_by_label(labels.size());
  for (size_t i = 0; i < n; ++i) rows_by_label.at(y[i]).push_back(i);
  std::vector<size_t> fold_of(n);
  Rng rng(DeriveSeed(options.seed, 7));
  for (auto& rows : rows_by_label) {
    rng.Shuffle(rows);
    for (size_t k = 0; k < rows.size(); ++k) fold_of[rows[k]] = k % folds;
  }
  PredictionSet out;
  out.source = source;
  out.labels = labels;
  out.post_ids = x.post_ids();
  out.probabilities.assign(n * labels.size(), 0.0);
  for (size_t f = 0; f < folds; ++f) {
    std::vector<size_t> train, held;
    for (size_t i = 0; i < n; ++i)
      (fold_of[i] == f ? held : train).push_back(i);
    if (held.empty()) continue;
    std::vector<size_t> y_train;
    for (size_t i : train) y_train.push_back(y[i]);
    const std::set<size_t> present(y_train.begin(), y_train.end());
    const auto x_held = x.Select(held);
    std::vector<double> probs;
    if (present.size() >= 2) {
      LogRegOptions fold_options = options;
      fold_options.seed = DeriveSeed(options.seed, 100 + f);
      const auto model =
          TrainLogReg(x.Select(train), y_train, labels, fold_options);
      probs = PredictProbabilities(model, x_held);
    } else {
      // Too few labels to fit: fall back to the training label frequencies.
      std::vector<double> prior(labels.size(), 0.0);
      for (size_t l : y_train)
        prior[l] += 1.0 / static_cast<double>(y_train.size());
      if (y_train.empty()) prior.assign(labels.size(), 1.0 / labels.size());
      for (size_t k = 0; k < held.size(); ++k) {
        probs.insert(probs.end(), prior.begin(), prior.end());
      }
    }
    for (size_t k = 0; k < held.size(); ++k) {
      std::copy(probs.begin() + k * labels.size(),
                probs.begin() + (k + 1) * labels.size(),
                out.probabilities.begin() + held[k] * labels.size());
    }
  }
  return out;
}

features::FeatureMatrix StackFeatures(std::span<const PredictionSet> bases) {
  if (bases.size() < 2) {
    throw InvalidArgument("stacking needs at least two base prediction sets");
  }
  const auto& ids = bases[0].post_ids;
  std::vector<std::string> columns;
  for (const auto& b : bases) {
    if (b.post_ids != ids) {
      throw DataError("base prediction sets cover different posts");
    }
    for (const auto& l : b.labels) {
      columns.push_back(std::string(PredictionSourceName(b.source)) + ":" + l);
    }
  }
  std::vector<double> values;
  values.reserve(ids.size() * columns.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    for (const auto& b : bases) {
      const auto r = b.row(i);
      values.insert(values.end(), r.begin(), r.end());
    }
  }
  return features::FeatureMatrix(std::move(columns), ids, std::move(values));
}

StackedEnsemble TrainStackedEnsemble(std::span<const PredictionSet> train_bases,
                                     std::span<const size_t> y,
                                     const std::vector<std::string>& labels,
                                     const LogRegOptions& options) {
  return {TrainLogReg(StackFeatures(train_bases), y, labels, options)};
}

PredictionSet ApplyStackedEnsemble(const StackedEnsemble& ensemble,
                                   std::span<const PredictionSet> bases) {
  return Predict(ensemble.meta, StackFeatures(bases),
                 PredictionSource::kEnsemble);
}

PredictionSet ReadExternalPredictions(std::istream& in,
                                      const std::vector<std::string>& labels,
                                      std::string_view source) {
  const csv::Table table = csv::Read(in, source);
  if (table.header.empty() || table.header[0] != "post_id") {
    throw DataError(std::string(source) + ": first column must be post_id");
  }
  std::map<std::string, size_t> column;
  for (size_t c = 1; c < table.header.size(); ++c) {
    if (!column.emplace(table.header[c], c).second) {
      throw DataError(std::string(source) + ": duplicate column '" +
                      table.header[c] + "'");
    }
  }
  std::vector<size_t> order;
  for (const auto& label : labels) {
    auto it = column.find(label);
    if (it == column.end()) {
      throw DataError(std::string(source) +
                      ": missing probability column for label '" + label + "'");
    }
    order.push_back(it->second);
  }
  if (column.size() != labels.size()) {
    for (const auto& [name, c] : column) {
      if (std::find(labels.begin(), labels.end(), name) == labels.end()) {
        throw DataError(std::string(source) + ": column '" + name +
                        "' is not a known author label");
      }
    }
  }
  PredictionSet out;
  out.source = PredictionSource::kExternal;
  out.labels = labels;
  std::set<std::string> seen;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where =
        std::string(source) + " line " + std::to_string(table.lines[r]);
    if (!seen.insert(row[0]).second) {
      throw DataError(where + ": duplicate post_id '" + row[0] + "'");
    }
    std::vector<double> p;
    double sum = 0.0;
    for (size_t k = 0; k < labels.size(); ++k) {
      const double v = csv::ParseDouble(row[order[k]], where);
      if (v < 0.0) {
        throw DataError(where + ": negative probability for label '" +
                        labels[k] + "'");
      }
      p.push_back(v);
      sum += v;
    }
    if (!(sum > 0.0)) throw DataError(where + ": probabilities sum to zero");
    if (std::abs(sum - 1.0) > 1e-3) ++out.renormalized_rows;
    for (double& v : p) v /= sum;
    out.post_ids.push_back(row[0]);
    out.probabilities.insert(out.probabilities.end(), p.begin(), p.end());
  }
  return out;
}

PredictionSet LoadExternalPredictions(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadExternalPredictions(in, labels, path.string());
}

AttackReport RunAttack(const corpus::Corpus& real,
                       std::span<const corpus::Corpus> synthetic,
                       const AttackOptions& options) {
  if (real.empty()) throw DataError("real corpus is empty");
  AttackReport report;
  const auto tokenized_all = corpus::TokenizeAll(real, options.threads);
  std::unordered_map<std::string_view, size_t> row_of;
  for (size_t i = 0; i < real.size(); ++i)
    row_of.emplace(real.posts()[i].id, i);

  std::optional<PredictionSet> external;
  if (options.external_path) {
    external = LoadExternalPredictions(*options.external_path, real.Authors());
    if (external->renormalized_rows > 0) {
      report.warnings.push_back(
          std::to_string(external->renormalized_rows) +
          " external prediction rows did not sum to 1 and were renormalized");
    }
  }

  const auto subsets = BuildSubsets(real, options.fractions);
  // Attackers from the full-corpus subset are reused for synthetic scoring.
  std::optional<size_t> full_index;
  for (size_t s = 0; s < subsets.size(); ++s) {
    if (subsets[s].size() == real.size()) full_index = s;
  }
  const bool need_full = !synthetic.empty();
  std::vector<SubsetOutcome> outcomes(subsets.size());
  ParallelFor(subsets.size(), options.threads, [&](size_t s) {
    std::vector<corpus::TokenizedPost> tok;
    tok.reserve(subsets[s].size());
    for (const auto& p : subsets[s].posts()) {
      tok.push_back(tokenized_all[row_of.at(p.id)]);
    }
    outcomes[s] = RunSubset(subsets[s], tok, options.fractions[s], options,
                            external, need_full && full_index == s);
  });
  bool external_used = false;
  for (auto& o : outcomes) {
    report.subsets.push_back(o.result);
    report.warnings.insert(report.warnings.end(), o.warnings.begin(),
                           o.warnings.end());
    external_used = external_used || o.external_used;
  }
  if (external && Wants(options, PredictionSource::kExternal) &&
      !external_used) {
    report.partial = true;
  }
  if (!need_full) return report;

  std::optional<Attackers> full;
  SubsetResult baseline;
  if (full_index && outcomes[*full_index].attackers) {
    full = std::move(outcomes[*full_index].attackers);
    baseline = outcomes[*full_index].result;
  } else {
    auto o = RunSubset(real, tokenized_all, 1.0, options, external, true);
    full = std::move(o.attackers);
    baseline = o.result;
  }
  if (!full) {
    report.warnings.push_back("no attacker available for synthetic scoring");
    report.partial = true;
    return report;
  }
  std::map<std::string, double> baseline_accuracy;
  for (const auto& m : baseline.models) baseline_accuracy[m.model] = m.accuracy;

  for (const auto& synth : synthetic) {
    const std::set<std::string> known(full->labels.begin(), full->labels.end());
    const auto kept = synth.Filter(
        [&](size_t i) { return known.count(synth.posts()[i].author) > 0; });
    if (kept.size() < synth.size()) {
      report.warnings.push_back(
          std::to_string(synth.size() - kept.size()) + " posts of '" +
          synth.label() + "' have authors unknown to the attacker; skipped");
    }
    if (kept.empty()) {
      report.partial = true;
      continue;
    }
    const auto tok = corpus::TokenizeAll(kept, options.threads);
    std::map<std::string, std::string> truth;
    std::vector<std::string> ids;
    for (const auto& p : kept.posts()) {
      truth[p.id] = p.author;
      ids.push_back(p.id);
    }
    auto predictions = full->Predict(tok);
    if (external && Wants(options, PredictionSource::kExternal) &&
        Covers(*external, ids)) {
      predictions[PredictionSource::kExternal] = external->Subset(ids);
    }
    for (PredictionSource source : options.models) {
      auto it = predictions.find(source);
      if (it == predictions.end()) continue;
      const Scores s = Evaluate(it->second, truth);
      SyntheticResult r;
      r.corpus_label = synth.label();
      r.model = std::string(PredictionSourceName(source));
      r.posts = kept.size();
      r.accuracy = s.accuracy;
      r.macro_f1 = s.macro_f1;
      auto b = baseline_accuracy.find(r.model);
      if (b != baseline_accuracy.end()) {
        r.baseline_accuracy = b->second;
        if (b->second > 0.0) {
          r.relative_reduction = RelativeReduction(b->second, s.accuracy);
        }
      }
      report.synthetic.push_back(std::move(r));
    }
  }
  return report;
}

nlohmann::ordered_json ToJson(const AttackReport& report) {
  nlohmann::ordered_json j;
  auto subsets = nlohmann::ordered_json::array();
  for (const auto& s : report.subsets) {
    nlohmann::ordered_json js;
    js["fraction"] = s.fraction;
    js["authors"] = s.authors;
    js["posts"] = s.posts;
    js["train_posts"] = s.train_posts;
    js["test_posts"] = s.test_posts;
    js["flagged_authors"] = s.flagged_authors;
    auto models = nlohmann::ordered_json::array();
    for (const auto& m : s.models) {
      models.push_back({{"model", m.model},
                        {"accuracy", m.accuracy},
                        {"macro_f1", m.macro_f1}});
    }
    js["models"] = std::move(models);
    subsets.push_back(std::move(js));
  }
  j["subsets"] = std::move(subsets);
  auto synth = nlohmann::ordered_json::array();
  for (const auto& s : report.synthetic) {
    nlohmann::ordered_json js;
    js["corpus"] = s.corpus_label;
    js["model"] = s.model;
    js["posts"] = s.posts;
    js["accuracy"] = s.accuracy;
    js["macro_f1"] = s.macro_f1;
    js["baseline_accuracy"] = s.baseline_accuracy;
    js["relative_reduction"] =
        s.relative_reduction ? nlohmann::ordered_json(*s.relative_reduction)
                             : nlohmann::ordered_json(nullptr);
    synth.push_back(std::move(js));
  }
  j["synthetic"] = std::move(synth);
  j["warnings"] = report.warnings;
  j["partial"] = report.partial;
  return j;
}

AttackReport AttackReportFromJson(const nlohmann::json& j) {
  try {
    AttackReport report;
    for (const auto& js : j.at("subsets")) {
      SubsetResult s;
      s.fraction = js.at("fraction").get<double>();
      s.authors = js.at("authors").get<size_t>();
      s.posts = js.at("posts").get<size_t>();
      s.train_posts = js.at("train_posts").get<size_t>();
      s.test_posts = js.at("test_posts").get<size_t>();
      s.flagged_authors =
          js.at("flagged_authors").get<std::vector<std::string>>();
      for (const auto& m : js.at("models")) {
        s.models.push_back({m.at("model").get<std::string>(),
                            m.at("accuracy").get<double>(),
                            m.at("macro_f1").get<double>()});
      }
      report.subsets.push_back(std::move(s));
    }
    for (const auto& js : j.at("synthetic")) {
      SyntheticResult s;
      s.corpus_label = js.at("corpus").get<std::string>();
      s.model = js.at("model").get<std::string>();
      s.posts = js.at("posts").get<size_t>();
      s.accuracy = js.at("accuracy").get<double>();
      s.macro_f1 = js.at("macro_f1").get<double>();
      s.baseline_accuracy = js.at("baseline_accuracy").get<double>();
      if (!js.at("relative_reduction").is_null()) {
        s.relative_reduction = js.at("relative_reduction").get<double>();
      }
      report.synthetic.push_back(std::move(s));
    }
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    report.partial = j.at("partial").get<bool>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attack report: ") + e.what());
  }
}

}  // namespace synthaudit::attack
