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

// Command-line front end: ingest, sample, generate, attack, fidelity, report
// and run. Exit codes: 0 success, 1 configuration error, 2 data error,
// 3 finished with warnings.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "synthaudit/attack.h"
#include "synthaudit/corpus.h"
#include "synthaudit/embedding.h"
#include "synthaudit/errors.h"
#include "synthaudit/fidelity.h"
#include "synthaudit/genharness.h"
#include "synthaudit/report.h"
#include "synthaudit/rng.h"
#include "synthaudit/sampling.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace synthaudit;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void WriteText(const fs::path& path, const std::string& text) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

void Emit(const std::optional<fs::path>& path, const std::string& text) {
  if (path) {
    WriteText(*path, text);
  } else {
    std::cout << text;
  }
}

int WarningsExit(const std::vector<std::string>& warnings, bool partial) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return warnings.empty() && !partial ? kExitOk : kExitPartial;
}

// ingest ---------------------------------------------------------------------

struct IngestArgs {
  fs::path input;
  fs::path output;
  std::optional<fs::path> stats;
  std::optional<fs::path> plots;
  size_t bin_width = 10;
  bool synthetic = false;
};

int RunIngest(const IngestArgs& a) {
  const auto kind =
      a.synthetic ? corpus::CorpusKind::kSynthetic : corpus::CorpusKind::kReal;
  const corpus::Corpus c = corpus::LoadCorpus(a.input, kind);
  EnsureParent(a.output);
  corpus::SaveCorpus(c, a.output);
  const auto stats = corpus::ComputeAuthorStats(c, a.bin_width);
  if (a.stats) {
    ordered_json authors = ordered_json::array();
    for (const auto& [author, n] : stats.posts_per_author) {
      authors.push_back({{"author", author}, {"posts", n}});
    }
    ordered_json bins = ordered_json::array();
    for (const auto& b : stats.length_histogram) {
      bins.push_back(
          {{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
    }
    const ordered_json j = {{"posts", c.size()},
                            {"authors", stats.posts_per_author.size()},
                            {"mean_words", stats.mean_words},
                            {"median_words", stats.median_words},
                            {"max_words", stats.max_words},
                            {"posts_per_author", std::move(authors)},
                            {"length_histogram", std::move(bins)}};
    WriteText(*a.stats, j.dump(2) + "\n");
  }
  if (a.plots) {
    report::PlotData plots;
    plots.real_stats = stats;
    report::WritePlotData(plots, *a.plots);
  }
  std::cerr << c.size() << " posts from " << stats.posts_per_author.size()
            << " authors written to " << a.output.string() << "\n";
  return kExitOk;
}

// sample ---------------------------------------------------------------------

struct SampleArgs {
  fs::path corpus;
  fs::path embeddings;
  double z = 1.96;
  double margin = 0.05;
  uint64_t seed = 0;
  fs::path output;
  std::optional<fs::path> plan;
  int threads = 1;
};

int RunSample(const SampleArgs& a) {
  const auto c = corpus::LoadCorpus(a.corpus, corpus::CorpusKind::kReal);
  const auto table = embedding::LoadEmbeddingTable(a.embeddings);
  const auto embedded =
      embedding::EmbedAll(corpus::TokenizeAll(c, a.threads), table, a.threads);
  const auto plan = sampling::PlanSample(c, embedded, a.z, a.margin);
  const auto sample =
      sampling::DrawSample(c, sampling::AllocationMap(plan),
                           DeriveSeed(a.seed, report::kSamplingSeedOffset));
  EnsureParent(a.output);
  corpus::SaveCorpus(sample, a.output);
  if (a.plan) {
    const auto normality = embedding::CheckNormality(
        embedding::ToPointSet(embedded), 5000, DeriveSeed(a.seed, 1));
    json w = json::array();
    for (const auto& v : normality.w) w.push_back(v ? json(*v) : json(nullptr));
    ordered_json j = report::ToJson(plan);
    j["normality"] = {{"sample_size", normality.sample_size},
                      {"subsampled", normality.subsampled},
                      {"degenerate_dims", normality.degenerate_dims},
                      {"w", std::move(w)}};
    WriteText(*a.plan, j.dump(2) + "\n");
  }
  std::cerr << "Cochran size " << plan.n << " of " << plan.population
            << "; drew " << sample.size() << " posts\n";
  return kExitOk;
}

// generate -------------------------------------------------------------------

struct GenerateArgs {
  fs::path corpus;
  std::optional<fs::path> client;
  std::string kind = "example_based";
  size_t batch_size = 5;
  std::optional<fs::path> journal;
  fs::path output;
  std::string label = "synthetic";
  std::optional<fs::path> cost;
  std::optional<fs::path> batches;
  bool dry_run = false;
};

int RunGenerate(const GenerateArgs& a) {
  genharness::ClientConfig client;
  if (a.client) {
    std::ifstream in(*a.client);
    if (!in)
      throw ConfigError("cannot open client config " + a.client->string());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
      throw ConfigError(a.client->string() + " is not valid JSON");
    client = genharness::ClientConfigFromJson(j);
  } else if (!a.dry_run) {
    throw ConfigError("--client is required unless --dry-run is given");
  }
  genharness::PromptKind kind;
  try {
    kind = genharness::ParsePromptKind(a.kind);
  } catch (const DataError& e) {
    throw ConfigError(std::string("--kind: ") + e.what());
  }
  const genharness::UnitPrices prices{client.prompt_price_per_1k,
                                      client.response_price_per_1k};
  const auto real = corpus::LoadCorpus(a.corpus, corpus::CorpusKind::kReal);
  const auto requests = genharness::PlanBatches(real, {kind, a.batch_size});

  if (a.dry_run) {
    std::string lines;
    for (const auto& r : requests) {
      const ordered_json j = {
          {"id", r.id},
          {"author", r.author},
          {"source_ids", r.source_ids},
          {"kind", genharness::PromptKindName(r.prompt.kind)},
          {"writer", r.prompt.writer ? json(*r.prompt.writer) : json(nullptr)},
          {"prompt", r.prompt.text}};
      lines += j.dump() + "\n";
    }
    WriteText(a.output, lines);
    const auto ledger = genharness::EstimateCost(requests, prices);
    if (a.cost) WriteText(*a.cost, genharness::ToJson(ledger).dump(2) + "\n");
    std::cerr << requests.size() << " prompts planned, about "
              << static_cast<long long>(ledger.prompt_tokens)
              << " prompt tokens\n";
    return kExitOk;
  }

  genharness::HttpTransport transport(client);
  auto options = genharness::SubmitOptionsFrom(client);
  options.journal =
      a.journal ? *a.journal : fs::path(a.output.string() + ".journal.jsonl");
  const auto results = genharness::SubmitBatches(requests, transport, options);
  const auto synthetic = genharness::AssembleCorpus(results, real, a.label);
  EnsureParent(a.output);
  corpus::SaveCorpus(synthetic, a.output);
  const auto ledger = genharness::EstimateCost(results, prices);
  if (a.cost) WriteText(*a.cost, genharness::ToJson(ledger).dump(2) + "\n");
  if (a.batches) {
    std::string lines;
    for (const auto& b : results) lines += genharness::ToJson(b).dump() + "\n";
    WriteText(*a.batches, lines);
  }
  const auto summary = genharness::Summarize(results);
  std::cerr << summary.ok << " of " << results.size() << " batches ok, "
            << synthetic.size() << " posts written; estimated cost "
            << ledger.total << "\n";
  return WarningsExit(summary.warnings, false);
}

// attack ---------------------------------------------------------------------

struct AttackArgs {
  fs::path corpus;
  std::vector<std::string> synthetic;  // label=path
  std::vector<double> subsets = {0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> models = {"stylometric", "ngram", "tfidf",
                                     "ensemble"};
  std::optional<fs::path> external;
  uint64_t seed = 0;
  int threads = 1;
  double test_fraction = 0.2;
  int epochs = 200;
  std::optional<fs::path> output;
  std::optional<fs::path> markdown;
};

std::vector<corpus::Corpus> LoadLabeled(const std::vector<std::string>& entries) {
  std::vector<corpus::Corpus> out;
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw ConfigError("--synthetic expects label=path, got '" + entry + "'");
    }
    const auto c =
        corpus::LoadCorpus(entry.substr(eq + 1), corpus::CorpusKind::kSynthetic);
    out.emplace_back(c.posts(), c.kind(), entry.substr(0, eq));
  }
  return out;
}

int RunAttackCommand(const AttackArgs& a) {
  attack::AttackOptions o;
  o.fractions = a.subsets;
  o.models.clear();
  for (const auto& m : a.models)
    o.models.push_back(attack::ParsePredictionSource(m));
  o.external_path = a.external;
  o.seed = a.seed;
  o.threads = a.threads;
  o.test_fraction = a.test_fraction;
  o.logreg.epochs = a.epochs;
  const auto real = corpus::LoadCorpus(a.corpus, corpus::CorpusKind::kReal);
  const auto synthetic = LoadLabeled(a.synthetic);
  const auto result = attack::RunAttack(real, synthetic, o);
  Emit(a.output, attack::ToJson(result).dump(2) + "\n");
  if (a.markdown) {
    report::AuditReport r;
    r.version = SYNTHAUDIT_VERSION;
    r.config = {{"seed", a.seed}};
    const auto stats = corpus::ComputeAuthorStats(real);
    r.corpus = {real.size(), stats.posts_per_author.size(), stats.mean_words,
                stats.median_words, stats.max_words};
    r.attack = result;
    r.warnings = result.warnings;
    WriteText(*a.markdown, report::RenderMarkdown(r));
  }
  return WarningsExit(result.warnings, result.partial);
}

// fidelity -------------------------------------------------------------------

struct FidelityArgs {
  fs::path real;
  fs::path synthetic;
  std::string label = "synthetic";
  std::optional<fs::path> embeddings;
  std::optional<fs::path> sentiment;
  std::optional<fs::path> real_topics;
  std::optional<fs::path> synthetic_topics;
  bool persona = false;
  size_t k = 50;
  std::string mode = "per_writer";
  size_t min_topic_size = 10;
  double threshold = 0.7;
  uint64_t seed = 0;
  int threads = 1;
  std::optional<fs::path> output;
};

int RunFidelityCommand(const FidelityArgs& a) {
  if (a.real_topics.has_value() != a.synthetic_topics.has_value()) {
    throw ConfigError("--real-topics and --synthetic-topics go together");
  }
  fidelity::FidelityOptions o;
  o.topic_threshold = a.threshold;
  o.min_topic_size = a.min_topic_size;
  o.centroid_k = a.k;
  o.intra_mode = fidelity::ParseIntraMode(a.mode);
  o.seed = a.seed;
  o.threads = a.threads;

  const auto real = corpus::LoadCorpus(a.real, corpus::CorpusKind::kReal);
  const auto loaded =
      corpus::LoadCorpus(a.synthetic, corpus::CorpusKind::kSynthetic);
  const corpus::Corpus synth(loaded.posts(), loaded.kind(), a.label);
  std::optional<embedding::EmbeddingTable> table;
  if (a.embeddings) table = embedding::LoadEmbeddingTable(*a.embeddings);
  std::optional<fidelity::SentimentLabels> labels;
  if (a.sentiment) labels = fidelity::LoadSentimentLabels(*a.sentiment);
  std::optional<fidelity::TopicSet> real_topics, synth_topics;
  if (a.real_topics) {
    real_topics = fidelity::LoadTopicSet(*a.real_topics);
    synth_topics = fidelity::LoadTopicSet(*a.synthetic_topics);
  }

  fidelity::FidelityInputs in;
  in.real = &real;
  in.synth = &synth;
  in.embeddings = table ? &*table : nullptr;
  in.sentiment = labels ? &*labels : nullptr;
  in.real_topics = real_topics ? &*real_topics : nullptr;
  in.synth_topics = synth_topics ? &*synth_topics : nullptr;
  if (a.persona) {
    for (const auto& post : synth.posts()) {
      in.writer_of.emplace_back(genharness::AssignPersona(post.author));
    }
  }
  const auto result = fidelity::RunFidelity(in, o);
  Emit(a.output, fidelity::ToJson(result).dump(2) + "\n");
  return WarningsExit(result.warnings, result.partial);
}

// report / run ---------------------------------------------------------------

struct ReportArgs {
  fs::path input;
  std::optional<fs::path> markdown;
};

int RunReport(const ReportArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw DataError("cannot open report " + a.input.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw DataError(a.input.string() + " is not valid JSON");
  const auto r = report::AuditReportFromJson(j);
  Emit(a.markdown, report::RenderMarkdown(r));
  return kExitOk;
}

struct RunArgs {
  fs::path config;
  fs::path output_dir;
  int threads = 1;
};

int RunAll(const RunArgs& a) {
  const auto config = report::LoadAuditConfig(a.config);
  const auto result = report::RunPipeline(config, a.threads);
  fs::create_directories(a.output_dir);
  WriteText(a.output_dir / "report.json",
            report::SerializeReport(result.report));
  WriteText(a.output_dir / "report.md", report::RenderMarkdown(result.report));
  report::WritePlotData(result.plots, a.output_dir / "plots");
  std::cerr << "report written to " << (a.output_dir / "report.json").string()
            << "\n";
  return WarningsExit(result.report.warnings, result.report.partial);
}

template <typename Fn>
int Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidArgument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy and fidelity audit for synthetic social-media text"};
  app.set_version_flag("--version", std::string(SYNTHAUDIT_VERSION));
  app.require_subcommand(1);
  int exit_code = kExitOk;

  IngestArgs ingest;
  auto* cmd = app.add_subcommand("ingest", "Validate and normalize a corpus");
  cmd->add_option("--input", ingest.input, "Line-delimited JSON posts")
      ->required();
  cmd->add_option("--output", ingest.output, "Canonical corpus output")
      ->required();
  cmd->add_option("--stats", ingest.stats, "Per-author statistics JSON");
  cmd->add_option("--plots", ingest.plots, "Directory for histogram CSVs");
  cmd->add_option("--bin-width", ingest.bin_width, "Post length bin width")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--synthetic", ingest.synthetic,
                "Treat the input as synthetic");
  cmd->callback([&] { exit_code = Guard([&] { return RunIngest(ingest); }); });

  SampleArgs sample;
  cmd = app.add_subcommand("sample", "Plan and draw a stratified sample");
  cmd->add_option("--corpus", sample.corpus)->required();
  cmd->add_option("--embeddings", sample.embeddings, "Word embedding table")
      ->required();
  cmd->add_option("--z", sample.z, "Confidence z-score")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--margin", sample.margin, "Error margin")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", sample.seed)->required();
  cmd->add_option("--output", sample.output, "Sampled corpus")->required();
  cmd->add_option("--plan", sample.plan, "Sampling plan JSON");
  cmd->add_option("--threads", sample.threads)->check(CLI::PositiveNumber);
  cmd->callback([&] { exit_code = Guard([&] { return RunSample(sample); }); });

  GenerateArgs generate;
  cmd = app.add_subcommand("generate",
                           "Produce synthetic posts through an LLM endpoint");
  cmd->add_option("--corpus", generate.corpus, "Source posts")->required();
  cmd->add_option("--client", generate.client, "Endpoint config JSON")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kind", generate.kind, "example_based or persona_based")
      ->check(CLI::IsMember({"example_based", "persona_based"}));
  cmd->add_option("--batch-size", generate.batch_size, "Posts per prompt")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--journal", generate.journal, "Resumable request journal");
  cmd->add_option("--output", generate.output,
                  "Synthetic corpus, or planned prompts with --dry-run")
      ->required();
  cmd->add_option("--label", generate.label, "Synthetic corpus label");
  cmd->add_option("--cost", generate.cost, "Cost ledger JSON");
  cmd->add_option("--batches", generate.batches, "Batch records JSONL");
  cmd->add_flag("--dry-run", generate.dry_run, "Plan prompts without sending");
  cmd->callback(
      [&] { exit_code = Guard([&] { return RunGenerate(generate); }); });

  AttackArgs atk;
  cmd = app.add_subcommand("attack", "Authorship attribution attack");
  cmd->add_option("--corpus", atk.corpus, "Real corpus")->required();
  cmd->add_option("--synthetic", atk.synthetic, "label=path, repeatable");
  cmd->add_option("--subsets", atk.subsets, "Author fractions")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--models", atk.models, "Attackers to report")
      ->delimiter(',')
      ->check(CLI::IsMember(
          {"stylometric", "ngram", "tfidf", "external", "ensemble"}));
  cmd->add_option("--external", atk.external, "External prediction CSV");
  cmd->add_option("--seed", atk.seed)->required();
  cmd->add_option("--threads", atk.threads)->check(CLI::PositiveNumber);
  cmd->add_option("--test-fraction", atk.test_fraction)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--epochs", atk.epochs)->check(CLI::NonNegativeNumber);
  cmd->add_option("--output", atk.output, "AttackReport JSON (default stdout)");
  cmd->add_option("--markdown", atk.markdown, "Markdown tables");
  cmd->callback(
      [&] { exit_code = Guard([&] { return RunAttackCommand(atk); }); });

  FidelityArgs fid;
  cmd = app.add_subcommand("fidelity",
                           "Compare a synthetic corpus with the real one");
  cmd->add_option("--real", fid.real)->required();
  cmd->add_option("--synthetic", fid.synthetic)->required();
  cmd->add_option("--label", fid.label, "Synthetic corpus label");
  cmd->add_option("--embeddings", fid.embeddings);
  cmd->add_option("--sentiment", fid.sentiment, "post_id,label CSV");
  cmd->add_option("--real-topics", fid.real_topics);
  cmd->add_option("--synthetic-topics", fid.synthetic_topics);
  cmd->add_flag("--persona", fid.persona, "Group centroids by persona writer");
  cmd->add_option("--k", fid.k, "Centroid count")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", fid.mode, "per_writer or shared")
      ->check(CLI::IsMember({"per_writer", "shared"}));
  cmd->add_option("--min-topic-size", fid.min_topic_size)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", fid.threshold, "Topic match threshold")
      ->check(CLI::Range(-1.0, 1.0));
  cmd->add_option("--seed", fid.seed)->required();
  cmd->add_option("--threads", fid.threads)->check(CLI::PositiveNumber);
  cmd->add_option("--output", fid.output,
                  "FidelityReport JSON (default stdout)");
  cmd->callback(
      [&] { exit_code = Guard([&] { return RunFidelityCommand(fid); }); });

  ReportArgs rep;
  cmd = app.add_subcommand("report", "Render an audit report as markdown");
  cmd->add_option("--input", rep.input, "Report JSON")->required();
  cmd->add_option("--markdown", rep.markdown, "Output file (default stdout)");
  cmd->callback([&] { exit_code = Guard([&] { return RunReport(rep); }); });

  RunArgs run;
  cmd = app.add_subcommand("run", "Full pipeline from an audit config");
  cmd->add_option("--config", run.config)->required()->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", run.output_dir)->required();
  cmd->add_option("--threads", run.threads)->check(CLI::PositiveNumber);
  cmd->callback([&] { exit_code = Guard([&] { return RunAll(run); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return exit_code;
}
