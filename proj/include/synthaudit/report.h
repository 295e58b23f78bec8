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

#ifndef SYNTHAUDIT_REPORT_H_
#define SYNTHAUDIT_REPORT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthaudit/attack.h"
#include "synthaudit/corpus.h"
#include "synthaudit/fidelity.h"
#include "synthaudit/sampling.h"

namespace synthaudit::report {

// Fixed offsets for stage seeds derived from the run seed.
inline constexpr uint64_t kSamplingSeedOffset = 10;
inline constexpr uint64_t kAttackSeedOffset = 20;
inline constexpr uint64_t kFidelitySeedOffset = 30;

struct SyntheticInput {
  std::string label;
  std::filesystem::path path;
  // Posts were rewritten by roster personas; writers follow AssignPersona.
  bool persona = false;
  std::optional<std::filesystem::path> topics;
};

struct SamplingConfig {
  bool enabled = false;
  double z = 1.96;
  double error_margin = 0.05;
};

struct AuditConfig {
  uint64_t seed = 0;
  std::filesystem::path real_corpus;
  std::vector<SyntheticInput> synthetic;
  std::optional<std::filesystem::path> embeddings;
  // Sentiment CSV covering real and synthetic post ids.
  std::optional<std::filesystem::path> sentiment_labels;
  std::optional<std::filesystem::path> real_topics;
  std::optional<std::filesystem::path> external_predictions;
  SamplingConfig sampling;
  // seed, threads and external_path are filled in by the pipeline.
  attack::AttackOptions attack;
  fidelity::FidelityOptions fidelity;
  // Relative paths are resolved against this directory. Not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;
};

// Parses and validates a config. "seed", "real_corpus" and at least one
// "synthetic" entry are required; unknown keys, bad values and missing files
// are ConfigErrors naming the offending key or path.
AuditConfig AuditConfigFromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
AuditConfig LoadAuditConfig(const std::filesystem::path& path);
nlohmann::ordered_json ToJson(const AuditConfig& config);

struct CorpusSummary {
  size_t posts = 0;
  size_t authors = 0;
  double mean_words = 0.0;
  double median_words = 0.0;
  size_t max_words = 0;
};

struct AuditReport {
  std::string version;
  // Normalized config echo (keys sorted).
  nlohmann::json config;
  CorpusSummary corpus;
  std::optional<sampling::SamplingPlan> sampling;
  std::optional<attack::AttackReport> attack;
  std::vector<fidelity::FidelityReport> fidelity;
  std::vector<std::string> warnings;
  bool partial = false;
};

nlohmann::ordered_json ToJson(const AuditReport& report);
AuditReport AuditReportFromJson(const nlohmann::json& j);
nlohmann::ordered_json ToJson(const sampling::SamplingPlan& plan);
sampling::SamplingPlan SamplingPlanFromJson(const nlohmann::json& j);

// Indented JSON with a trailing newline; the byte-stable report format.
std::string SerializeReport(const AuditReport& report);

// Data behind the plots, written beside the report.
struct PlotData {
  corpus::AuthorStats real_stats;
  // (corpus label, negative, neutral, positive); the real corpus is "real".
  struct SentimentRow {
    std::string corpus;
    std::array<double, 3> distribution{};
  };
  std::vector<SentimentRow> sentiment;
  // 2-D PCA of real and synthetic post embeddings, fitted jointly.
  struct PcaRow {
    std::string corpus;
    std::string post_id;
    double x = 0.0;
    double y = 0.0;
  };
  std::vector<PcaRow> pca;
};

// posts_per_author.csv, post_length_histogram.csv,
// sentiment_distribution.csv and, when available, pca_coordinates.csv.
void WritePlotData(const PlotData& plots, const std::filesystem::path& dir);

struct PipelineResult {
  AuditReport report;
  PlotData plots;
};

// ingest -> optional sampling plan -> attack -> fidelity. Input and config
// problems are thrown before any work; failures inside a stage become
// warnings and leave that stage's section empty.
PipelineResult RunPipeline(const AuditConfig& config, int threads = 1);

// Tables with two-decimal percentages and four-decimal distances. Missing
// sections read "not computed".
std::string RenderMarkdown(const AuditReport& report);

// Formatting helpers shared with the CLI.
std::string FormatPercent(double fraction);
std::string FormatSigned4(double value);

}  // namespace synthaudit::report

#endif  // SYNTHAUDIT_REPORT_H_
