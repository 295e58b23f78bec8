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

#ifndef SYNTHAUDIT_GENHARNESS_H_
#define SYNTHAUDIT_GENHARNESS_H_

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synthaudit/corpus.h"

namespace synthaudit::genharness {

enum class PromptKind { kExampleBased, kPersonaBased };

std::string_view PromptKindName(PromptKind kind);
PromptKind ParsePromptKind(std::string_view name);

inline constexpr size_t kRosterSize = 10;

// Writers available to persona-based prompts, alphabetical.
const std::array<std::string_view, kRosterSize>& PersonaRoster();

bool IsPersona(std::string_view writer);

// Roster entry for an author: FNV-1a of the label, modulo the roster size.
std::string_view AssignPersona(std::string_view author);

struct Prompt {
  PromptKind kind = PromptKind::kExampleBased;
  std::optional<std::string> writer;
  // Number of posts placed in the prompt.
  size_t num_examples = 0;
  // Number of posts the response must contain.
  size_t expected_posts = 0;
  std::string text;
};

// Few-shot prompt asking for n_out new posts in the style of the examples.
// Throws InvalidArgument on an empty example list or n_out == 0.
Prompt BuildExamplePrompt(std::span<const std::string> examples,
                          size_t n_out = 5);

// Rewrite prompt in the voice of a roster writer. Throws InvalidArgument for
// an unknown writer or no posts.
Prompt BuildPersonaPrompt(std::string_view writer,
                          std::span<const std::string> posts);

// "Post1: ...\nPost2: ..." in the format requested by the prompts.
std::string RenderResponse(std::span<const std::string> posts);

struct ParsedPosts {
  std::vector<std::string> posts;
  // Set when the response does not contain exactly Post1..PostN in order.
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

// Splits a response into blocks introduced by "Post<k>:" at the start of a
// line (case-insensitive). Text before the first marker is ignored. Each block
// runs to the next marker and is trimmed.
ParsedPosts ParseNumberedPosts(std::string_view response, size_t expected);

// One prompt to submit. Synthetic post i is derived from source_ids[i].
struct BatchRequest {
  std::string id;
  std::string author;
  std::vector<std::string> source_ids;
  Prompt prompt;
};

struct PlanOptions {
  PromptKind kind = PromptKind::kExampleBased;
  // Source posts per prompt; each prompt asks for as many outputs.
  size_t batch_size = 5;
};

// Groups each author's posts (corpus order, authors sorted) into prompts of
// at most batch_size posts. Request ids are "<kind>-<6-digit index>".
std::vector<BatchRequest> PlanBatches(const corpus::Corpus& real,
                                      const PlanOptions& options);

enum class BatchStatus { kOk, kParseError, kTransportError, kTruncated };

std::string_view BatchStatusName(BatchStatus status);
BatchStatus ParseBatchStatus(std::string_view name);

struct GenerationBatch {
  std::string id;
  std::string author;
  std::vector<std::string> source_ids;
  PromptKind kind = PromptKind::kExampleBased;
  std::optional<std::string> writer;
  std::string prompt;
  std::string response;
  std::vector<std::string> posts;
  BatchStatus status = BatchStatus::kTransportError;
  size_t attempts = 0;
  // Delay before each retry, in milliseconds.
  std::vector<long long> backoff_ms;
  std::string error;
};

nlohmann::json ToJson(const GenerationBatch& batch);
GenerationBatch GenerationBatchFromJson(const nlohmann::json& j);

// Outcome of a single request to the model endpoint.
struct Reply {
  // HTTP status; 0 when no response arrived.
  int status = 0;
  std::string text;
  // The endpoint reported that generation stopped early.
  bool truncated = false;
  // For a 2xx reply, a body the transport could not read.
  std::string error;
};

// Sends one prompt. Implementations must be callable from several threads.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Reply Send(const std::string& prompt) = 0;
};

// Replays a fixed list of replies in order, then repeats the fallback.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<Reply> script,
                             std::optional<Reply> fallback = std::nullopt);
  Reply Send(const std::string& prompt) override;
  size_t calls() const;
  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mu_;
  std::vector<Reply> script_;
  std::optional<Reply> fallback_;
  std::vector<std::string> prompts_;
};

struct ClientConfig {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string model;
  std::string api_key_env = "SYNTHAUDIT_LLM_API_KEY";
  // Request body: {"model": model, <prompt_field>: prompt}.
  std::string prompt_field = "prompt";
  // JSON pointers into the response body.
  std::string text_pointer = "/text";
  std::optional<std::string> finish_reason_pointer;
  // finish_reason value that marks a cut-off response.
  std::string truncated_reason = "length";
  int timeout_seconds = 120;
  size_t max_in_flight = 4;
  size_t max_attempts = 5;
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
  double prompt_price_per_1k = 0.0;
  double response_price_per_1k = 0.0;
};

// Reads the client section of a JSON config. Unknown keys are ConfigErrors.
ClientConfig ClientConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ClientConfig& config);

// Value of the credential variable; ConfigError when unset or empty.
std::string RequireApiKey(const ClientConfig& config);

// Posts JSON to the configured endpoint with a bearer token.
class HttpTransport : public Transport {
 public:
  // Throws ConfigError for a malformed endpoint or a missing credential.
  explicit HttpTransport(ClientConfig config);
  ~HttpTransport() override;
  Reply Send(const std::string& prompt) override;

 private:
  struct Endpoint;
  ClientConfig config_;
  std::string api_key_;
  std::unique_ptr<Endpoint> endpoint_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct SubmitOptions {
  size_t max_in_flight = 4;
  size_t max_attempts = 5;
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
  // Defaults to std::this_thread::sleep_for.
  Sleeper sleep;
  // Line-delimited JSON of finished batches. Existing ok, parse_error and
  // truncated records are reused instead of being sent again.
  std::optional<std::filesystem::path> journal;
};

SubmitOptions SubmitOptionsFrom(const ClientConfig& config);

// Retries on no response, 429 and 5xx with delays base * factor^(n-1).
bool IsRetryable(const Reply& reply);

// Results in request order regardless of completion order.
std::vector<GenerationBatch> SubmitBatches(
    std::span<const BatchRequest> requests, Transport& transport,
    const SubmitOptions& options);

// Records from a journal file, last record per id wins. Missing file yields
// an empty list; malformed lines are DataErrors.
std::vector<GenerationBatch> ReadJournal(const std::filesystem::path& path);

struct GenerationSummary {
  size_t ok = 0;
  size_t parse_error = 0;
  size_t transport_error = 0;
  size_t truncated = 0;
  std::vector<std::string> warnings;
};

GenerationSummary Summarize(std::span<const GenerationBatch> batches);

// Synthetic corpus from ok batches. Each post takes the author of its source
// post and id "<label>:<source id>". Text is lowercased like ingested posts.
corpus::Corpus AssembleCorpus(std::span<const GenerationBatch> batches,
                              const corpus::Corpus& real,
                              const std::string& label);

struct UnitPrices {
  double prompt_per_1k = 0.0;
  double response_per_1k = 0.0;
};

// Code points divided by four.
double EstimateTokens(std::string_view text);

struct CostEntry {
  std::string request_id;
  double prompt_tokens = 0.0;
  double response_tokens = 0.0;
  double cost = 0.0;
};

struct CostLedger {
  UnitPrices prices;
  std::vector<CostEntry> entries;
  double prompt_tokens = 0.0;
  double response_tokens = 0.0;
  double total = 0.0;
};

// Throws InvalidArgument on a negative price.
CostLedger EstimateCost(std::span<const GenerationBatch> batches,
                        const UnitPrices& prices);
// Prompt side only, for planning before submission.
CostLedger EstimateCost(std::span<const BatchRequest> requests,
                        const UnitPrices& prices);

nlohmann::json ToJson(const CostLedger& ledger);

}  // namespace synthaudit::genharness

#endif  // SYNTHAUDIT_GENHARNESS_H_
