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

#include "synthaudit/genharness.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>
#include <utility>

#include "synthaudit/errors.h"
#include "synthaudit/rng.h"
#include "synthaudit/unicode.h"

namespace synthaudit::genharness {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kRosterSize> kRoster = {
    "Ernest Hemingway", "F. Scott Fitzgerald", "George Orwell",  "James Joyce",
    "John Steinbeck",   "Kurt Vonnegut",       "Samuel Beckett", "T.S. Eliot",
    "Virginia Woolf",   "William Faulkner"};

constexpr std::string_view kFormatIntro =
    "Please respond in the format shown below:\n\n";

void AppendFormatStub(size_t count, std::string& out) {
  out += kFormatIntro;
  for (size_t k = 1; k <= count; ++k) {
    out += "Post" + std::to_string(k) + ": your response\n";
  }
}

void AppendNumbered(std::string_view prefix, std::span<const std::string> posts,
                    std::string& out) {
  for (size_t i = 0; i < posts.size(); ++i) {
    out += prefix;
    out += std::to_string(i + 1) + ": " + posts[i] + "\n";
  }
  out += "\n";
}

std::string_view Trim(std::string_view s) {
  const auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

// Number k and the offset just past the colon when the line opens with a
// "Post<k>:" marker.
std::optional<std::pair<size_t, size_t>> MatchMarker(std::string_view line) {
  size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  constexpr std::string_view kWord = "post";
  if (line.size() < i + kWord.size()) return std::nullopt;
  for (char c : kWord) {
    if (std::tolower(static_cast<unsigned char>(line[i++])) != c) {
      return std::nullopt;
    }
  }
  const size_t digits = i;
  size_t k = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    if (i - digits >= 9) return std::nullopt;
    k = k * 10 + static_cast<size_t>(line[i] - '0');
    ++i;
  }
  if (i == digits || i >= line.size() || line[i] != ':') return std::nullopt;
  return std::make_pair(k, i + 1);
}

template <typename Enum, size_t N>
Enum ParseName(std::string_view name,
               const std::array<std::pair<Enum, std::string_view>, N>& table,
               std::string_view what) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  throw DataError("unknown " + std::string(what) + " '" + std::string(name) +
                  "'");
}

constexpr std::array<std::pair<PromptKind, std::string_view>, 2> kKindNames = {
    {{PromptKind::kExampleBased, "example_based"},
     {PromptKind::kPersonaBased, "persona_based"}}};

constexpr std::array<std::pair<BatchStatus, std::string_view>, 4> kStatusNames =
    {{{BatchStatus::kOk, "ok"},
      {BatchStatus::kParseError, "parse_error"},
      {BatchStatus::kTransportError, "transport_error"},
      {BatchStatus::kTruncated, "truncated"}}};

void CheckPrices(const UnitPrices& prices) {
  if (!(prices.prompt_per_1k >= 0) || !(prices.response_per_1k >= 0)) {
    throw InvalidArgument("unit prices must be non-negative");
  }
}

CostEntry MakeEntry(const std::string& id, std::string_view prompt,
                    std::string_view response, const UnitPrices& prices) {
  CostEntry e{id, EstimateTokens(prompt), EstimateTokens(response), 0.0};
  e.cost = (e.prompt_tokens * prices.prompt_per_1k +
            e.response_tokens * prices.response_per_1k) /
           1000.0;
  return e;
}

void AddEntry(CostEntry entry, CostLedger& ledger) {
  ledger.prompt_tokens += entry.prompt_tokens;
  ledger.response_tokens += entry.response_tokens;
  ledger.total += entry.cost;
  ledger.entries.push_back(std::move(entry));
}

GenerationBatch StartBatch(const BatchRequest& request) {
  GenerationBatch b;
  b.id = request.id;
  b.author = request.author;
  b.source_ids = request.source_ids;
  b.kind = request.prompt.kind;
  b.writer = request.prompt.writer;
  b.prompt = request.prompt.text;
  return b;
}

GenerationBatch RunOne(const BatchRequest& request, Transport& transport,
                       const SubmitOptions& options) {
  GenerationBatch batch = StartBatch(request);
  for (size_t attempt = 1; attempt <= options.max_attempts; ++attempt) {
    Reply reply;
    try {
      reply = transport.Send(request.prompt.text);
    } catch (const std::exception& e) {
      reply = Reply{0, "", false, e.what()};
    }
    batch.attempts = attempt;
    if (reply.status >= 200 && reply.status < 300) {
      batch.response = reply.text;
      if (!reply.error.empty()) {
        batch.status = BatchStatus::kParseError;
        batch.error = reply.error;
      } else if (reply.truncated) {
        batch.status = BatchStatus::kTruncated;
        batch.error = "response stopped before completion";
      } else {
        ParsedPosts parsed =
            ParseNumberedPosts(reply.text, request.prompt.expected_posts);
        if (parsed.ok()) {
          batch.status = BatchStatus::kOk;
          batch.posts = std::move(parsed.posts);
        } else {
          batch.status = BatchStatus::kParseError;
          batch.error = *parsed.error;
        }
      }
      return batch;
    }
    batch.status = BatchStatus::kTransportError;
    batch.error = reply.status == 0
                      ? "no response: " + reply.error
                      : "HTTP " + std::to_string(reply.status) +
                            (reply.error.empty() ? "" : ": " + reply.error);
    if (!IsRetryable(reply) || attempt == options.max_attempts) break;
    const double seconds =
        options.backoff_base_seconds *
        std::pow(options.backoff_factor, static_cast<double>(attempt - 1));
    const auto delay =
        std::chrono::milliseconds(std::llround(seconds * 1000.0));
    batch.backoff_ms.push_back(delay.count());
    if (options.sleep) {
      options.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
  return batch;
}

template <typename T>
T Field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace

std::string_view PromptKindName(PromptKind kind) {
  for (const auto& [value, text] : kKindNames) {
    if (value == kind) return text;
  }
  return "";
}

PromptKind ParsePromptKind(std::string_view name) {
  return ParseName(name, kKindNames, "prompt kind");
}

std::string_view BatchStatusName(BatchStatus status) {
  for (const auto& [value, text] : kStatusNames) {
    if (value == status) return text;
  }
  return "";
}

BatchStatus ParseBatchStatus(std::string_view name) {
  return ParseName(name, kStatusNames, "batch status");
}

const std::array<std::string_view, kRosterSize>& PersonaRoster() {
  return kRoster;
}

bool IsPersona(std::string_view writer) {
  return std::find(kRoster.begin(), kRoster.end(), writer) != kRoster.end();
}

std::string_view AssignPersona(std::string_view author) {
  return kRoster[Fnv1a64(author) % kRosterSize];
}

Prompt BuildExamplePrompt(std::span<const std::string> examples, size_t n_out) {
  if (examples.empty()) {
    throw InvalidArgument("an example prompt needs at least one post");
  }
  if (n_out == 0) throw InvalidArgument("n_out must be at least 1");
  Prompt p;
  p.kind = PromptKind::kExampleBased;
  p.num_examples = examples.size();
  p.expected_posts = n_out;
  p.text = "Using the following examples, generate " + std::to_string(n_out) +
           " new social media posts, keeping them true to their content and "
           "writing style.\n\n";
  AppendNumbered("Example", examples, p.text);
  AppendFormatStub(n_out, p.text);
  return p;
}

Prompt BuildPersonaPrompt(std::string_view writer,
                          std::span<const std::string> posts) {
  if (!IsPersona(writer)) {
    throw InvalidArgument("unknown persona writer '" + std::string(writer) +
                          "'");
  }
  if (posts.empty()) {
    throw InvalidArgument("a persona prompt needs at least one post");
  }
  Prompt p;
  p.kind = PromptKind::kPersonaBased;
  p.writer = std::string(writer);
  p.num_examples = posts.size();
  p.expected_posts = posts.size();
  p.text = "You are " + std::string(writer) +
           ",\na renowned 20th-century literary figure known for your "
           "distinctive style.\nRewrite the following " +
           std::to_string(posts.size()) +
           " social media posts in your own style,\npreserving their meaning "
           "but adapting them to your voice.\n\n";
  AppendNumbered("Original", posts, p.text);
  AppendFormatStub(posts.size(), p.text);
  return p;
}

std::string RenderResponse(std::span<const std::string> posts) {
  std::string out;
  for (size_t i = 0; i < posts.size(); ++i) {
    if (i > 0) out += "\n";
    out += "Post" + std::to_string(i + 1) + ": " + posts[i];
  }
  return out;
}

ParsedPosts ParseNumberedPosts(std::string_view response, size_t expected) {
  struct Block {
    size_t k;
    std::string text;
  };
  std::vector<Block> blocks;
  size_t pos = 0;
  while (pos <= response.size()) {
    size_t end = response.find('\n', pos);
    if (end == std::string_view::npos) end = response.size();
    std::string_view line = response.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto marker = MatchMarker(line)) {
      blocks.push_back(
          {marker->first, std::string(line.substr(marker->second))});
    } else if (!blocks.empty()) {
      blocks.back().text += "\n";
      blocks.back().text += line;
    }
    pos = end + 1;
  }

  ParsedPosts out;
  auto fail = [&out](std::string message) {
    out.posts.clear();
    out.error = std::move(message);
    return out;
  };
  if (blocks.empty() && expected > 0) return fail("no Post<k>: markers found");
  for (size_t i = 0; i < blocks.size(); ++i) {
    const size_t want = i + 1;
    const size_t k = blocks[i].k;
    if (k > expected) {
      return fail("count mismatch: found Post" + std::to_string(k) +
                  " but expected " + std::to_string(expected) + " posts");
    }
    if (k < want) {
      return fail("out-of-order marker Post" + std::to_string(k) +
                  " after Post" + std::to_string(want - 1));
    }
    if (k > want) return fail("missing Post" + std::to_string(want));
    std::string_view text = Trim(blocks[i].text);
    if (text.empty()) return fail("empty Post" + std::to_string(k));
    out.posts.emplace_back(text);
  }
  if (out.posts.size() < expected) {
    return fail("missing Post" + std::to_string(out.posts.size() + 1));
  }
  return out;
}

std::vector<BatchRequest> PlanBatches(const corpus::Corpus& real,
                                      const PlanOptions& options) {
  if (options.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  std::map<std::string, std::vector<const corpus::Post*>> by_author;
  for (const auto& post : real.posts()) by_author[post.author].push_back(&post);
  const std::string prefix =
      options.kind == PromptKind::kExampleBased ? "example-" : "persona-";
  std::vector<BatchRequest> out;
  for (const auto& [author, posts] : by_author) {
    for (size_t start = 0; start < posts.size(); start += options.batch_size) {
      const size_t end = std::min(posts.size(), start + options.batch_size);
      BatchRequest r;
      char index[16];
      std::snprintf(index, sizeof(index), "%06zu", out.size() + 1);
      r.id = prefix + index;
      r.author = author;
      std::vector<std::string> texts;
      for (size_t i = start; i < end; ++i) {
        r.source_ids.push_back(posts[i]->id);
        texts.push_back(posts[i]->text);
      }
      r.prompt = options.kind == PromptKind::kExampleBased
                     ? BuildExamplePrompt(texts, texts.size())
                     : BuildPersonaPrompt(AssignPersona(author), texts);
      out.push_back(std::move(r));
    }
  }
  return out;
}

json ToJson(const GenerationBatch& b) {
  return json{{"id", b.id},
              {"author", b.author},
              {"source_ids", b.source_ids},
              {"kind", PromptKindName(b.kind)},
              {"writer", b.writer ? json(*b.writer) : json(nullptr)},
              {"prompt", b.prompt},
              {"response", b.response},
              {"posts", b.posts},
              {"status", BatchStatusName(b.status)},
              {"attempts", b.attempts},
              {"backoff_ms", b.backoff_ms},
              {"error", b.error}};
}

GenerationBatch GenerationBatchFromJson(const json& j) {
  try {
    GenerationBatch b;
    b.id = j.at("id").get<std::string>();
    b.author = Field<std::string>(j, "author", "");
    b.source_ids = j.at("source_ids").get<std::vector<std::string>>();
    b.kind = ParsePromptKind(j.at("kind").get<std::string>());
    if (j.contains("writer") && !j.at("writer").is_null()) {
      b.writer = j.at("writer").get<std::string>();
    }
    b.prompt = j.at("prompt").get<std::string>();
    b.response = Field<std::string>(j, "response", "");
    b.posts = Field<std::vector<std::string>>(j, "posts", {});
    b.status = ParseBatchStatus(j.at("status").get<std::string>());
    b.attempts = Field<size_t>(j, "attempts", 0);
    b.backoff_ms = Field<std::vector<long long>>(j, "backoff_ms", {});
    b.error = Field<std::string>(j, "error", "");
    return b;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed generation record: ") + e.what());
  }
}

ScriptedTransport::ScriptedTransport(std::vector<Reply> script,
                                     std::optional<Reply> fallback)
    : script_(std::move(script)), fallback_(std::move(fallback)) {}

Reply ScriptedTransport::Send(const std::string& prompt) {
  std::lock_guard<std::mutex> lock(mu_);
  const size_t call = prompts_.size();
  prompts_.push_back(prompt);
  if (call < script_.size()) return script_[call];
  if (fallback_) return *fallback_;
  return Reply{0, "", false, "script exhausted"};
}

size_t ScriptedTransport::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_.size();
}

std::vector<std::string> ScriptedTransport::prompts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_;
}

ClientConfig ClientConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("client config must be an object");
  static const std::vector<std::string> kKeys = {"endpoint",
                                                 "model",
                                                 "api_key_env",
                                                 "prompt_field",
                                                 "text_pointer",
                                                 "finish_reason_pointer",
                                                 "truncated_reason",
                                                 "timeout_seconds",
                                                 "max_in_flight",
                                                 "max_attempts",
                                                 "backoff_base_seconds",
                                                 "backoff_factor",
                                                 "prompt_price_per_1k",
                                                 "response_price_per_1k"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ConfigError("unknown client config key '" + key + "'");
    }
  }
  ClientConfig c;
  try {
    c.endpoint = Field<std::string>(j, "endpoint", c.endpoint);
    c.model = Field<std::string>(j, "model", c.model);
    c.api_key_env = Field<std::string>(j, "api_key_env", c.api_key_env);
    c.prompt_field = Field<std::string>(j, "prompt_field", c.prompt_field);
    c.text_pointer = Field<std::string>(j, "text_pointer", c.text_pointer);
    if (j.contains("finish_reason_pointer") &&
        !j.at("finish_reason_pointer").is_null()) {
      c.finish_reason_pointer =
          j.at("finish_reason_pointer").get<std::string>();
    }
    c.truncated_reason =
        Field<std::string>(j, "truncated_reason", c.truncated_reason);
    c.timeout_seconds = Field<int>(j, "timeout_seconds", c.timeout_seconds);
    c.max_in_flight = Field<size_t>(j, "max_in_flight", c.max_in_flight);
    c.max_attempts = Field<size_t>(j, "max_attempts", c.max_attempts);
    c.backoff_base_seconds =
        Field<double>(j, "backoff_base_seconds", c.backoff_base_seconds);
    c.backoff_factor = Field<double>(j, "backoff_factor", c.backoff_factor);
    c.prompt_price_per_1k =
        Field<double>(j, "prompt_price_per_1k", c.prompt_price_per_1k);
    c.response_price_per_1k =
        Field<double>(j, "response_price_per_1k", c.response_price_per_1k);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("client config: ") + e.what());
  }
  for (const std::string* ptr :
       {&c.text_pointer,
        c.finish_reason_pointer ? &*c.finish_reason_pointer : nullptr}) {
    if (ptr == nullptr) continue;
    try {
      json::json_pointer check(*ptr);
    } catch (const json::exception&) {
      throw ConfigError("client config: invalid JSON pointer '" + *ptr + "'");
    }
  }
  if (c.timeout_seconds <= 0) throw ConfigError("timeout_seconds must be > 0");
  if (c.max_in_flight == 0) throw ConfigError("max_in_flight must be >= 1");
  if (c.max_attempts == 0) throw ConfigError("max_attempts must be >= 1");
  if (!(c.backoff_base_seconds >= 0)) {
    throw ConfigError("backoff_base_seconds must be >= 0");
  }
  if (!(c.backoff_factor >= 1))
    throw ConfigError("backoff_factor must be >= 1");
  if (!(c.prompt_price_per_1k >= 0) || !(c.response_price_per_1k >= 0)) {
    throw ConfigError("prices must be non-negative");
  }
  return c;
}

json ToJson(const ClientConfig& c) {
  return json{{"endpoint", c.endpoint},
              {"model", c.model},
              {"api_key_env", c.api_key_env},
              {"prompt_field", c.prompt_field},
              {"text_pointer", c.text_pointer},
              {"finish_reason_pointer", c.finish_reason_pointer
                                            ? json(*c.finish_reason_pointer)
                                            : json(nullptr)},
              {"truncated_reason", c.truncated_reason},
              {"timeout_seconds", c.timeout_seconds},
              {"max_in_flight", c.max_in_flight},
              {"max_attempts", c.max_attempts},
              {"backoff_base_seconds", c.backoff_base_seconds},
              {"backoff_factor", c.backoff_factor},
              {"prompt_price_per_1k", c.prompt_price_per_1k},
              {"response_price_per_1k", c.response_price_per_1k}};
}

std::string RequireApiKey(const ClientConfig& config) {
  const char* value = std::getenv(config.api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("credential variable " + config.api_key_env +
                      " is not set");
  }
  return value;
}

SubmitOptions SubmitOptionsFrom(const ClientConfig& config) {
  SubmitOptions o;
  o.max_in_flight = config.max_in_flight;
  o.max_attempts = config.max_attempts;
  o.backoff_base_seconds = config.backoff_base_seconds;
  o.backoff_factor = config.backoff_factor;
  return o;
}

bool IsRetryable(const Reply& reply) {
  return reply.status == 0 || reply.status == 429 ||
         (reply.status >= 500 && reply.status < 600);
}

std::vector<GenerationBatch> ReadJournal(const std::filesystem::path& path) {
  std::vector<GenerationBatch> out;
  std::ifstream in(path);
  if (!in) return out;
  std::map<std::string, size_t> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    GenerationBatch b;
    try {
      b = GenerationBatchFromJson(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
    auto [it, fresh] = index.emplace(b.id, out.size());
    if (fresh) {
      out.push_back(std::move(b));
    } else {
      out[it->second] = std::move(b);
    }
  }
  return out;
}

std::vector<GenerationBatch> SubmitBatches(
    std::span<const BatchRequest> requests, Transport& transport,
    const SubmitOptions& options) {
  if (options.max_in_flight == 0)
    throw ConfigError("max_in_flight must be >= 1");
  if (options.max_attempts == 0) throw ConfigError("max_attempts must be >= 1");
  std::map<std::string, size_t> seen;
  for (size_t i = 0; i < requests.size(); ++i) {
    if (!seen.emplace(requests[i].id, i).second) {
      throw InvalidArgument("duplicate request id " + requests[i].id);
    }
  }

  std::vector<GenerationBatch> results(requests.size());
  std::vector<size_t> pending;
  if (options.journal) {
    for (auto& done : ReadJournal(*options.journal)) {
      if (done.status == BatchStatus::kTransportError) continue;
      auto it = seen.find(done.id);
      if (it == seen.end()) continue;
      if (done.prompt != requests[it->second].prompt.text) {
        throw ConfigError("journal record " + done.id +
                          " was written for a different prompt");
      }
      results[it->second] = std::move(done);
      seen.erase(it);
    }
  }
  for (const auto& [id, i] : seen) pending.push_back(i);
  std::sort(pending.begin(), pending.end());

  std::ofstream journal;
  if (options.journal) {
    journal.open(*options.journal, std::ios::app | std::ios::binary);
    if (!journal) {
      throw ConfigError("cannot open journal " + options.journal->string());
    }
  }
  std::mutex journal_mu;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t n = next++; n < pending.size(); n = next++) {
      const size_t i = pending[n];
      results[i] = RunOne(requests[i], transport, options);
      if (journal.is_open()) {
        const std::string line = ToJson(results[i]).dump() + "\n";
        std::lock_guard<std::mutex> lock(journal_mu);
        journal << line;
        journal.flush();
      }
    }
  };
  const size_t workers = std::min(options.max_in_flight, pending.size());
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  if (workers > 0) worker();
  for (auto& t : pool) t.join();
  return results;
}

GenerationSummary Summarize(std::span<const GenerationBatch> batches) {
  GenerationSummary s;
  for (const auto& b : batches) {
    switch (b.status) {
      case BatchStatus::kOk:
        ++s.ok;
        continue;
      case BatchStatus::kParseError:
        ++s.parse_error;
        break;
      case BatchStatus::kTransportError:
        ++s.transport_error;
        break;
      case BatchStatus::kTruncated:
        ++s.truncated;
        break;
    }
    s.warnings.push_back(b.id + ": " + std::string(BatchStatusName(b.status)) +
                         " (" + b.error + ")");
  }
  return s;
}

corpus::Corpus AssembleCorpus(std::span<const GenerationBatch> batches,
                              const corpus::Corpus& real,
                              const std::string& label) {
  std::vector<corpus::Post> posts;
  for (const auto& b : batches) {
    if (b.status != BatchStatus::kOk) continue;
    if (b.posts.size() != b.source_ids.size()) {
      throw DataError("batch " + b.id + " has " +
                      std::to_string(b.posts.size()) + " posts for " +
                      std::to_string(b.source_ids.size()) + " sources");
    }
    for (size_t i = 0; i < b.posts.size(); ++i) {
      const auto at = real.Find(b.source_ids[i]);
      if (!at) {
        throw DataError("batch " + b.id + " refers to unknown post " +
                        b.source_ids[i]);
      }
      posts.push_back({label + ":" + b.source_ids[i], real.posts()[*at].author,
                       unicode::ToLower(b.posts[i]), std::nullopt,
                       b.source_ids[i]});
    }
  }
  return corpus::Corpus(std::move(posts), corpus::CorpusKind::kSynthetic,
                        label);
}

double EstimateTokens(std::string_view text) {
  return static_cast<double>(unicode::Length(text)) / 4.0;
}

CostLedger EstimateCost(std::span<const GenerationBatch> batches,
                        const UnitPrices& prices) {
  CheckPrices(prices);
  CostLedger ledger{prices, {}, 0, 0, 0};
  for (const auto& b : batches) {
    AddEntry(MakeEntry(b.id, b.prompt, b.response, prices), ledger);
  }
  return ledger;
}

CostLedger EstimateCost(std::span<const BatchRequest> requests,
                        const UnitPrices& prices) {
  CheckPrices(prices);
  CostLedger ledger{prices, {}, 0, 0, 0};
  for (const auto& r : requests) {
    AddEntry(MakeEntry(r.id, r.prompt.text, "", prices), ledger);
  }
  return ledger;
}

json ToJson(const CostLedger& ledger) {
  json entries = json::array();
  for (const auto& e : ledger.entries) {
    entries.push_back({{"request_id", e.request_id},
                       {"prompt_tokens", e.prompt_tokens},
                       {"response_tokens", e.response_tokens},
                       {"cost", e.cost}});
  }
  return json{{"prompt_price_per_1k", ledger.prices.prompt_per_1k},
              {"response_price_per_1k", ledger.prices.response_per_1k},
              {"prompt_tokens", ledger.prompt_tokens},
              {"response_tokens", ledger.response_tokens},
              {"total", ledger.total},
              {"entries", std::move(entries)}};
}

}  // namespace synthaudit::genharness
