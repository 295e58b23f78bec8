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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <regex>

#include "httplib.h"
#include "synthaudit/errors.h"
#include "synthaudit/genharness.h"

namespace synthaudit::genharness {

struct HttpTransport::Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

HttpTransport::HttpTransport(ClientConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(
      R"(^(https?)://([^/:?#]+)(:[0-9]{1,5})?(/[^#]*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw ConfigError("endpoint must be an http(s) URL, got '" +
                      config_.endpoint + "'");
  }
  endpoint_ = std::make_unique<Endpoint>();
  endpoint_->origin = m[1].str() + "://" + m[2].str() + m[3].str();
  endpoint_->path = m[4].matched ? m[4].str() : "/";
  api_key_ = RequireApiKey(config_);
}

HttpTransport::~HttpTransport() = default;

Reply HttpTransport::Send(const std::string& prompt) {
  httplib::Client client(endpoint_->origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  client.set_bearer_token_auth(api_key_);

  nlohmann::json body = {{"model", config_.model}};
  body[config_.prompt_field] = prompt;
  auto res = client.Post(endpoint_->path, body.dump(), "application/json");

  Reply reply;
  if (!res) {
    reply.error = httplib::to_string(res.error());
    return reply;
  }
  reply.status = res->status;
  if (res->status < 200 || res->status >= 300) {
    reply.error = res->body.substr(0, 200);
    return reply;
  }
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    reply.text = res->body;
    reply.error = "response body is not JSON";
    return reply;
  }
  const nlohmann::json::json_pointer text_at(config_.text_pointer);
  if (!parsed.contains(text_at) || !parsed.at(text_at).is_string()) {
    reply.text = res->body;
    reply.error = "response has no string at " + config_.text_pointer;
    return reply;
  }
  reply.text = parsed.at(text_at).get<std::string>();
  if (config_.finish_reason_pointer) {
    const nlohmann::json::json_pointer reason_at(
        *config_.finish_reason_pointer);
    if (parsed.contains(reason_at) && parsed.at(reason_at).is_string()) {
      reply.truncated =
          parsed.at(reason_at).get<std::string>() == config_.truncated_reason;
    }
  }
  return reply;
}

}  // namespace synthaudit::genharness
