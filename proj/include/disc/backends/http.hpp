// Copyright 2026 The DISC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Completion-endpoint client. Requests carry
// {model, prompt, temperature, max_tokens, seed}; the generated text and
// token count are read from configurable JSON pointers in the response.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disc/core.hpp"

namespace disc {

struct RetryPolicy {
  std::size_t max_retries = 3;
  Duration backoff{0.5};  // before the first retry
  double backoff_multiplier = 2.0;
};

struct HttpBackendConfig {
  std::string endpoint_url;  // e.g. http://localhost:8000/v1/completions
  std::string model_name;
  Duration timeout{60.0};
  RetryPolicy retry;
  std::string text_pointer = "/choices/0/text";
  std::string tokens_pointer = "/usage/completion_tokens";
  std::optional<std::string> api_key;  // sent as a bearer token
  std::size_t max_in_flight = 8;
  bool send_seed = true;

  void validate() const;

  // Keys: endpoint, model, timeout_s, max_retries, backoff_s, text_pointer,
  // tokens_pointer, max_in_flight, send_seed. The API key comes from
  // DISC_API_KEY when set.
  static HttpBackendConfig from_json(const nlohmann::json& j);
};

enum class HttpFailure { kTransport, kTimeout, kStatus, kProtocol };

class HttpBackendError : public BackendError {
 public:
  HttpBackendError(const std::string& what, HttpFailure cause, int status, std::size_t attempts)
      : BackendError(what), cause_(cause), status_(status), attempts_(attempts) {}

  HttpFailure cause() const { return cause_; }
  int status() const { return status_; }
  std::size_t attempts() const { return attempts_; }

 private:
  HttpFailure cause_;
  int status_;
  std::size_t attempts_;
};

struct HttpExchange {
  std::string request;
  int status = 0;  // 0 when no response arrived
  std::string response;
  std::string error;
  std::size_t attempt = 0;  // 0 for the first try
  Duration elapsed{0};
};

class HttpGenerationBackend final : public GenerationPolicy {
 public:
  explicit HttpGenerationBackend(HttpBackendConfig config);
  ~HttpGenerationBackend() override;

  Generation sample(const TextSeq& prefix, const PolicyParams& params) const override;

  std::vector<HttpExchange> exchanges() const;
  std::size_t retries() const;
  const HttpBackendConfig& config() const { return config_; }

 private:
  void record(HttpExchange e) const;

  HttpBackendConfig config_;
  std::string host_;
  std::string path_;
  std::unique_ptr<std::counting_semaphore<4096>> in_flight_;
  mutable std::mutex log_mutex_;
  mutable std::vector<HttpExchange> exchanges_;
  mutable std::size_t retries_ = 0;
};

}  // namespace disc
