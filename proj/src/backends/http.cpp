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

#include "disc/backends/http.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace disc {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxLoggedExchanges = 10000;

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

void HttpBackendConfig::validate() const {
  if (endpoint_url.find("://") == std::string::npos) {
    throw std::invalid_argument("endpoint must be an absolute http(s) URL");
  }
  if (!(timeout.count() > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (retry.backoff.count() < 0.0 || retry.backoff_multiplier < 1.0) {
    throw std::invalid_argument("invalid retry backoff");
  }
  if (max_in_flight < 1 || max_in_flight > 4096) {
    throw std::invalid_argument("max_in_flight must lie in [1, 4096]");
  }
  for (const auto* p : {&text_pointer, &tokens_pointer}) {
    static_cast<void>(json::json_pointer(*p));
  }
}

HttpBackendConfig HttpBackendConfig::from_json(const json& j) {
  HttpBackendConfig c;
  c.endpoint_url = j.at("endpoint").get<std::string>();
  c.model_name = j.value("model", std::string());
  c.timeout = Duration(j.value("timeout_s", c.timeout.count()));
  c.retry.max_retries = j.value("max_retries", c.retry.max_retries);
  c.retry.backoff = Duration(j.value("backoff_s", c.retry.backoff.count()));
  c.text_pointer = j.value("text_pointer", c.text_pointer);
  c.tokens_pointer = j.value("tokens_pointer", c.tokens_pointer);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.send_seed = j.value("send_seed", c.send_seed);
  if (const char* key = std::getenv("DISC_API_KEY"); key != nullptr && *key != '\0') {
    c.api_key = key;
  }
  c.validate();
  return c;
}

HttpGenerationBackend::HttpGenerationBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.endpoint_url.find("://") + 3;
  const auto slash = config_.endpoint_url.find('/', scheme_end);
  host_ = config_.endpoint_url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint_url.substr(slash);
  in_flight_ = std::make_unique<std::counting_semaphore<4096>>(
      static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

HttpGenerationBackend::~HttpGenerationBackend() = default;

void HttpGenerationBackend::record(HttpExchange e) const {
  std::lock_guard lock(log_mutex_);
  if (e.attempt > 0) ++retries_;
  if (exchanges_.size() >= kMaxLoggedExchanges) exchanges_.erase(exchanges_.begin());
  exchanges_.push_back(std::move(e));
}

std::vector<HttpExchange> HttpGenerationBackend::exchanges() const {
  std::lock_guard lock(log_mutex_);
  return exchanges_;
}

std::size_t HttpGenerationBackend::retries() const {
  std::lock_guard lock(log_mutex_);
  return retries_;
}

Generation HttpGenerationBackend::sample(const TextSeq& prefix, const PolicyParams& params) const {
  params.validate();
  json body = {{"model", config_.model_name},
               {"prompt", prefix.text},
               {"temperature", params.temperature},
               {"max_tokens", params.max_units}};
  if (config_.send_seed && params.seed) body["seed"] = *params.seed;
  const std::string request = body.dump();

  httplib::Headers headers;
  if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<4096>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};

  const auto call_start = Clock::now();
  Duration backoff = config_.retry.backoff;
  HttpFailure cause = HttpFailure::kTransport;
  int last_status = 0;
  std::string last_error;
  const std::size_t attempts = config_.retry.max_retries + 1;
  std::size_t made = 0;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    ++made;
    if (attempt > 0) {
      spdlog::warn("http retry {}/{} after: {}", attempt, config_.retry.max_retries, last_error);
      std::this_thread::sleep_for(backoff);
      backoff *= config_.retry.backoff_multiplier;
    }
    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const auto start = Clock::now();
    auto res = client.Post(path_, headers, request, "application/json");
    HttpExchange ex{request, 0, {}, {}, attempt, Duration(Clock::now() - start)};
    spdlog::debug("http request {}", request);

    if (!res) {
      const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                             ex.elapsed >= config_.timeout * 0.95;
      cause = timed_out ? HttpFailure::kTimeout : HttpFailure::kTransport;
      last_error = (timed_out ? "timeout: " : "transport: ") + httplib::to_string(res.error());
      ex.error = last_error;
      record(std::move(ex));
      continue;
    }
    ex.status = res->status;
    ex.response = res->body;
    spdlog::debug("http response {} {}", res->status, res->body);
    last_status = res->status;
    if (res->status != 200) {
      last_error = "status " + std::to_string(res->status);
      ex.error = last_error;
      record(std::move(ex));
      cause = HttpFailure::kStatus;
      if (!transient_status(res->status)) break;
      continue;
    }
    record(ex);

    Generation g;
    try {
      const json reply = json::parse(res->body);
      g.suffix = TextSeq(reply.at(json::json_pointer(config_.text_pointer)).get<std::string>(),
                         prefix.scheme);
      g.tokens = reply.at(json::json_pointer(config_.tokens_pointer)).get<std::size_t>();
    } catch (const json::exception& e) {
      throw HttpBackendError(std::string("protocol error: ") + e.what(), HttpFailure::kProtocol,
                             res->status, attempt + 1);
    }
    g.generation_time = Duration(Clock::now() - call_start);
    return g;
  }
  throw HttpBackendError("generation failed (" + last_error + ")", cause, last_status, made);
}

}  // namespace disc
