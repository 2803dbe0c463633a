// Copyright 2026 The modl-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Chat-completion client, an offline mock endpoint and the resumable
// collection loop that fills the response store.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "modlforge/acquisition.hpp"
#include "modlforge/parallel.hpp"

namespace modlforge {

inline constexpr const char* kEndpointEnv = "MODLFORGE_ENDPOINT";
inline constexpr const char* kApiKeyEnv = "MODLFORGE_API_KEY";

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string api_key;
  std::string model = "gpt-4-0613";
  double temperature = 1.0;
  int completions = 1;
  std::chrono::seconds timeout{120};

  // Empty fields are filled from MODLFORGE_ENDPOINT and MODLFORGE_API_KEY.
  EndpointConfig with_environment() const {
    EndpointConfig out = *this;
    if (out.base_url.empty()) {
      if (const char* v = std::getenv(kEndpointEnv)) out.base_url = v;
    }
    if (out.api_key.empty()) {
      if (const char* v = std::getenv(kApiKeyEnv)) out.api_key = v;
    }
    return out;
  }
};

class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  // Returns the completion text; throws TransportError on any failure.
  virtual std::string complete(const std::string& prompt) = 0;
};

inline nlohmann::json chat_request(const EndpointConfig& config, const std::string& prompt) {
  return {{"model", config.model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
          {"temperature", config.temperature},
          {"n", config.completions}};
}

inline std::string chat_reply_text(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw TransportError("response is not JSON");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("response has no choices[0].message.content");
  }
}

class HttpChatEndpoint : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(EndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
      throw ConfigError(std::string("no endpoint configured (set --endpoint or ") + kEndpointEnv + ")");
    }
    if (config_.api_key.empty()) throw ConfigError(std::string("missing credential ") + kApiKeyEnv);
    const auto scheme = config_.base_url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + config_.base_url);
    const auto path = config_.base_url.find('/', scheme + 3);
    origin_ = config_.base_url.substr(0, path);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (origin_.starts_with("https://")) throw ConfigError("built without TLS support: " + origin_);
#endif
    path_ = path == std::string::npos ? "" : config_.base_url.substr(path);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
  }

  std::string complete(const std::string& prompt) override {
    httplib::Client client(origin_);
    if (!client.is_valid()) throw TransportError("unsupported endpoint " + origin_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(config_.timeout);
    const httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
    auto res = client.Post(path_, headers, chat_request(config_, prompt).dump(), "application/json");
    if (!res) throw TransportError("transport: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status));
    return chat_reply_text(res->body);
  }

 private:
  EndpointConfig config_;
  std::string origin_;
  std::string path_;
};

// Serves canned completions keyed by exact prompt text. Prompts listed in
// `failing` always get HTTP 500; unknown prompts get a fixed refusal.
class MockChatServer {
 public:
  MockChatServer(std::map<std::string, std::string> responses, std::set<std::string> failing = {})
      : responses_(std::move(responses)), failing_(std::move(failing)) {
    server_.Post(R"(.*/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
  }

  // Canned responses from a store; stored text is unescaped first.
  static std::map<std::string, std::string> responses_from(const std::vector<ResponseRecord>& records) {
    std::map<std::string, std::string> out;
    for (const auto& r : records) out.emplace(tsv_unescape(r.prompt_text), tsv_unescape(r.response_text));
    return out;
  }

  ~MockChatServer() { stop(); }
  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  // Binds 127.0.0.1 (port 0 picks a free one) and serves on a thread.
  int start(int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port("127.0.0.1") : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
    if (port_ < 0) throw ConfigError("mock endpoint cannot bind port " + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Blocks in the calling thread.
  void serve(int port) {
    if (!server_.listen("127.0.0.1", port)) throw ConfigError("mock endpoint cannot bind port " + std::to_string(port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::size_t requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu_);
      ++requests_;
    }
    if (!req.get_header_value("Authorization").starts_with("Bearer ")) {
      res.status = 401;
      return;
    }
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    std::string prompt;
    try {
      prompt = body.at("messages").at(0).at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      return;
    }
    if (failing_.contains(prompt)) {
      res.status = 500;
      return;
    }
    const auto it = responses_.find(prompt);
    const std::string content = it == responses_.end() ? "I have no answer for that prompt." : it->second;
    const nlohmann::json reply = {
        {"object", "chat.completion"},
        {"model", body.value("model", "")},
        {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}, {"finish_reason", "stop"}}}}};
    res.set_content(reply.dump(), "application/json");
  }

  std::map<std::string, std::string> responses_;
  std::set<std::string> failing_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  mutable std::mutex mu_;
  std::size_t requests_ = 0;
};

struct Clock {
  std::function<std::chrono::steady_clock::time_point()> now = [] { return std::chrono::steady_clock::now(); };
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

// Shared token bucket; acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst, Clock clock)
      : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(burst_), clock_(std::move(clock)),
        last_(clock_.now()) {}

  void acquire() {
    if (rate_ <= 0) return;
    for (;;) {
      std::chrono::milliseconds wait{0};
      {
        std::lock_guard lock(mu_);
        const auto now = clock_.now();
        tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
          tokens_ -= 1.0;
          return;
        }
        wait = std::chrono::milliseconds(static_cast<long>((1.0 - tokens_) / rate_ * 1000.0) + 1);
      }
      clock_.sleep(wait);
    }
  }

 private:
  double rate_;
  double burst_;
  double tokens_;
  Clock clock_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

struct CollectOptions {
  std::size_t max_in_flight = 4;
  double requests_per_second = 2.0;
  double burst = 4.0;
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
  std::string model_id;
  Clock clock;
  std::function<std::string()> timestamp = [] { return utc_timestamp(std::chrono::system_clock::now()); };
};

struct CollectFailure {
  std::string id;  // noun/prompt-key
  std::string error;
  int attempts = 0;
};

struct CollectSummary {
  std::size_t pending = 0;  // records missing before the run
  std::size_t written = 0;
  std::size_t skipped_existing = 0;
  std::size_t requests = 0;
  std::vector<CollectFailure> failures;  // sorted by id
};

struct CollectJob {
  const NounEntry* noun;
  ExpandedPrompt prompt;
};

// Issues one request per (noun, prompt) missing from the store and appends
// each answer. Failed requests back off exponentially; a key that exhausts
// its attempts is listed in the summary and left for the next run.
inline CollectSummary collect(const std::vector<NounEntry>& nouns, const std::vector<PromptTemplate>& templates,
                              const std::filesystem::path& store_path, ChatEndpoint& endpoint,
                              const CollectOptions& options = {}) {
  if (options.max_attempts < 1) throw ConfigError("max attempts must be >= 1");
  std::set<std::string> present;
  if (std::filesystem::exists(store_path)) {
    for (const auto& r : load_store(store_path).records) present.insert(r.id());
  }

  CollectSummary summary;
  std::vector<CollectJob> jobs;
  for (const auto& noun : nouns) {
    for (auto& p : expand_prompts(noun, templates)) {
      if (present.contains(noun.slug + "/" + p.key.str())) {
        ++summary.skipped_existing;
      } else {
        jobs.push_back({&noun, std::move(p)});
      }
    }
  }
  summary.pending = jobs.size();
  if (jobs.empty()) return summary;

  StoreWriter writer(store_path);
  TokenBucket bucket(options.requests_per_second, options.burst, options.clock);
  std::mutex mu;
  parallel_for(jobs.size(), options.max_in_flight, [&](std::size_t i) {
    const auto& job = jobs[i];
    const std::string id = job.noun->slug + "/" + job.prompt.key.str();
    auto backoff = options.initial_backoff;
    std::string error;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
      bucket.acquire();
      {
        std::lock_guard lock(mu);
        ++summary.requests;
      }
      try {
        const std::string reply = endpoint.complete(job.prompt.text);
        writer.append(ResponseRecord::from_raw(job.noun->slug, job.prompt.key, job.prompt.text, reply,
                                               options.model_id, options.timestamp()));
        std::lock_guard lock(mu);
        ++summary.written;
        return;
      } catch (const TransportError& ex) {
        error = ex.what();
      }
      if (attempt < options.max_attempts) {
        options.clock.sleep(backoff);
        backoff = std::min(options.max_backoff, backoff * 2);
      }
    }
    std::lock_guard lock(mu);
    summary.failures.push_back({id, error, options.max_attempts});
  });
  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const CollectFailure& a, const CollectFailure& b) { return a.id < b.id; });
  return summary;
}

}  // namespace modlforge
