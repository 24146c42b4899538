// Copyright 2026 The PAIQA Toolkit Authors.
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

// Provider-agnostic client for large-multimodal-model calls.
//
// Every request names a role; the gateway only ever routes it to an endpoint
// configured for that role. Transient provider failures are retried with
// exponential backoff, each endpoint has a requests-per-minute budget and a
// cap on in-flight requests, and successful calls can be recorded into a
// transcript keyed by request hash so an offline run can replay them.

#ifndef PAIQA_GATEWAY_GATEWAY_HPP_
#define PAIQA_GATEWAY_GATEWAY_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace paiqa::gateway {

enum class LmmRole {
  SubjectRecognizer,
  PromptWriter,
  PromptCleaner,
  Scrutineer,
  CotAnnotator,
  CotScrutinizer,
  Judge,
  ScoredModel
};

std::string_view to_string(LmmRole role);
LmmRole parse_role(std::string_view name);

struct ContentPart {
  enum class Kind { Text, Image };
  Kind kind = Kind::Text;
  std::string value;  // text, or image URI

  static ContentPart text(std::string t) { return {Kind::Text, std::move(t)}; }
  static ContentPart image(std::string uri) { return {Kind::Image, std::move(uri)}; }
};

struct Message {
  std::string role = "user";
  std::vector<ContentPart> parts;
};

struct LmmRequest {
  LmmRole role = LmmRole::Judge;
  std::vector<Message> messages;
  bool want_logprobs = false;
  std::vector<std::string> target_tokens;  // exactly 5 level keywords when want_logprobs
  int max_tokens = 256;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;

  // Single user message with the given parts in order.
  static LmmRequest user(LmmRole role, std::vector<ContentPart> parts);
  // Concatenated text parts, for matching and logging.
  std::string joined_text() const;
  std::vector<std::string> image_uris() const;
};

// Splits `text` on "<image>" markers and interleaves the given image URIs.
// The marker count must equal images.size().
std::vector<ContentPart> interleave(std::string_view text, const std::vector<std::string>& images);

// Hex SHA-256 of the canonical request encoding. Stable across runs.
std::string request_hash(const LmmRequest& request);

using TokenLogprobs = std::map<std::string, double>;

struct LmmResponse {
  std::string text;
  std::optional<TokenLogprobs> token_logprobs;
  std::string endpoint_id;
  std::int64_t latency_ms = 0;
  int attempts = 0;
};

struct EndpointConfig {
  std::string id;
  std::vector<LmmRole> roles;
  std::string provider = "http";  // "http" or "mock"
  std::string base_url;
  std::string model_name;
  int rpm_limit = 0;  // 0 = unlimited
  bool supports_logprobs = false;
  std::string api_key_env;
  int max_concurrency = 4;
  double timeout_s = 120.0;
  nlohmann::json mock;  // provider-specific options for "mock"

  bool serves(LmmRole role) const;
};

void to_json(nlohmann::json& j, const EndpointConfig& c);
void from_json(const nlohmann::json& j, EndpointConfig& c);

class GatewayError : public std::runtime_error {
 public:
  enum class Kind {
    ExhaustedRetries,
    EndpointUnsupportedLogprobs,
    MalformedProviderReply,
    RoleNotConfigured,
    PoolTooSmall,
  };
  GatewayError(Kind kind, std::string endpoint_id, int attempts, const std::string& detail);

  Kind kind() const { return kind_; }
  const std::string& endpoint_id() const { return endpoint_id_; }
  int attempts() const { return attempts_; }

 private:
  Kind kind_;
  std::string endpoint_id_;
  int attempts_;
};

std::string_view to_string(GatewayError::Kind kind);

// Retryable failure (timeouts, 429, 5xx). Providers throw this; the gateway
// decides whether to retry.
class TransientProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-retryable: the provider answered but the answer cannot be used.
class MalformedReplyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProviderReply {
  std::string text;
  std::optional<TokenLogprobs> token_logprobs;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderReply complete(const EndpointConfig& endpoint, const LmmRequest& request) = 0;
};

struct GatewayOptions {
  int max_attempts = 5;
  std::chrono::milliseconds base_backoff{1000};
  double backoff_factor = 2.0;
  // Injectable for tests; default to the real clock.
  std::function<void(std::chrono::milliseconds)> sleep;
  std::function<std::chrono::steady_clock::time_point()> now;
};

// Logprob assigned to a level keyword the provider did not report.
inline constexpr double kMissingKeywordLogprob = -30.0;

struct TranscriptEntry {
  std::string request_hash;
  std::string endpoint_id;
  std::string role;
  std::string text;
  std::optional<TokenLogprobs> token_logprobs;
};

class Gateway {
 public:
  Gateway(std::vector<std::pair<EndpointConfig, std::shared_ptr<Provider>>> endpoints,
          GatewayOptions options = {});
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Routes to one of the role's endpoints, chosen by request hash.
  LmmResponse send(const LmmRequest& request);
  // Routes to a named endpoint; it must serve the request's role.
  LmmResponse send_to(const std::string& endpoint_id, const LmmRequest& request);

  struct BatchItem {
    std::string endpoint_id;  // empty = route by role
    LmmRequest request;
  };
  using BatchResult = std::variant<LmmResponse, std::exception_ptr>;
  // Results are index-aligned with `items`; completion order is arbitrary.
  std::vector<BatchResult> send_batch(const std::vector<BatchItem>& items, int parallelism);

  std::vector<std::string> endpoints_for(LmmRole role) const;
  const EndpointConfig& endpoint(const std::string& id) const;
  bool has_endpoint(const std::string& id) const;

  void enable_transcript(bool on);
  // Sorted by request hash so the file is independent of completion order.
  std::vector<TranscriptEntry> transcript() const;

 private:
  struct Slot;
  LmmResponse dispatch(Slot& slot, const LmmRequest& request);
  Slot& slot_for(const std::string& id);

  std::vector<std::unique_ptr<Slot>> slots_;
  GatewayOptions options_;
  mutable std::mutex transcript_mu_;
  bool transcript_on_ = false;
  std::map<std::string, TranscriptEntry> transcript_;
};

struct AnnotatorChoice {
  std::string annotator;
  std::vector<std::string> scrutinizers;
};

// Uniform seeded pick keyed on (seed, sample_id); scrutinizers are the rest
// of the pool in pool order. Throws GatewayError(PoolTooSmall) below 3.
AnnotatorChoice pick_annotator(const std::vector<std::string>& pool, std::uint64_t rng_seed,
                               std::string_view sample_id);

void to_json(nlohmann::json& j, const TranscriptEntry& e);
void from_json(const nlohmann::json& j, TranscriptEntry& e);

}  // namespace paiqa::gateway

#endif  // PAIQA_GATEWAY_GATEWAY_HPP_
