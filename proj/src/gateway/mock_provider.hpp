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

#ifndef PAIQA_GATEWAY_MOCK_PROVIDER_HPP_
#define PAIQA_GATEWAY_MOCK_PROVIDER_HPP_

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "gateway/gateway.hpp"

namespace paiqa::gateway {

// Offline provider. Lookup order for each request:
//   1. canned reply keyed by request hash (transcript file or directory),
//   2. the next scripted step, if any remain,
//   3. the responder callback,
//   4. the synthetic responder, when enabled.
// Anything else is a MalformedReplyError naming the request hash.
class MockProvider : public Provider {
 public:
  struct ScriptStep {
    enum class Kind { Reply, Transient, Malformed };
    Kind kind = Kind::Reply;
    ProviderReply reply;
    std::string message;

    static ScriptStep text(std::string t) { return {Kind::Reply, {std::move(t), {}}, {}}; }
    static ScriptStep transient(std::string m = "injected transient failure") {
      return {Kind::Transient, {}, std::move(m)};
    }
    static ScriptStep malformed(std::string m = "injected malformed reply") {
      return {Kind::Malformed, {}, std::move(m)};
    }
  };
  using Responder =
      std::function<std::optional<ProviderReply>(const EndpointConfig&, const LmmRequest&)>;

  void add_canned(const std::string& hash, ProviderReply reply);
  // JSONL of TranscriptEntry records.
  void load_transcript(const std::filesystem::path& path);
  // Files named <hash>.txt (plain text) or <hash>.json ({text, token_logprobs}).
  void load_directory(const std::filesystem::path& dir);
  void push_script(ScriptStep step);
  void set_responder(Responder responder);
  void set_synthetic(bool on) { synthetic_ = on; }
  // Simulated service time; lets tests observe overlapping calls.
  void set_delay(std::chrono::milliseconds d) { delay_ = d; }

  ProviderReply complete(const EndpointConfig& endpoint, const LmmRequest& request) override;

  int calls() const { return calls_.load(); }
  int max_concurrent() const { return max_concurrent_.load(); }

 private:
  std::mutex mu_;
  std::map<std::string, ProviderReply> canned_;
  std::deque<ScriptStep> script_;
  Responder responder_;
  bool synthetic_ = false;
  std::chrono::milliseconds delay_{0};
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_concurrent_{0};
};

// Deterministic stand-in for every role, derived from the request content
// alone. Used by offline pipeline runs and the synthetic corpus tests.
ProviderReply synthetic_reply(const EndpointConfig& endpoint, const LmmRequest& request);

}  // namespace paiqa::gateway

#endif  // PAIQA_GATEWAY_MOCK_PROVIDER_HPP_
