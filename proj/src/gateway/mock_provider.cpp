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

#include "gateway/mock_provider.hpp"

#include <array>
#include <cmath>
#include <thread>

#include "core/hash.hpp"
#include "core/json_io.hpp"

namespace paiqa::gateway {

void MockProvider::add_canned(const std::string& hash, ProviderReply reply) {
  std::lock_guard lock(mu_);
  canned_[hash] = std::move(reply);
}

void MockProvider::load_transcript(const std::filesystem::path& path) {
  for (const json& j : read_jsonl(path)) {
    const auto e = j.get<TranscriptEntry>();
    add_canned(e.request_hash, ProviderReply{e.text, e.token_logprobs});
  }
}

void MockProvider::load_directory(const std::filesystem::path& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    const std::string hash = p.stem().string();
    if (p.extension() == ".txt") {
      add_canned(hash, ProviderReply{read_file(p), std::nullopt});
    } else if (p.extension() == ".json") {
      const json j = json::parse(read_file(p));
      ProviderReply reply{j.at("text").get<std::string>(), std::nullopt};
      if (auto it = j.find("token_logprobs"); it != j.end() && !it->is_null()) {
        reply.token_logprobs = it->get<TokenLogprobs>();
      }
      add_canned(hash, std::move(reply));
    }
  }
}

void MockProvider::push_script(ScriptStep step) {
  std::lock_guard lock(mu_);
  script_.push_back(std::move(step));
}

void MockProvider::set_responder(Responder responder) {
  std::lock_guard lock(mu_);
  responder_ = std::move(responder);
}

ProviderReply MockProvider::complete(const EndpointConfig& endpoint, const LmmRequest& request) {
  ++calls_;
  const int now_in_flight = ++in_flight_;
  int seen = max_concurrent_.load();
  while (now_in_flight > seen && !max_concurrent_.compare_exchange_weak(seen, now_in_flight)) {
  }
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { --n; }
  } leave{in_flight_};
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

  const std::string hash = request_hash(request);
  std::optional<ScriptStep> step;
  Responder responder;
  {
    std::lock_guard lock(mu_);
    if (auto it = canned_.find(hash); it != canned_.end()) return it->second;
    if (!script_.empty()) {
      step = std::move(script_.front());
      script_.pop_front();
    }
    responder = responder_;
  }
  if (step) {
    switch (step->kind) {
      case ScriptStep::Kind::Reply: return step->reply;
      case ScriptStep::Kind::Transient: throw TransientProviderError(step->message);
      case ScriptStep::Kind::Malformed: throw MalformedReplyError(step->message);
    }
  }
  if (responder) {
    if (auto reply = responder(endpoint, request)) return *reply;
  }
  if (synthetic_) return synthetic_reply(endpoint, request);
  throw MalformedReplyError("mock has no canned reply for request " + hash);
}

namespace {

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

// Uniform in [0,1) from a derived seed.
double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

std::string between(const std::string& text, std::string_view open, std::string_view close) {
  const auto a = text.find(open);
  if (a == std::string::npos) return {};
  const auto start = a + open.size();
  const auto b = text.find(close, start);
  return text.substr(start, b == std::string::npos ? std::string::npos : b - start);
}

constexpr std::array<std::string_view, 6> kNouns = {"a cat", "a fox", "a rabbit",
                                                    "a lamb", "a puppy", "a tiger"};
constexpr std::array<std::string_view, 6> kActions = {
    "Replace the dog with a cat.",        "Turn the dog into a porcelain statue.",
    "Make the dog wear a red scarf.",     "Change the dog into a watercolor painting.",
    "Give the dog golden fur.",           "Make the dog look like a plush toy."};
constexpr std::array<std::string_view, 4> kLowCot = {
    "The edited region has blurred textures and warped contours. Its lighting does not match the "
    "rest of the scene.",
    "Visible seams surround the edited object. Its colors clash with the surrounding area.",
    "The object's shape is distorted and parts of it are missing.",
    "The edit leaves smeared artifacts. The perspective of the object is inconsistent."};
constexpr std::array<std::string_view, 4> kHighCot = {
    "The edited object blends smoothly with its surroundings. Lighting and shadows are "
    "consistent.",
    "Textures in the edited area look realistic and sharp.",
    "The boundary of the edit is invisible and the object keeps a plausible shape.",
    "Colors and perspective match the original scene well."};
constexpr std::array<std::string_view, 3> kPcCot = {
    "The requested object change is not visible in the edited image.",
    "The edit changes the color but leaves the requested shape unchanged.",
    "The edited image shows exactly the change the prompt asks for."};

}  // namespace

ProviderReply synthetic_reply(const EndpointConfig& endpoint, const LmmRequest& request) {
  const std::string hash = request_hash(request);
  const std::uint64_t h = derive_seed(0, hash);
  const std::string text = request.joined_text();
  const double u = unit(h);
  switch (request.role) {
    case LmmRole::SubjectRecognizer:
      if (u < 0.04) return {"light|1", {}};
      if (u < 0.08) return {"dog|2", {}};
      return {"dog|1", {}};
    case LmmRole::PromptWriter:
      if (u < 0.03) return {"Replace the dog in the box with a cat.", {}};
      if (contains(text, "in the form of a noun")) return {std::string(kNouns[h % kNouns.size()]), {}};
      return {std::string(kActions[h % kActions.size()]), {}};
    case LmmRole::PromptCleaner:
      return {between(text, "editing prompt: ", ", which is used to edit"), {}};
    case LmmRole::Scrutineer:
    case LmmRole::CotScrutinizer:
      return {u < 0.04 ? "no" : "yes", {}};
    case LmmRole::CotAnnotator: {
      if (u < 0.03) return {"First sentence. Second sentence. Third sentence.", {}};
      if (contains(text, "following prompt")) return {std::string(kPcCot[h % kPcCot.size()]), {}};
      if (contains(text, "lower degree")) return {std::string(kLowCot[h % kLowCot.size()]), {}};
      return {std::string(kHighCot[h % kHighCot.size()]), {}};
    }
    case LmmRole::Judge: {
      const bool full = contains(text, "\nLNA: ");
      auto score = [&](std::uint64_t k) { return std::to_string(derive_seed(h, "judge", k) % 3); };
      std::string reply = "PA: " + score(0) + "\n";
      if (full) reply += "LNA: " + score(1) + "\nGHA: " + score(2) + "\n";
      reply += "Overall: " + score(3);
      return {reply, {}};
    }
    case LmmRole::ScoredModel: {
      std::array<double, 5> logits{};
      double max = -1e300;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < 5; ++i) {
        logits[i] = 4.0 * unit(derive_seed(h, "logit", i));
        if (logits[i] > max) {
          max = logits[i];
          arg = i;
        }
      }
      ProviderReply reply{std::string(request.target_tokens.size() == 5
                                          ? request.target_tokens[arg]
                                          : std::string("fair")),
                          std::nullopt};
      if (request.want_logprobs && endpoint.supports_logprobs) {
        double norm = 0.0;
        for (double l : logits) norm += std::exp(l - max);
        TokenLogprobs lp;
        for (std::size_t i = 0; i < 5; ++i) {
          lp[request.target_tokens[i]] = logits[i] - max - std::log(norm);
        }
        reply.token_logprobs = std::move(lp);
      }
      return reply;
    }
  }
  throw MalformedReplyError("synthetic responder has no rule for this role");
}

}  // namespace paiqa::gateway
