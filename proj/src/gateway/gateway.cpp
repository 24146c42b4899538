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

#include "gateway/gateway.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <random>
#include <thread>

#include "core/hash.hpp"
#include "core/model.hpp"

namespace paiqa::gateway {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::array<std::pair<LmmRole, std::string_view>, 8> kRoleNames = {{
    {LmmRole::SubjectRecognizer, "SubjectRecognizer"},
    {LmmRole::PromptWriter, "PromptWriter"},
    {LmmRole::PromptCleaner, "PromptCleaner"},
    {LmmRole::Scrutineer, "Scrutineer"},
    {LmmRole::CotAnnotator, "CotAnnotator"},
    {LmmRole::CotScrutinizer, "CotScrutinizer"},
    {LmmRole::Judge, "Judge"},
    {LmmRole::ScoredModel, "ScoredModel"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

json canonical(const LmmRequest& r) {
  json messages = json::array();
  for (const Message& m : r.messages) {
    json parts = json::array();
    for (const ContentPart& p : m.parts) {
      parts.push_back({{"kind", p.kind == ContentPart::Kind::Text ? "text" : "image"},
                       {"value", p.value}});
    }
    messages.push_back({{"role", m.role}, {"parts", parts}});
  }
  json j{{"role", to_string(r.role)},
         {"messages", messages},
         {"want_logprobs", r.want_logprobs},
         {"target_tokens", r.target_tokens},
         {"max_tokens", r.max_tokens},
         {"temperature", r.temperature}};
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

}  // namespace

std::string_view to_string(LmmRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "?";
}

LmmRole parse_role(std::string_view name) {
  for (const auto& [r, text] : kRoleNames) {
    if (text == name) return r;
  }
  throw ValidationError("unknown LMM role '" + std::string(name) + "'");
}

LmmRequest LmmRequest::user(LmmRole role, std::vector<ContentPart> parts) {
  LmmRequest r;
  r.role = role;
  r.messages.push_back(Message{"user", std::move(parts)});
  return r;
}

std::string LmmRequest::joined_text() const {
  std::string out;
  for (const Message& m : messages) {
    for (const ContentPart& p : m.parts) {
      if (p.kind != ContentPart::Kind::Text) continue;
      if (!out.empty()) out += '\n';
      out += p.value;
    }
  }
  return out;
}

std::vector<std::string> LmmRequest::image_uris() const {
  std::vector<std::string> out;
  for (const Message& m : messages) {
    for (const ContentPart& p : m.parts) {
      if (p.kind == ContentPart::Kind::Image) out.push_back(p.value);
    }
  }
  return out;
}

std::vector<ContentPart> interleave(std::string_view text, const std::vector<std::string>& images) {
  constexpr std::string_view kMarker = "<image>";
  std::vector<ContentPart> parts;
  std::size_t used = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t at = text.find(kMarker, pos);
    const std::string_view chunk = text.substr(pos, at == std::string_view::npos ? at : at - pos);
    if (!chunk.empty()) parts.push_back(ContentPart::text(std::string(chunk)));
    if (at == std::string_view::npos) break;
    if (used >= images.size()) throw ValidationError("template has more image markers than images");
    parts.push_back(ContentPart::image(images[used++]));
    pos = at + kMarker.size();
  }
  if (used != images.size()) throw ValidationError("template has fewer image markers than images");
  return parts;
}

std::string request_hash(const LmmRequest& request) {
  return sha256_hex(canonical(request).dump());
}

bool EndpointConfig::serves(LmmRole role) const {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

void to_json(json& j, const EndpointConfig& c) {
  json roles = json::array();
  for (LmmRole r : c.roles) roles.push_back(to_string(r));
  j = json{{"id", c.id},
           {"roles", roles},
           {"provider", c.provider},
           {"base_url", c.base_url},
           {"model_name", c.model_name},
           {"rpm_limit", c.rpm_limit},
           {"supports_logprobs", c.supports_logprobs},
           {"api_key_env", c.api_key_env},
           {"max_concurrency", c.max_concurrency},
           {"timeout_s", c.timeout_s}};
  if (!c.mock.is_null()) j["mock"] = c.mock;
}

void from_json(const json& j, EndpointConfig& c) {
  j.at("id").get_to(c.id);
  c.roles.clear();
  const json& roles = j.at("roles");
  if (roles.is_string()) {
    c.roles.push_back(parse_role(roles.get<std::string>()));
  } else {
    for (const json& r : roles) c.roles.push_back(parse_role(r.get<std::string>()));
  }
  c.provider = j.value("provider", "http");
  c.base_url = j.value("base_url", "");
  c.model_name = j.value("model_name", "");
  c.rpm_limit = j.value("rpm_limit", 0);
  c.supports_logprobs = j.value("supports_logprobs", false);
  c.api_key_env = j.value("api_key_env", "");
  c.max_concurrency = j.value("max_concurrency", 4);
  c.timeout_s = j.value("timeout_s", 120.0);
  c.mock = j.value("mock", json());
}

GatewayError::GatewayError(Kind kind, std::string endpoint_id, int attempts,
                           const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " [endpoint=" + endpoint_id +
                         ", attempts=" + std::to_string(attempts) + "]: " + detail),
      kind_(kind),
      endpoint_id_(std::move(endpoint_id)),
      attempts_(attempts) {}

std::string_view to_string(GatewayError::Kind kind) {
  switch (kind) {
    case GatewayError::Kind::ExhaustedRetries: return "ExhaustedRetries";
    case GatewayError::Kind::EndpointUnsupportedLogprobs: return "EndpointUnsupportedLogprobs";
    case GatewayError::Kind::MalformedProviderReply: return "MalformedProviderReply";
    case GatewayError::Kind::RoleNotConfigured: return "RoleNotConfigured";
    case GatewayError::Kind::PoolTooSmall: return "PoolTooSmall";
  }
  return "?";
}

struct Gateway::Slot {
  EndpointConfig config;
  std::shared_ptr<Provider> provider;
  std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;
  Clock::time_point next_allowed{};
};

Gateway::Gateway(std::vector<std::pair<EndpointConfig, std::shared_ptr<Provider>>> endpoints,
                 GatewayOptions options)
    : options_(std::move(options)) {
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!options_.now) options_.now = [] { return Clock::now(); };
  for (auto& [cfg, provider] : endpoints) {
    if (has_endpoint(cfg.id)) throw ValidationError("duplicate endpoint id '" + cfg.id + "'");
    if (!provider) throw ValidationError("endpoint '" + cfg.id + "' has no provider");
    auto slot = std::make_unique<Slot>();
    slot->config = std::move(cfg);
    slot->config.max_concurrency = std::max(1, slot->config.max_concurrency);
    slot->provider = std::move(provider);
    slots_.push_back(std::move(slot));
  }
}

Gateway::~Gateway() = default;

bool Gateway::has_endpoint(const std::string& id) const {
  return std::any_of(slots_.begin(), slots_.end(),
                     [&](const auto& s) { return s->config.id == id; });
}

const EndpointConfig& Gateway::endpoint(const std::string& id) const {
  for (const auto& s : slots_) {
    if (s->config.id == id) return s->config;
  }
  throw ValidationError("unknown endpoint id '" + id + "'");
}

Gateway::Slot& Gateway::slot_for(const std::string& id) {
  for (auto& s : slots_) {
    if (s->config.id == id) return *s;
  }
  throw ValidationError("unknown endpoint id '" + id + "'");
}

std::vector<std::string> Gateway::endpoints_for(LmmRole role) const {
  std::vector<std::string> out;
  for (const auto& s : slots_) {
    if (s->config.serves(role)) out.push_back(s->config.id);
  }
  return out;
}

LmmResponse Gateway::send(const LmmRequest& request) {
  const auto ids = endpoints_for(request.role);
  if (ids.empty()) {
    throw GatewayError(GatewayError::Kind::RoleNotConfigured, "", 0,
                       "no endpoint serves role " + std::string(to_string(request.role)));
  }
  const std::uint64_t h = derive_seed(0, request_hash(request));
  return dispatch(slot_for(ids[h % ids.size()]), request);
}

LmmResponse Gateway::send_to(const std::string& endpoint_id, const LmmRequest& request) {
  Slot& slot = slot_for(endpoint_id);
  if (!slot.config.serves(request.role)) {
    throw GatewayError(GatewayError::Kind::RoleNotConfigured, endpoint_id, 0,
                       "endpoint does not serve role " + std::string(to_string(request.role)));
  }
  return dispatch(slot, request);
}

LmmResponse Gateway::dispatch(Slot& slot, const LmmRequest& request) {
  const EndpointConfig& cfg = slot.config;
  if (request.want_logprobs) {
    if (request.target_tokens.size() != 5) {
      throw ValidationError("logprob requests need exactly 5 target tokens");
    }
    if (!cfg.supports_logprobs) {
      throw GatewayError(GatewayError::Kind::EndpointUnsupportedLogprobs, cfg.id, 0,
                         "endpoint cannot return token logprobs");
    }
  }

  for (int attempt = 1;; ++attempt) {
    {
      std::unique_lock lock(slot.mu);
      slot.cv.wait(lock, [&] { return slot.in_flight < cfg.max_concurrency; });
      ++slot.in_flight;
      if (cfg.rpm_limit > 0) {
        const auto interval = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(60.0 / cfg.rpm_limit));
        const auto now = options_.now();
        const auto start = std::max(now, slot.next_allowed);
        slot.next_allowed = start + interval;
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(start - now);
        if (wait.count() > 0) {
          lock.unlock();
          options_.sleep(wait);
        }
      }
    }
    auto release = [&] {
      std::lock_guard lock(slot.mu);
      --slot.in_flight;
      slot.cv.notify_one();
    };

    const auto t0 = options_.now();
    ProviderReply reply;
    try {
      reply = slot.provider->complete(cfg, request);
    } catch (const TransientProviderError& e) {
      release();
      if (attempt >= options_.max_attempts) {
        throw GatewayError(GatewayError::Kind::ExhaustedRetries, cfg.id, attempt, e.what());
      }
      const double factor = std::pow(options_.backoff_factor, attempt - 1);
      const auto delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(options_.base_backoff.count() * factor)));
      spdlog::debug("endpoint {} transient failure (attempt {}): {}; retrying in {} ms", cfg.id,
                    attempt, e.what(), delay.count());
      options_.sleep(delay);
      continue;
    } catch (const MalformedReplyError& e) {
      release();
      throw GatewayError(GatewayError::Kind::MalformedProviderReply, cfg.id, attempt, e.what());
    } catch (...) {
      release();
      throw;
    }
    release();

    LmmResponse response;
    response.text = std::move(reply.text);
    response.endpoint_id = cfg.id;
    response.attempts = attempt;
    response.latency_ms = std::max<std::int64_t>(
        0, std::chrono::duration_cast<std::chrono::milliseconds>(options_.now() - t0).count());
    if (request.want_logprobs) {
      if (!reply.token_logprobs) {
        throw GatewayError(GatewayError::Kind::MalformedProviderReply, cfg.id, attempt,
                           "logprobs requested but none returned");
      }
      TokenLogprobs normalized;
      for (const std::string& kw : request.target_tokens) {
        auto it = std::find_if(reply.token_logprobs->begin(), reply.token_logprobs->end(),
                               [&](const auto& kv) { return lower(kv.first) == lower(kw); });
        if (it == reply.token_logprobs->end()) {
          spdlog::warn("endpoint {} reported no logprob for '{}'; using {}", cfg.id, kw,
                       kMissingKeywordLogprob);
          normalized[kw] = kMissingKeywordLogprob;
        } else {
          normalized[kw] = it->second;
        }
      }
      response.token_logprobs = std::move(normalized);
    }

    std::lock_guard lock(transcript_mu_);
    if (transcript_on_) {
      const std::string h = request_hash(request);
      transcript_[h] = TranscriptEntry{h, cfg.id, std::string(to_string(request.role)),
                                       response.text, response.token_logprobs};
    }
    return response;
  }
}

std::vector<Gateway::BatchResult> Gateway::send_batch(const std::vector<BatchItem>& items,
                                                      int parallelism) {
  std::vector<BatchResult> results(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        const BatchItem& item = items[i];
        results[i] = item.endpoint_id.empty() ? send(item.request)
                                              : send_to(item.endpoint_id, item.request);
      } catch (...) {
        results[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(parallelism, 1, static_cast<int>(std::max<std::size_t>(1, items.size())));
  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(n - 1));
    for (int t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
  }
  return results;
}

void Gateway::enable_transcript(bool on) {
  std::lock_guard lock(transcript_mu_);
  transcript_on_ = on;
}

std::vector<TranscriptEntry> Gateway::transcript() const {
  std::lock_guard lock(transcript_mu_);
  std::vector<TranscriptEntry> out;
  out.reserve(transcript_.size());
  for (const auto& [h, e] : transcript_) out.push_back(e);
  return out;
}

AnnotatorChoice pick_annotator(const std::vector<std::string>& pool, std::uint64_t rng_seed,
                               std::string_view sample_id) {
  if (pool.size() < 3) {
    throw GatewayError(GatewayError::Kind::PoolTooSmall, "", 0,
                       "annotator pool needs at least 3 endpoints, has " +
                           std::to_string(pool.size()));
  }
  std::mt19937_64 rng(derive_seed(rng_seed, sample_id));
  const std::size_t chosen = static_cast<std::size_t>(uniform_below(rng, pool.size()));
  AnnotatorChoice out;
  out.annotator = pool[chosen];
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i != chosen) out.scrutinizers.push_back(pool[i]);
  }
  return out;
}

void to_json(json& j, const TranscriptEntry& e) {
  j = json{{"request_hash", e.request_hash},
           {"endpoint_id", e.endpoint_id},
           {"role", e.role},
           {"text", e.text}};
  j["token_logprobs"] = e.token_logprobs ? json(*e.token_logprobs) : json(nullptr);
}

void from_json(const json& j, TranscriptEntry& e) {
  j.at("request_hash").get_to(e.request_hash);
  e.endpoint_id = j.value("endpoint_id", "");
  e.role = j.value("role", "");
  j.at("text").get_to(e.text);
  auto it = j.find("token_logprobs");
  if (it != j.end() && !it->is_null()) {
    e.token_logprobs = it->get<TokenLogprobs>();
  } else {
    e.token_logprobs.reset();
  }
}

}  // namespace paiqa::gateway
