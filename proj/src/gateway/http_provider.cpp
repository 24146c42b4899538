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

#include "httplib.h"

#include "gateway/http_provider.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "core/json_io.hpp"
#include "gateway/mock_provider.hpp"

namespace paiqa::gateway {
namespace {

using nlohmann::json;

std::string base64(std::string_view data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(data.data()),
                                static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string mime_for(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  return "image/png";
}

std::string image_url(const std::string& uri) {
  if (uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0 ||
      uri.rfind("data:", 0) == 0) {
    return uri;
  }
  return "data:" + mime_for(uri) + ";base64," + base64(read_file(uri));
}

std::string normalize_token(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

json build_chat_body(const EndpointConfig& endpoint, const LmmRequest& request) {
  json messages = json::array();
  for (const Message& m : request.messages) {
    json content = json::array();
    for (const ContentPart& p : m.parts) {
      if (p.kind == ContentPart::Kind::Text) {
        content.push_back({{"type", "text"}, {"text", p.value}});
      } else {
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url(p.value)}}}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  json body{{"model", endpoint.model_name},
            {"messages", messages},
            {"max_tokens", request.max_tokens},
            {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  if (request.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = 20;
  }
  return body;
}

ProviderReply parse_chat_reply(const json& body, const LmmRequest& request) {
  ProviderReply reply;
  try {
    const json& choice = body.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    if (content.is_string()) {
      reply.text = content.get<std::string>();
    } else {
      for (const json& part : content) {
        if (part.value("type", "") == "text") reply.text += part.value("text", "");
      }
    }
    if (!request.want_logprobs) return reply;

    TokenLogprobs found;
    const auto lp = choice.find("logprobs");
    if (lp == choice.end() || lp->is_null()) return reply;
    for (const json& pos : lp->at("content")) {
      const std::string token = normalize_token(pos.at("token").get<std::string>());
      const bool is_keyword =
          std::any_of(request.target_tokens.begin(), request.target_tokens.end(),
                      [&](const std::string& kw) { return normalize_token(kw) == token; });
      if (!is_keyword) continue;
      // First generated position that is a level keyword.
      auto record = [&](const std::string& raw, double value) {
        const std::string t = normalize_token(raw);
        for (const std::string& kw : request.target_tokens) {
          if (normalize_token(kw) == t && !found.count(kw)) found[kw] = value;
        }
      };
      record(pos.at("token").get<std::string>(), pos.at("logprob").get<double>());
      if (auto top = pos.find("top_logprobs"); top != pos.end()) {
        for (const json& alt : *top) {
          record(alt.at("token").get<std::string>(), alt.at("logprob").get<double>());
        }
      }
      break;
    }
    reply.token_logprobs = std::move(found);
  } catch (const json::exception& e) {
    throw MalformedReplyError(std::string("unexpected chat reply shape: ") + e.what());
  }
  return reply;
}

ProviderReply HttpProvider::complete(const EndpointConfig& endpoint, const LmmRequest& request) {
  const SplitUrl url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::duration<double>(endpoint.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string body = build_chat_body(endpoint, request).dump();
  auto res = client.Post(url.path + "/chat/completions", headers, body, "application/json");
  if (!res) {
    throw TransientProviderError("transport error: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientProviderError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedReplyError("HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw MalformedReplyError(std::string("reply is not JSON: ") + e.what());
  }
  return parse_chat_reply(parsed, request);
}

std::shared_ptr<Provider> make_provider(const EndpointConfig& endpoint,
                                        const std::filesystem::path& base_dir) {
  if (endpoint.provider == "http") return std::make_shared<HttpProvider>();
  if (endpoint.provider != "mock") {
    throw ValidationError("endpoint '" + endpoint.id + "': unknown provider '" +
                          endpoint.provider + "'");
  }
  auto mock = std::make_shared<MockProvider>();
  const json& opts = endpoint.mock;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (opts.is_object()) {
    if (opts.contains("transcript")) mock->load_transcript(resolve(opts["transcript"]));
    if (opts.contains("canned_dir")) mock->load_directory(resolve(opts["canned_dir"]));
    if (opts.contains("script")) {
      for (const json& step : opts["script"]) {
        if (step.is_string()) {
          mock->push_script(MockProvider::ScriptStep::text(step.get<std::string>()));
        } else if (step.value("transient", false)) {
          mock->push_script(MockProvider::ScriptStep::transient());
        } else {
          mock->push_script(MockProvider::ScriptStep::text(step.at("text").get<std::string>()));
        }
      }
    }
    mock->set_synthetic(opts.value("synthetic", true));
  } else {
    mock->set_synthetic(true);
  }
  return mock;
}

}  // namespace paiqa::gateway
