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

#ifndef PAIQA_GATEWAY_HTTP_PROVIDER_HPP_
#define PAIQA_GATEWAY_HTTP_PROVIDER_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "gateway/gateway.hpp"

namespace paiqa::gateway {

// Chat-completions client. `base_url` is e.g. "https://api.example.com/v1";
// requests go to "<base_url>/chat/completions". Local image URIs are inlined
// as base64 data URLs, http(s) URIs are passed through.
class HttpProvider : public Provider {
 public:
  ProviderReply complete(const EndpointConfig& endpoint, const LmmRequest& request) override;
};

// Exposed for tests.
nlohmann::json build_chat_body(const EndpointConfig& endpoint, const LmmRequest& request);
ProviderReply parse_chat_reply(const nlohmann::json& body, const LmmRequest& request);

// Builds the provider named by endpoint.provider. Relative mock paths are
// resolved against `base_dir`.
std::shared_ptr<Provider> make_provider(const EndpointConfig& endpoint,
                                        const std::filesystem::path& base_dir);

}  // namespace paiqa::gateway

#endif  // PAIQA_GATEWAY_HTTP_PROVIDER_HPP_
