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

#include "rating/http.hpp"

#include <spdlog/spdlog.h>

#include "core/image.hpp"
#include "core/json_io.hpp"

namespace paiqa::rating {

using nlohmann::json;

int http_status_for(RatingError::Kind kind) {
  switch (kind) {
    case RatingError::Kind::UnknownRater:
    case RatingError::Kind::UnknownSample: return 404;
    case RatingError::Kind::NoOpenAssignment:
    case RatingError::Kind::DuplicateSubmission: return 409;
    case RatingError::Kind::ProtocolViolation: return 422;
    case RatingError::Kind::InvalidRecord: return 400;
  }
  return 500;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, RatingError::Kind kind, const std::string& message) {
  send_json(res, http_status_for(kind), {{"error", to_string(kind)}, {"message", message}});
}

// Runs `fn`, mapping exceptions onto error replies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const RatingError& e) {
    send_error(res, e.kind(), e.what());
  } catch (const json::exception& e) {
    send_error(res, RatingError::Kind::InvalidRecord, e.what());
  } catch (const ValidationError& e) {
    send_error(res, RatingError::Kind::InvalidRecord, e.what());
  } catch (const std::exception& e) {
    spdlog::error("rating server: {}", e.what());
    send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
  }
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& uri) {
  std::filesystem::path p(uri);
  return p.is_absolute() || root.empty() ? p : root / p;
}

}  // namespace

struct RatingServer::Impl {
  RatingService& service;
  std::filesystem::path asset_root;
  httplib::Server server;

  Impl(RatingService& s, std::filesystem::path root) : service(s), asset_root(std::move(root)) {
    server.Post("/raters", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = json::parse(req.body).at("rater_id").get<std::string>();
        service.register_rater(id);
        send_json(res, 201, {{"rater_id", id}});
      });
    });
    server.Get("/assignments/next", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (!req.has_param("rater_id")) {
          throw RatingError(RatingError::Kind::InvalidRecord, "rater_id query parameter required");
        }
        const auto a = service.next_assignment(req.get_param_value("rater_id"));
        if (a) {
          send_json(res, 200, json(*a));
        } else {
          res.status = 204;
        }
      });
    });
    server.Post("/ratings", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body = json::parse(req.body);
        body.erase("schema_version");
        const RatingRecord stored = service.submit_rating(body.get<RatingRecord>());
        send_json(res, 201, json(stored));
      });
    });
    server.Post("/exclusions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = json::parse(req.body);
        const RatingRecord stored = service.flag_exclusion(
            body.at("rater_id").get<std::string>(), body.at("sample_id").get<std::string>(),
            parse_exclusion_reason(body.at("reason").get<std::string>()));
        send_json(res, 201, json(stored));
      });
    });
    server.Get("/export/ratings", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        res.set_content(export_jsonl(service.export_ratings()), "application/x-ndjson");
      });
    });
    server.Get(R"(/samples/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, json(service.sample(req.matches[1]))); });
    });
    server.Get(R"(/samples/([^/]+)/status)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { send_json(res, 200, json(service.status(req.matches[1]))); });
               });
    server.Get(R"(/samples/([^/]+)/images/(source|edited|boxed))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { serve_image(req.matches[1], req.matches[2], res); });
               });
  }

  void serve_image(const std::string& id, const std::string& kind, httplib::Response& res) {
    const EditSample& s = service.sample(id);
    if (kind == "source") {
      res.set_content(read_file(resolve(asset_root, s.source.uri)), "image/png");
      return;
    }
    if (kind == "edited") {
      res.set_content(read_file(resolve(asset_root, s.edited_uri)), "image/png");
      return;
    }
    Image img = read_png(resolve(asset_root, s.edited_uri));
    img.draw_outline(s.bbox, Rgb{255, 0, 0});
    res.set_content(encode_png(img), "image/png");
  }
};

RatingServer::RatingServer(RatingService& service, std::filesystem::path asset_root)
    : impl_(std::make_unique<Impl>(service, std::move(asset_root))) {}

RatingServer::~RatingServer() { stop(); }

int RatingServer::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

int RatingServer::bind_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool RatingServer::serve() { return impl_->server.listen_after_bind(); }

void RatingServer::stop() {
  if (impl_) impl_->server.stop();
}

void RatingServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

struct HttpRatingClient::Impl {
  httplib::Client client;
  explicit Impl(const std::string& url) : client(url) {
    client.set_keep_alive(true);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(std::chrono::seconds(30));
  }

  // Throws RatingError for API errors, DataError for transport problems.
  static void check(const httplib::Result& res, const std::string& what) {
    if (!res) throw DataError(what + ": " + httplib::to_string(res.error()));
    if (res->status < 400) return;
    json body;
    try {
      body = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw DataError(what + ": HTTP " + std::to_string(res->status));
    }
    const std::string kind = body.value("error", "");
    const std::string message = body.value("message", "");
    try {
      throw RatingError(parse_rating_error_kind(kind), message);
    } catch (const ValidationError&) {
      throw DataError(what + ": HTTP " + std::to_string(res->status) + ": " + message);
    }
  }
};

HttpRatingClient::HttpRatingClient(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)) {}

HttpRatingClient::~HttpRatingClient() = default;

void HttpRatingClient::register_rater(const std::string& rater_id) {
  auto res = impl_->client.Post("/raters", json{{"rater_id", rater_id}}.dump(), "application/json");
  Impl::check(res, "register rater");
}

std::optional<Assignment> HttpRatingClient::next_assignment(const std::string& rater_id) {
  auto res = impl_->client.Get("/assignments/next", httplib::Params{{"rater_id", rater_id}},
                               httplib::Headers{});
  Impl::check(res, "next assignment");
  if (res->status == 204) return std::nullopt;
  return json::parse(res->body).get<Assignment>();
}

RatingRecord HttpRatingClient::submit_rating(const RatingRecord& record) {
  auto res = impl_->client.Post("/ratings", json(record).dump(), "application/json");
  Impl::check(res, "submit rating");
  return json::parse(res->body).get<RatingRecord>();
}

RatingRecord HttpRatingClient::flag_exclusion(const std::string& rater_id,
                                              const std::string& sample_id,
                                              ExclusionReason reason) {
  const json body{{"rater_id", rater_id}, {"sample_id", sample_id}, {"reason", to_string(reason)}};
  auto res = impl_->client.Post("/exclusions", body.dump(), "application/json");
  Impl::check(res, "flag exclusion");
  return json::parse(res->body).get<RatingRecord>();
}

std::string HttpRatingClient::export_ratings_jsonl() {
  auto res = impl_->client.Get("/export/ratings");
  Impl::check(res, "export ratings");
  return res->body;
}

SampleStatus HttpRatingClient::status(const std::string& sample_id) {
  auto res = impl_->client.Get("/samples/" + sample_id + "/status");
  Impl::check(res, "sample status");
  return json::parse(res->body).get<SampleStatus>();
}

std::string HttpRatingClient::image(const std::string& sample_id, const std::string& kind) {
  auto res = impl_->client.Get("/samples/" + sample_id + "/images/" + kind);
  Impl::check(res, "sample image");
  return res->body;
}

}  // namespace paiqa::rating
