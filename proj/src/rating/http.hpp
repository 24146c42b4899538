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

// JSON-over-HTTP front end for the rating service.
//
//   POST /raters                       {"rater_id"}
//   GET  /assignments/next?rater_id=   200 Assignment, 204 when none remain
//   POST /ratings                      RatingRecord
//   POST /exclusions                   {"rater_id","sample_id","reason"}
//   GET  /export/ratings               line-delimited JSON
//   GET  /samples/{id}                 EditSample
//   GET  /samples/{id}/status          SampleStatus
//   GET  /samples/{id}/images/{source|edited|boxed}
//
// Errors carry {"error": <kind>, "message"} with 400/404/409/422.

#ifndef PAIQA_RATING_HTTP_HPP_
#define PAIQA_RATING_HTTP_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "rating/api.hpp"

namespace paiqa::rating {

class RatingServer {
 public:
  // Relative image URIs resolve against `asset_root`.
  RatingServer(RatingService& service, std::filesystem::path asset_root);
  ~RatingServer();
  RatingServer(const RatingServer&) = delete;
  RatingServer& operator=(const RatingServer&) = delete;

  // Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  int bind_any_port(const std::string& host);
  // Blocks until stop().
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status_for(RatingError::Kind kind);

class HttpRatingClient : public RatingApi {
 public:
  explicit HttpRatingClient(const std::string& base_url);
  ~HttpRatingClient() override;

  void register_rater(const std::string& rater_id) override;
  std::optional<Assignment> next_assignment(const std::string& rater_id) override;
  RatingRecord submit_rating(const RatingRecord& record) override;
  RatingRecord flag_exclusion(const std::string& rater_id, const std::string& sample_id,
                              ExclusionReason reason) override;
  std::string export_ratings_jsonl() override;
  SampleStatus status(const std::string& sample_id) override;
  // Raw bytes of one of the sample images; kind is source, edited or boxed.
  std::string image(const std::string& sample_id, const std::string& kind);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace paiqa::rating

#endif  // PAIQA_RATING_HTTP_HPP_
