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

#ifndef PAIQA_RATING_API_HPP_
#define PAIQA_RATING_API_HPP_

#include <memory>
#include <optional>
#include <string>

#include "rating/service.hpp"

namespace paiqa::rating {

// What a rater client can do. Failures surface as RatingError.
class RatingApi {
 public:
  virtual ~RatingApi() = default;
  virtual void register_rater(const std::string& rater_id) = 0;
  virtual std::optional<Assignment> next_assignment(const std::string& rater_id) = 0;
  virtual RatingRecord submit_rating(const RatingRecord& record) = 0;
  virtual RatingRecord flag_exclusion(const std::string& rater_id, const std::string& sample_id,
                                      ExclusionReason reason) = 0;
  virtual std::string export_ratings_jsonl() = 0;
  virtual SampleStatus status(const std::string& sample_id) = 0;
};

// In-process calls straight into a service.
class LocalRatingApi : public RatingApi {
 public:
  explicit LocalRatingApi(RatingService& service) : service_(service) {}
  void register_rater(const std::string& rater_id) override { service_.register_rater(rater_id); }
  std::optional<Assignment> next_assignment(const std::string& rater_id) override {
    return service_.next_assignment(rater_id);
  }
  RatingRecord submit_rating(const RatingRecord& record) override {
    return service_.submit_rating(record);
  }
  RatingRecord flag_exclusion(const std::string& rater_id, const std::string& sample_id,
                              ExclusionReason reason) override {
    return service_.flag_exclusion(rater_id, sample_id, reason);
  }
  std::string export_ratings_jsonl() override { return export_jsonl(service_.export_ratings()); }
  SampleStatus status(const std::string& sample_id) override { return service_.status(sample_id); }

 private:
  RatingService& service_;
};

}  // namespace paiqa::rating

#endif  // PAIQA_RATING_API_HPP_
