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

// Rating campaign state machine.
//
// A rater holds at most one open assignment. Samples are served fewest-first
// by load (committed ratings plus open assignments), ties by sample_id. Each
// assignment ends in exactly one terminal action: a rating or an exclusion
// flag. All transitions run under one mutex and are written through to the
// storage before the call returns.

#ifndef PAIQA_RATING_SERVICE_HPP_
#define PAIQA_RATING_SERVICE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"
#include "json.hpp"
#include "rating/storage.hpp"

namespace paiqa::rating {

class RatingError : public std::runtime_error {
 public:
  enum class Kind {
    UnknownRater,
    UnknownSample,
    NoOpenAssignment,
    ProtocolViolation,
    DuplicateSubmission,
    InvalidRecord,
  };
  RatingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(RatingError::Kind kind);
RatingError::Kind parse_rating_error_kind(std::string_view name);

struct RatingConfig {
  int target = 12;
  int min_accept = 10;
  int withdraw_threshold = 3;
  std::int64_t assignment_ttl_s = 30 * 60;
};

void to_json(nlohmann::json& j, const RatingConfig& c);
void from_json(const nlohmann::json& j, RatingConfig& c);

struct SampleStatus {
  std::string sample_id;
  int ratings = 0;  // committed, non-excluded
  int exclusions = 0;
  int open_assignments = 0;
  bool withdrawn = false;
  bool complete = false;  // ratings >= min_accept
};

void to_json(nlohmann::json& j, const Assignment& a);
void from_json(const nlohmann::json& j, Assignment& a);
void to_json(nlohmann::json& j, const SampleStatus& s);
void from_json(const nlohmann::json& j, SampleStatus& s);

// UTC seconds.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

// True when the record breaks the scoring rule (pc <= 2 with overall >= 3).
bool violates_protocol(const RatingRecord& r);

class RatingService {
 public:
  RatingService(std::vector<EditSample> samples, RatingConfig cfg,
                std::shared_ptr<Storage> store, Clock clock = system_clock());

  void register_rater(const std::string& rater_id);
  // Returns the rater's open assignment if one exists, otherwise a new one;
  // nullopt when nothing is left for this rater.
  std::optional<Assignment> next_assignment(const std::string& rater_id);
  // The stored record, with the server timestamp.
  RatingRecord submit_rating(RatingRecord record);
  RatingRecord flag_exclusion(const std::string& rater_id, const std::string& sample_id,
                              ExclusionReason reason);

  // Ordered by (sample_id, timestamp, rater_id).
  std::vector<RatingRecord> export_ratings() const;
  SampleStatus status(const std::string& sample_id) const;
  const EditSample& sample(const std::string& sample_id) const;
  std::vector<std::string> sample_ids() const;
  const RatingConfig& config() const { return cfg_; }

 private:
  struct SampleState {
    int ratings = 0;
    int exclusions = 0;
    int open = 0;
    bool withdrawn = false;
    int load() const { return ratings + open; }
  };

  void expire_locked(std::int64_t now);
  void close_assignment_locked(const std::string& rater_id);
  // Re-inserts `id` into the queue when it is still eligible.
  void requeue_locked(const std::string& id, const SampleState& before);
  void check_rater_locked(const std::string& rater_id) const;
  const Assignment& open_assignment_locked(const std::string& rater_id,
                                           const std::string& sample_id, std::int64_t now);
  void apply_commit_locked(const RatingRecord& r);

  mutable std::mutex mu_;
  RatingConfig cfg_;
  std::shared_ptr<Storage> store_;
  Clock clock_;
  std::map<std::string, EditSample> samples_;
  std::map<std::string, SampleState> state_;
  std::set<std::string> raters_;
  std::map<std::string, std::set<std::string>> seen_;  // rater -> samples with a record
  std::map<std::string, Assignment> open_;             // rater -> open assignment
  std::set<std::pair<int, std::string>> queue_;        // (load, sample_id), eligible only
  std::vector<RatingRecord> records_;
};

std::string export_jsonl(const std::vector<RatingRecord>& records);

}  // namespace paiqa::rating

#endif  // PAIQA_RATING_SERVICE_HPP_
