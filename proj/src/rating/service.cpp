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

#include "rating/service.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

#include "core/json_io.hpp"

namespace paiqa::rating {

std::string_view to_string(RatingError::Kind kind) {
  switch (kind) {
    case RatingError::Kind::UnknownRater: return "UnknownRater";
    case RatingError::Kind::UnknownSample: return "UnknownSample";
    case RatingError::Kind::NoOpenAssignment: return "NoOpenAssignment";
    case RatingError::Kind::ProtocolViolation: return "ProtocolViolation";
    case RatingError::Kind::DuplicateSubmission: return "DuplicateSubmission";
    case RatingError::Kind::InvalidRecord: return "InvalidRecord";
  }
  return "?";
}

RatingError::Kind parse_rating_error_kind(std::string_view name) {
  using K = RatingError::Kind;
  for (K k : {K::UnknownRater, K::UnknownSample, K::NoOpenAssignment, K::ProtocolViolation,
              K::DuplicateSubmission, K::InvalidRecord}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown rating error kind: " + std::string(name));
}

void to_json(nlohmann::json& j, const RatingConfig& c) {
  j = {{"target", c.target},
       {"min_accept", c.min_accept},
       {"withdraw_threshold", c.withdraw_threshold},
       {"assignment_ttl_s", c.assignment_ttl_s}};
}

void from_json(const nlohmann::json& j, RatingConfig& c) {
  const RatingConfig d;
  c.target = j.value("target", d.target);
  c.min_accept = j.value("min_accept", d.min_accept);
  c.withdraw_threshold = j.value("withdraw_threshold", d.withdraw_threshold);
  c.assignment_ttl_s = j.value("assignment_ttl_s", d.assignment_ttl_s);
  if (c.min_accept < 1 || c.target < c.min_accept) {
    throw ValidationError("rating targets need 1 <= min_accept <= target");
  }
  if (c.withdraw_threshold < 1) throw ValidationError("withdraw_threshold must be >= 1");
  if (c.assignment_ttl_s < 1) throw ValidationError("assignment_ttl_s must be >= 1");
}

void to_json(nlohmann::json& j, const Assignment& a) {
  j = {{"rater_id", a.rater_id},
       {"sample_id", a.sample_id},
       {"issued_at", a.issued_at},
       {"expires_at", a.expires_at}};
}

void from_json(const nlohmann::json& j, Assignment& a) {
  a.rater_id = j.at("rater_id").get<std::string>();
  a.sample_id = j.at("sample_id").get<std::string>();
  a.issued_at = j.at("issued_at").get<std::int64_t>();
  a.expires_at = j.at("expires_at").get<std::int64_t>();
}

void to_json(nlohmann::json& j, const SampleStatus& s) {
  j = {{"sample_id", s.sample_id},           {"ratings", s.ratings},
       {"exclusions", s.exclusions},         {"open_assignments", s.open_assignments},
       {"withdrawn", s.withdrawn},           {"complete", s.complete}};
}

void from_json(const nlohmann::json& j, SampleStatus& s) {
  s.sample_id = j.at("sample_id").get<std::string>();
  s.ratings = j.at("ratings").get<int>();
  s.exclusions = j.at("exclusions").get<int>();
  s.open_assignments = j.at("open_assignments").get<int>();
  s.withdrawn = j.at("withdrawn").get<bool>();
  s.complete = j.at("complete").get<bool>();
}

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

bool violates_protocol(const RatingRecord& r) {
  return r.prompt_completion && r.overall && *r.prompt_completion <= 2 && *r.overall >= 3;
}

RatingService::RatingService(std::vector<EditSample> samples, RatingConfig cfg,
                             std::shared_ptr<Storage> store, Clock clock)
    : cfg_(cfg), store_(std::move(store)), clock_(std::move(clock)) {
  for (EditSample& s : samples) {
    const std::string id = s.sample_id;
    if (!samples_.emplace(id, std::move(s)).second) {
      throw DataError("duplicate sample_id in rating campaign: " + id);
    }
    state_[id];
  }
  StoredState stored = store_->load();
  for (std::string& r : stored.raters) raters_.insert(std::move(r));
  for (const RatingRecord& r : stored.records) {
    if (!samples_.count(r.sample_id)) {
      spdlog::warn("stored rating for unknown sample {} kept for export only", r.sample_id);
      records_.push_back(r);
      continue;
    }
    apply_commit_locked(r);
  }
  for (const Assignment& a : stored.assignments) {
    if (!samples_.count(a.sample_id) || open_.count(a.rater_id) ||
        seen_[a.rater_id].count(a.sample_id)) {
      store_->drop_assignment(a.rater_id, a.sample_id);
      continue;
    }
    open_[a.rater_id] = a;
    ++state_[a.sample_id].open;
  }
  for (const auto& [id, st] : state_) {
    if (!st.withdrawn && st.load() < cfg_.target) queue_.emplace(st.load(), id);
  }
}

void RatingService::apply_commit_locked(const RatingRecord& r) {
  SampleState& st = state_[r.sample_id];
  if (r.excluded) {
    ++st.exclusions;
    if (st.exclusions >= cfg_.withdraw_threshold) st.withdrawn = true;
  } else {
    ++st.ratings;
  }
  seen_[r.rater_id].insert(r.sample_id);
  records_.push_back(r);
}

void RatingService::requeue_locked(const std::string& id, const SampleState& before) {
  queue_.erase({before.load(), id});
  const SampleState& now = state_.at(id);
  if (!now.withdrawn && now.load() < cfg_.target) queue_.emplace(now.load(), id);
}

void RatingService::check_rater_locked(const std::string& rater_id) const {
  if (!raters_.count(rater_id)) {
    throw RatingError(RatingError::Kind::UnknownRater, "unknown rater: " + rater_id);
  }
}

void RatingService::close_assignment_locked(const std::string& rater_id) {
  auto it = open_.find(rater_id);
  if (it == open_.end()) return;
  const std::string sample_id = it->second.sample_id;
  open_.erase(it);
  const SampleState before = state_.at(sample_id);
  --state_.at(sample_id).open;
  requeue_locked(sample_id, before);
}

void RatingService::expire_locked(std::int64_t now) {
  std::vector<std::string> expired;
  for (const auto& [rater, a] : open_) {
    if (a.expires_at <= now) expired.push_back(rater);
  }
  for (const std::string& rater : expired) {
    const Assignment a = open_.at(rater);
    spdlog::debug("assignment {}/{} expired", a.rater_id, a.sample_id);
    store_->drop_assignment(a.rater_id, a.sample_id);
    close_assignment_locked(rater);
  }
}

void RatingService::register_rater(const std::string& rater_id) {
  if (rater_id.empty()) throw RatingError(RatingError::Kind::InvalidRecord, "empty rater_id");
  std::lock_guard lock(mu_);
  if (raters_.insert(rater_id).second) store_->add_rater(rater_id);
}

std::optional<Assignment> RatingService::next_assignment(const std::string& rater_id) {
  std::lock_guard lock(mu_);
  check_rater_locked(rater_id);
  const std::int64_t now = clock_();
  expire_locked(now);
  if (auto it = open_.find(rater_id); it != open_.end()) {
    if (!state_.at(it->second.sample_id).withdrawn) return it->second;
    store_->drop_assignment(rater_id, it->second.sample_id);
    close_assignment_locked(rater_id);
  }
  const auto& seen = seen_[rater_id];
  for (const auto& [load, id] : queue_) {
    if (seen.count(id)) continue;
    Assignment a{rater_id, id, now, now + cfg_.assignment_ttl_s};
    store_->put_assignment(a);
    const SampleState before = state_.at(id);
    ++state_.at(id).open;
    requeue_locked(id, before);
    open_[rater_id] = a;
    return a;
  }
  return std::nullopt;
}

const Assignment& RatingService::open_assignment_locked(const std::string& rater_id,
                                                        const std::string& sample_id,
                                                        std::int64_t now) {
  check_rater_locked(rater_id);
  if (!samples_.count(sample_id)) {
    throw RatingError(RatingError::Kind::UnknownSample, "unknown sample: " + sample_id);
  }
  expire_locked(now);
  auto it = open_.find(rater_id);
  if (it == open_.end() || it->second.sample_id != sample_id) {
    if (seen_[rater_id].count(sample_id)) {
      throw RatingError(RatingError::Kind::DuplicateSubmission,
                        "rater " + rater_id + " already answered sample " + sample_id);
    }
    throw RatingError(RatingError::Kind::NoOpenAssignment,
                      "rater " + rater_id + " holds no open assignment for sample " + sample_id);
  }
  return it->second;
}

RatingRecord RatingService::submit_rating(RatingRecord record) {
  if (record.excluded) {
    throw RatingError(RatingError::Kind::InvalidRecord, "use flag_exclusion for exclusions");
  }
  try {
    validate(record);
  } catch (const ValidationError& e) {
    throw RatingError(RatingError::Kind::InvalidRecord, e.what());
  }
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_();
  open_assignment_locked(record.rater_id, record.sample_id, now);
  if (violates_protocol(record)) {
    throw RatingError(RatingError::Kind::ProtocolViolation,
                      "prompt completion " + std::to_string(*record.prompt_completion) +
                          " allows an overall score of 1 or 2 only, got " +
                          std::to_string(*record.overall));
  }
  record.timestamp = now;
  store_->commit(record);
  const SampleState before = state_.at(record.sample_id);
  open_.erase(record.rater_id);
  --state_.at(record.sample_id).open;
  apply_commit_locked(record);
  requeue_locked(record.sample_id, before);
  return record;
}

RatingRecord RatingService::flag_exclusion(const std::string& rater_id,
                                           const std::string& sample_id, ExclusionReason reason) {
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_();
  open_assignment_locked(rater_id, sample_id, now);
  RatingRecord record;
  record.rater_id = rater_id;
  record.sample_id = sample_id;
  record.excluded = true;
  record.exclusion_reason = reason;
  record.timestamp = now;
  store_->commit(record);
  const SampleState before = state_.at(sample_id);
  open_.erase(rater_id);
  --state_.at(sample_id).open;
  apply_commit_locked(record);
  requeue_locked(sample_id, before);
  if (state_.at(sample_id).withdrawn && !before.withdrawn) {
    spdlog::info("sample {} withdrawn after {} exclusion flags", sample_id,
                 state_.at(sample_id).exclusions);
  }
  return record;
}

std::vector<RatingRecord> RatingService::export_ratings() const {
  std::vector<RatingRecord> out;
  {
    std::lock_guard lock(mu_);
    out = records_;
  }
  std::sort(out.begin(), out.end(), [](const RatingRecord& a, const RatingRecord& b) {
    return std::tie(a.sample_id, a.timestamp, a.rater_id) <
           std::tie(b.sample_id, b.timestamp, b.rater_id);
  });
  return out;
}

SampleStatus RatingService::status(const std::string& sample_id) const {
  std::lock_guard lock(mu_);
  auto it = state_.find(sample_id);
  if (it == state_.end()) {
    throw RatingError(RatingError::Kind::UnknownSample, "unknown sample: " + sample_id);
  }
  const SampleState& st = it->second;
  return {sample_id, st.ratings, st.exclusions, st.open, st.withdrawn,
          st.ratings >= cfg_.min_accept};
}

const EditSample& RatingService::sample(const std::string& sample_id) const {
  auto it = samples_.find(sample_id);
  if (it == samples_.end()) {
    throw RatingError(RatingError::Kind::UnknownSample, "unknown sample: " + sample_id);
  }
  return it->second;
}

std::vector<std::string> RatingService::sample_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : samples_) ids.push_back(id);
  return ids;
}

std::string export_jsonl(const std::vector<RatingRecord>& records) {
  std::string out;
  for (const RatingRecord& r : records) out += to_jsonl_line(nlohmann::json(r));
  return out;
}

}  // namespace paiqa::rating
