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

#include "rating/replay.hpp"

#include <algorithm>
#include <map>

namespace paiqa::rating {

ReplayReport replay_campaign(RatingApi& api, const std::vector<RatingRecord>& script,
                             const std::function<void()>& after_action) {
  std::map<std::string, std::map<std::string, RatingRecord>> by_rater;
  for (const RatingRecord& r : script) {
    if (!by_rater[r.rater_id].emplace(r.sample_id, r).second) {
      throw DataError("script has two records for rater " + r.rater_id + " on sample " +
                      r.sample_id);
    }
  }
  std::vector<std::string> active;
  for (const auto& [rater, _] : by_rater) {
    api.register_rater(rater);
    active.push_back(rater);
  }

  ReplayReport report;
  while (!active.empty()) {
    std::vector<std::string> still_active;
    for (const std::string& rater : active) {
      const auto a = api.next_assignment(rater);
      if (!a) continue;
      still_active.push_back(rater);
      const auto& mine = by_rater.at(rater);
      auto it = mine.find(a->sample_id);
      if (it == mine.end()) {
        throw DataError("rater " + rater + " was assigned " + a->sample_id +
                        " but has no scripted answer for it");
      }
      const RatingRecord& r = it->second;
      if (r.excluded) {
        api.flag_exclusion(rater, r.sample_id, *r.exclusion_reason);
        ++report.flagged;
      } else {
        try {
          api.submit_rating(r);
        } catch (const RatingError& e) {
          if (e.kind() != RatingError::Kind::ProtocolViolation) throw;
          RatingRecord fixed = r;
          fixed.overall = std::min(*fixed.overall, 2);
          api.submit_rating(fixed);
          ++report.corrected;
        }
        ++report.submitted;
      }
      ++report.actions;
      if (after_action) after_action();
    }
    active = std::move(still_active);
  }
  return report;
}

}  // namespace paiqa::rating
