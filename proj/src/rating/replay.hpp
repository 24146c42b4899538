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

#ifndef PAIQA_RATING_REPLAY_HPP_
#define PAIQA_RATING_REPLAY_HPP_

#include <functional>
#include <vector>

#include "core/model.hpp"
#include "rating/api.hpp"

namespace paiqa::rating {

struct ReplayReport {
  int submitted = 0;
  int flagged = 0;
  int corrected = 0;  // protocol violations resubmitted with overall capped at 2
  int actions = 0;
};

// Drives scripted raters through the campaign API. Raters take turns in id
// order; each asks for its next assignment and answers it from its script
// (a rating or an exclusion flag). A rejected pc/overall conflict is fixed
// the way the rating form would force it: overall capped at 2, resubmitted.
// `after_action` runs after every terminal action, e.g. to advance a
// simulated clock. Throws DataError if a rater is assigned a sample its
// script does not cover.
ReplayReport replay_campaign(RatingApi& api, const std::vector<RatingRecord>& script,
                             const std::function<void()>& after_action = {});

}  // namespace paiqa::rating

#endif  // PAIQA_RATING_REPLAY_HPP_
