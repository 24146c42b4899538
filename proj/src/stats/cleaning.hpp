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

// Per-sample rating cleaning and consensus.
//
// Order per sample: drop conflicting records (pc <= 2 with overall >= 3),
// then one IQR pass per scored dimension, then drop the prompt-completion
// vote of every rater whose overall rating fell outside the fences.
// Prompt completion is never IQR-filtered.

#ifndef PAIQA_STATS_CLEANING_HPP_
#define PAIQA_STATS_CLEANING_HPP_

#include <string>
#include <vector>

#include "core/model.hpp"
#include "json.hpp"

namespace paiqa::stats {

struct Fences {
  double lo = 0.0;
  double hi = 0.0;
};

// Linear interpolation between order statistics at position p*(n-1).
double quantile_linear(const std::vector<double>& sorted, double p);
// Q1 - 1.5 IQR and Q3 + 1.5 IQR. Needs at least 4 values.
Fences iqr_bounds(std::vector<double> values);

// Below this count a dimension skips IQR and keeps every rating.
inline constexpr std::size_t kMinIqrCount = 4;

bool is_conflict(const RatingRecord& r);

struct ConflictSplit {
  std::vector<RatingRecord> kept;
  std::vector<RatingRecord> removed;
};
ConflictSplit filter_conflicts(const std::vector<RatingRecord>& records);

struct Vote {
  std::string rater_id;
  int value = 0;
  bool operator==(const Vote&) const = default;
};

struct SampleSurvivors {
  std::string sample_id;
  std::vector<Vote> overall;
  std::vector<Vote> harmony;
  std::vector<Vote> naturalness;
  std::vector<Vote> pc;
};

struct DimensionCounts {
  int submitted = 0;
  int conflict_removed = 0;
  int iqr_removed = 0;
  int cascade_removed = 0;
  int surviving = 0;
};

struct CleaningEntry {
  std::string sample_id;
  int excluded_records = 0;
  int records = 0;  // non-excluded
  int conflict_records = 0;
  DimensionCounts overall;
  DimensionCounts harmony;
  DimensionCounts naturalness;
  DimensionCounts pc;
};

struct SampleCleaning {
  SampleSurvivors survivors;
  CleaningEntry report;
};

// `records` must all share one sample_id. Excluded records are counted and
// otherwise ignored.
SampleCleaning clean_sample(const std::vector<RatingRecord>& records);

// Most frequent level; ties go to the lower level.
int pc_vote(const std::vector<int>& levels);
ConsensusScores consensus(const SampleSurvivors& survivors);

struct CleaningOutput {
  std::vector<ConsensusScores> consensus;  // sorted by sample_id
  std::vector<CleaningEntry> report;       // sorted by sample_id
};

CleaningOutput clean_ratings(const std::vector<RatingRecord>& records);

nlohmann::json report_to_json(const std::vector<CleaningEntry>& report);

}  // namespace paiqa::stats

#endif  // PAIQA_STATS_CLEANING_HPP_
