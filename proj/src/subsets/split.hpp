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

// Subset membership and the shared train/test split.
//
// Every sample gets one label that holds in all subsets it belongs to, so no
// subset's training data can appear in another subset's test data. Labels
// come from a greedy sweep over a seeded permutation: samples that belong to
// more subsets are visited first, and a sample becomes Test only while every
// subset it belongs to is still below its test target.

#ifndef PAIQA_SUBSETS_SPLIT_HPP_
#define PAIQA_SUBSETS_SPLIT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/hash.hpp"
#include "core/model.hpp"
#include "json.hpp"

namespace paiqa::subsets {

struct SubsetSets {
  std::set<std::string> naturalness;
  std::set<std::string> harmony;
  std::set<std::string> overall;

  const std::set<std::string>& of(SubsetKind kind) const;
  std::set<std::string>& of(SubsetKind kind);
};

// Consensus rows without a matching sample are ignored.
SubsetSets build_subsets(const std::vector<ConsensusScores>& consensus,
                         const std::vector<EditSample>& samples);

enum class Split { Train, Test };
std::string_view to_string(Split s);
Split parse_split(std::string_view name);

struct SubsetAssignment {
  std::string sample_id;
  std::vector<SubsetKind> subsets;  // in kAllSubsets order
  Split split = Split::Train;
  ConsensusScores consensus;

  bool in(SubsetKind kind) const;
};

void to_json(nlohmann::json& j, const SubsetAssignment& a);
void from_json(const nlohmann::json& j, SubsetAssignment& a);

using paiqa::uniform_below;
std::vector<std::string> seeded_permutation(std::vector<std::string> ids, std::uint64_t seed);

// round(ratio * n), or 0 when n < kMinSplitSize.
inline constexpr std::size_t kMinSplitSize = 5;
int test_target(std::size_t n, double test_ratio);

// Sorted by sample_id; only samples in at least one subset.
std::vector<SubsetAssignment> split_subsets(const SubsetSets& sets,
                                            const std::vector<ConsensusScores>& consensus,
                                            double test_ratio, std::uint64_t seed);

struct SplitSummary {
  SubsetKind kind;
  int size = 0;
  int test = 0;
  int target = 0;
  bool within_tolerance = true;  // |test - ratio*size| <= 1
};

std::vector<SplitSummary> summarize_split(const std::vector<SubsetAssignment>& assignments,
                                          double test_ratio);

// Train-split min/max of the subset's MOS (the one it is named for).
struct ScoreRange {
  double min = 0.0;
  double max = 0.0;
};
ScoreRange train_range(const std::vector<SubsetAssignment>& assignments, SubsetKind kind);

}  // namespace paiqa::subsets

#endif  // PAIQA_SUBSETS_SPLIT_HPP_
