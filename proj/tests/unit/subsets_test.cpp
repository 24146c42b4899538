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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "core/json_io.hpp"
#include "subsets/split.hpp"

namespace paiqa::subsets {
namespace {

ConsensusScores cons(const std::string& id, bool o, bool h, bool n, bool pc, double v = 3.0) {
  ConsensusScores c;
  c.sample_id = id;
  if (o) c.mos_overall = v, c.n_overall = 10;
  if (h) c.mos_harmony = v, c.n_harmony = 10;
  if (n) c.mos_naturalness = v, c.n_naturalness = 10;
  if (pc) c.pc_level = 3, c.n_pc = 10;
  return c;
}

EditSample sample(const std::string& id) {
  EditSample s;
  s.sample_id = id;
  return s;
}

TEST(Membership, FollowsSurvivingDimensions) {
  const SubsetSets sets = build_subsets(
      {cons("h", false, true, false, false), cons("all", true, true, true, true),
       cons("nopc", true, true, true, false), cons("ghost", true, true, true, true)},
      {sample("h"), sample("all"), sample("nopc")});
  EXPECT_EQ(sets.harmony, (std::set<std::string>{"all", "h", "nopc"}));
  EXPECT_EQ(sets.naturalness, (std::set<std::string>{"all", "nopc"}));
  EXPECT_EQ(sets.overall, (std::set<std::string>{"all"}));
}

// Random consensus with partial coverage, so subsets overlap unevenly.
std::vector<ConsensusScores> random_consensus(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ConsensusScores> out;
  for (int i = 0; i < n; ++i) {
    const int p = static_cast<int>(rng() % 100);
    const bool full = p < 70;
    const double v = 1.0 + static_cast<double>(rng() % 400) / 100.0;
    char id[16];
    std::snprintf(id, sizeof id, "s%05d", i);
    out.push_back(cons(id, full, full || p < 90, full || p >= 90, full, v));
  }
  return out;
}

std::vector<EditSample> samples_for(const std::vector<ConsensusScores>& cs) {
  std::vector<EditSample> out;
  for (const auto& c : cs) out.push_back(sample(c.sample_id));
  return out;
}

void check_split_properties(const std::vector<SubsetAssignment>& a, const SubsetSets& sets) {
  std::map<std::string, Split> label;
  std::map<SubsetKind, std::set<std::string>> train, test;
  for (const auto& x : a) {
    label[x.sample_id] = x.split;
    for (SubsetKind k : x.subsets) (x.split == Split::Train ? train : test)[k].insert(x.sample_id);
  }
  for (SubsetKind ka : kAllSubsets) {
    EXPECT_EQ(train[ka].size() + test[ka].size(), sets.of(ka).size());
    for (SubsetKind kb : kAllSubsets) {
      for (const auto& id : train[ka]) EXPECT_EQ(test[kb].count(id), 0u) << id;
    }
  }
  for (SubsetKind k : kAllSubsets) {
    const double n = static_cast<double>(sets.of(k).size());
    int test = 0;
    for (const auto& id : sets.of(k)) test += label.at(id) == Split::Test;
    EXPECT_LE(std::abs(test - 0.2 * n), 1.0) << to_string(k) << " n=" << n;
  }
}

TEST(Split, PropertiesHoldAcrossSeedsAndSizes) {
  for (int n : {7, 40, 100, 333, 5000}) {
    for (std::uint64_t seed : {1u, 17u, 99u}) {
      const auto cs = random_consensus(n, seed * 31 + static_cast<std::uint64_t>(n));
      const SubsetSets sets = build_subsets(cs, samples_for(cs));
      const auto a = split_subsets(sets, cs, 0.2, seed);
      check_split_properties(a, sets);
      for (const SplitSummary& s : summarize_split(a, 0.2)) EXPECT_TRUE(s.within_tolerance);
    }
  }
}

TEST(Split, HundredSamplesGiveEightyTwenty) {
  std::vector<ConsensusScores> cs;
  for (int i = 0; i < 100; ++i) cs.push_back(cons("s" + std::to_string(100 + i), true, true, true, true));
  const SubsetSets sets = build_subsets(cs, samples_for(cs));
  const auto a = split_subsets(sets, cs, 0.2, 17);
  int test = 0;
  for (const auto& x : a) {
    test += x.split == Split::Test;
    EXPECT_EQ(x.subsets.size(), 3u);
  }
  EXPECT_EQ(test, 20);
}

TEST(Split, DeterministicAndSorted) {
  const auto cs = random_consensus(200, 3);
  const SubsetSets sets = build_subsets(cs, samples_for(cs));
  const auto a = split_subsets(sets, cs, 0.2, 5);
  const auto b = split_subsets(sets, cs, 0.2, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(nlohmann::json(a[i]).dump(), nlohmann::json(b[i]).dump());
    if (i > 0) {
      EXPECT_LT(a[i - 1].sample_id, a[i].sample_id);
    }
  }
  const auto c = split_subsets(sets, cs, 0.2, 6);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].split != c[i].split;
  EXPECT_TRUE(differs);
}

TEST(Split, SmallSubsetsStayInTrain) {
  std::vector<ConsensusScores> cs;
  for (int i = 0; i < 4; ++i) cs.push_back(cons("s" + std::to_string(i), true, true, true, true));
  const SubsetSets sets = build_subsets(cs, samples_for(cs));
  for (const auto& a : split_subsets(sets, cs, 0.2, 1)) EXPECT_EQ(a.split, Split::Train);
  EXPECT_EQ(test_target(4, 0.2), 0);
  EXPECT_EQ(test_target(12, 0.2), 2);
  EXPECT_THROW(split_subsets(sets, cs, 1.5, 1), ValidationError);
}

TEST(Split, JsonRoundTripAndRange) {
  const auto cs = random_consensus(60, 11);
  const SubsetSets sets = build_subsets(cs, samples_for(cs));
  const auto a = split_subsets(sets, cs, 0.2, 2);
  for (const auto& x : a) {
    const auto back = nlohmann::json(x).get<SubsetAssignment>();
    EXPECT_EQ(nlohmann::json(back).dump(), nlohmann::json(x).dump());
  }
  double lo = 9, hi = 0;
  for (const auto& x : a) {
    if (x.split == Split::Train && x.in(SubsetKind::Harmony)) {
      lo = std::min(lo, *x.consensus.mos_harmony);
      hi = std::max(hi, *x.consensus.mos_harmony);
    }
  }
  const ScoreRange r = train_range(a, SubsetKind::Harmony);
  EXPECT_DOUBLE_EQ(r.min, lo);
  EXPECT_DOUBLE_EQ(r.max, hi);
  nlohmann::json bad = a.front();
  bad["split"] = "validation";
  EXPECT_THROW(bad.get<SubsetAssignment>(), ValidationError);
}

TEST(Permutation, SeededFisherYates) {
  const std::vector<std::string> ids = {"d", "a", "c", "b", "e"};
  const auto p = seeded_permutation(ids, 42);
  EXPECT_EQ(p, seeded_permutation({"a", "b", "c", "d", "e"}, 42));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(rng, 7), 7u);
}

}  // namespace
}  // namespace paiqa::subsets
