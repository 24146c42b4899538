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

#include <map>
#include <random>
#include <set>

#include "core/model.hpp"
#include "stats/cleaning.hpp"
#include "stats/exports.hpp"
#include "support/oracles.hpp"

namespace paiqa::stats {
namespace {

RatingRecord rec(std::string rater, std::optional<int> overall, std::optional<int> harmony,
                 std::optional<int> naturalness, std::optional<int> pc) {
  RatingRecord r;
  r.rater_id = std::move(rater);
  r.sample_id = "s1";
  r.overall = overall;
  r.harmony = harmony;
  r.naturalness = naturalness;
  r.prompt_completion = pc;
  r.timestamp = 1;
  return r;
}

std::set<std::string> raters(const std::vector<Vote>& votes) {
  std::set<std::string> out;
  for (const Vote& v : votes) out.insert(v.rater_id);
  return out;
}

TEST(Conflict, RemovesExactlyLowCompletionWithHighOverall) {
  for (int pc = 1; pc <= 3; ++pc) {
    for (int o = 1; o <= 5; ++o) {
      const RatingRecord r = rec("r", o, 3, 3, pc);
      EXPECT_EQ(is_conflict(r), pc <= 2 && o >= 3) << "pc=" << pc << " overall=" << o;
    }
  }
  EXPECT_FALSE(is_conflict(rec("r", 5, 3, 3, std::nullopt)));
  EXPECT_FALSE(is_conflict(rec("r", std::nullopt, 3, 3, 1)));
  RatingRecord ex = rec("r", 5, 3, 3, 1);
  ex.excluded = true;
  EXPECT_FALSE(is_conflict(ex));
}

TEST(Conflict, DropsWholeRecordBeforeIqr) {
  std::vector<RatingRecord> recs;
  for (int i = 0; i < 6; ++i) recs.push_back(rec("r" + std::to_string(i), 2, 3, 3, 3));
  recs.push_back(rec("bad", 4, 3, 3, 1));
  const SampleCleaning sc = clean_sample(recs);
  EXPECT_EQ(sc.report.conflict_records, 1);
  EXPECT_EQ(sc.report.harmony.conflict_removed, 1);
  EXPECT_EQ(raters(sc.survivors.harmony).count("bad"), 0u);
  EXPECT_EQ(raters(sc.survivors.pc).count("bad"), 0u);
}

TEST(Quantile, InterpolatesBetweenOrderStatistics) {
  EXPECT_DOUBLE_EQ(quantile_linear({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_linear({1, 2, 3, 4}, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile_linear({7}, 0.5), 7.0);
  EXPECT_THROW(quantile_linear({}, 0.5), ValidationError);
  EXPECT_THROW(iqr_bounds({1, 2, 3}), ValidationError);
}

TEST(Iqr, MatchesBruteForceOnRandomMultisets) {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    std::vector<RatingRecord> recs;
    std::vector<int> values;
    for (int i = 0; i < n; ++i) {
      const int v = 1 + static_cast<int>(rng() % 5);
      values.push_back(v);
      recs.push_back(rec("r" + std::to_string(100 + i), std::nullopt, v, std::nullopt,
                         std::nullopt));
    }
    const std::vector<bool> keep = oracle::tukey_keep(values);
    std::set<std::string> expected;
    for (int i = 0; i < n; ++i) {
      if (keep[i]) expected.insert("r" + std::to_string(100 + i));
    }
    const SampleCleaning sc = clean_sample(recs);
    ASSERT_EQ(raters(sc.survivors.harmony), expected) << "trial " << trial;
    EXPECT_EQ(sc.report.harmony.iqr_removed + sc.report.harmony.surviving, n);
  }
}

TEST(Iqr, KeepsEverythingBelowFourRatings) {
  const SampleCleaning sc =
      clean_sample({rec("a", 1, 1, 1, 3), rec("b", 5, 5, 5, 3), rec("c", 5, 5, 5, 3)});
  EXPECT_EQ(sc.survivors.overall.size(), 3u);
  EXPECT_EQ(sc.report.overall.iqr_removed, 0);
}

TEST(Iqr, SurvivorsLieWithinInputFences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RatingRecord> recs;
    std::vector<double> values;
    const int n = 4 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const int v = 1 + static_cast<int>(rng() % 5);
      values.push_back(v);
      recs.push_back(rec("r" + std::to_string(i), v, std::nullopt, std::nullopt, std::nullopt));
    }
    const Fences f = iqr_bounds(values);
    const SampleCleaning sc = clean_sample(recs);
    for (const Vote& v : sc.survivors.overall) {
      EXPECT_GE(v.value, f.lo);
      EXPECT_LE(v.value, f.hi);
    }
  }
}

// A second pass over survivors can remove more, so fences are computed once.
TEST(Iqr, SinglePassIsNotIdempotent) {
  const std::vector<int> values = {1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 4, 5};
  std::vector<RatingRecord> recs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    recs.push_back(rec("r" + std::to_string(i), values[i], std::nullopt, std::nullopt,
                       std::nullopt));
  }
  const SampleCleaning first = clean_sample(recs);
  ASSERT_EQ(first.report.overall.iqr_removed, 1);
  std::vector<RatingRecord> again;
  for (const Vote& v : first.survivors.overall) {
    again.push_back(rec(v.rater_id, v.value, std::nullopt, std::nullopt, std::nullopt));
  }
  const SampleCleaning second = clean_sample(again);
  EXPECT_EQ(second.report.overall.iqr_removed, 1);
  EXPECT_EQ(second.survivors.overall.size(), 10u);
}

TEST(Cascade, DropsPcOfOverallOutliersOnly) {
  std::vector<RatingRecord> recs;
  for (int i = 0; i < 8; ++i) recs.push_back(rec("r" + std::to_string(i), 3, 3, 3, 3));
  recs.push_back(rec("overall-outlier", 1, 3, 3, 1));
  recs.push_back(rec("harmony-outlier", 3, 1, 3, 3));
  const SampleCleaning sc = clean_sample(recs);
  const auto pc = raters(sc.survivors.pc);
  EXPECT_EQ(pc.count("overall-outlier"), 0u);
  EXPECT_EQ(pc.count("harmony-outlier"), 1u);
  EXPECT_EQ(sc.report.pc.cascade_removed, 1);
  EXPECT_EQ(raters(sc.survivors.harmony).count("harmony-outlier"), 0u);
  EXPECT_EQ(raters(sc.survivors.naturalness).count("overall-outlier"), 1u);
}

TEST(Cascade, RemovedPcRatersAreSubsetOfOverallOutliers) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RatingRecord> recs;
    const int n = 10 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const int pc = 1 + static_cast<int>(rng() % 3);
      int o = 1 + static_cast<int>(rng() % 5);
      if (pc <= 2) o = std::min(o, 2);
      recs.push_back(rec("r" + std::to_string(i), o, 1 + static_cast<int>(rng() % 5),
                         1 + static_cast<int>(rng() % 5), pc));
    }
    const SampleCleaning sc = clean_sample(recs);
    std::set<std::string> all;
    for (const auto& r : recs) all.insert(r.rater_id);
    const auto kept_overall = raters(sc.survivors.overall);
    const auto kept_pc = raters(sc.survivors.pc);
    for (const auto& r : all) {
      EXPECT_EQ(kept_pc.count(r), kept_overall.count(r)) << r;
    }
  }
}

TEST(PcVote, TieGoesToLowerLevel) {
  EXPECT_EQ(pc_vote({1, 3}), 1);
  EXPECT_EQ(pc_vote({2, 2, 3, 3}), 2);
  EXPECT_EQ(pc_vote({1, 1, 2, 2, 3, 3}), 1);
  EXPECT_EQ(pc_vote({3, 3, 2}), 3);
  EXPECT_THROW(pc_vote({}), ValidationError);
  EXPECT_THROW(pc_vote({4}), ValidationError);
}

TEST(Consensus, MeansAndCountsFromSurvivors) {
  std::vector<RatingRecord> recs = {rec("a", 3, 4, std::nullopt, 3),
                                    rec("b", 4, 4, std::nullopt, 3),
                                    rec("c", 2, std::nullopt, std::nullopt, 2)};
  RatingRecord ex = rec("d", std::nullopt, std::nullopt, std::nullopt, std::nullopt);
  ex.excluded = true;
  ex.exclusion_reason = ExclusionReason::NoEffectiveEdit;
  recs.push_back(ex);
  const CleaningOutput out = clean_ratings(recs);
  ASSERT_EQ(out.consensus.size(), 1u);
  const ConsensusScores& c = out.consensus[0];
  EXPECT_DOUBLE_EQ(*c.mos_overall, 3.0);
  EXPECT_DOUBLE_EQ(*c.mos_harmony, 4.0);
  EXPECT_FALSE(c.mos_naturalness.has_value());
  EXPECT_EQ(c.pc_level, 3);
  EXPECT_EQ(c.n_overall, 3);
  EXPECT_EQ(c.n_harmony, 2);
  EXPECT_EQ(out.report[0].excluded_records, 1);
  EXPECT_EQ(out.report[0].records, 3);
}

TEST(Consensus, GroupsAndSortsBySample) {
  RatingRecord a = rec("x", 3, 3, 3, 3);
  a.sample_id = "s2";
  RatingRecord b = rec("x", 4, 4, 4, 3);
  b.sample_id = "s1";
  const CleaningOutput out = clean_ratings({a, b});
  ASSERT_EQ(out.consensus.size(), 2u);
  EXPECT_EQ(out.consensus[0].sample_id, "s1");
  EXPECT_EQ(out.report[1].sample_id, "s2");
  EXPECT_THROW(clean_sample({a, b}), ValidationError);
}

TEST(Exports, BinsCoverTheScaleWithClosedTop) {
  EXPECT_EQ(score_bin(1.0), 0);
  EXPECT_EQ(score_bin(1.49), 0);
  EXPECT_EQ(score_bin(1.5), 1);
  EXPECT_EQ(score_bin(5.0), kScoreBins - 1);
  EXPECT_DOUBLE_EQ(bin_lower(0), 1.0);
  EXPECT_DOUBLE_EQ(bin_upper(kScoreBins - 1), 5.0);
}

TEST(Exports, HistogramCountsEverySample) {
  std::vector<ConsensusScores> cs;
  std::vector<EditSample> samples;
  for (int i = 0; i < 12; ++i) {
    ConsensusScores c;
    c.sample_id = "s" + std::to_string(i);
    c.mos_overall = 1.0 + (i % 9) * 0.5;
    c.mos_harmony = 2.0;
    c.mos_naturalness = 4.0;
    c.pc_level = 1 + i % 3;
    cs.push_back(c);
    if (i < 10) {
      EditSample s;
      s.sample_id = c.sample_id;
      s.task = kAllEditingTasks[i % 4];
      samples.push_back(s);
    }
  }
  const auto rows = histograms(cs, samples);
  EXPECT_EQ(rows.size(), 3u * 5u * kScoreBins + 5u * 3u);
  std::map<std::pair<std::string, std::string>, int> totals;
  for (const auto& r : rows) totals[{r.dimension, r.task}] += r.count;
  EXPECT_EQ((totals[{"overall", "all"}]), 12);
  EXPECT_EQ((totals[{"prompt_completion", "all"}]), 12);
  int per_task = 0;
  for (EditingTask t : kAllEditingTasks) per_task += totals[{"harmony", std::string(to_string(t))}];
  EXPECT_EQ(per_task, 10);

  const auto grid = divergence_grid(cs);
  ASSERT_EQ(grid.size(), static_cast<std::size_t>(kScoreBins * kScoreBins));
  const GridCell& cell = grid[score_bin(2.0) * kScoreBins + score_bin(4.0)];
  EXPECT_EQ(cell.count, 12);
  EXPECT_TRUE(cell.mean_overall.has_value());
  EXPECT_EQ(scatter3d(cs).size(), 4u);
  EXPECT_NE(histogram_csv(rows).find("dimension,task,bin,lower,upper,count\n"), std::string::npos);
}


TEST(Iqr, FenceExamples) {
  Fences f = iqr_bounds({1, 1, 1, 1, 1, 1, 1, 1, 1, 5});
  EXPECT_DOUBLE_EQ(f.lo, 1.0);
  EXPECT_DOUBLE_EQ(f.hi, 1.0);
  f = iqr_bounds({1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(f.lo, -1.0);
  EXPECT_DOUBLE_EQ(f.hi, 7.0);
  f = iqr_bounds({3, 3, 3, 3});
  EXPECT_DOUBLE_EQ(f.lo, 3.0);
  EXPECT_DOUBLE_EQ(f.hi, 3.0);
}

TEST(Cleaning, OverallCountsAreConserved) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RatingRecord> recs;
    const int n = 1 + static_cast<int>(rng() % 15);
    for (int i = 0; i < n; ++i) {
      RatingRecord r = rec("r" + std::to_string(i), 1 + static_cast<int>(rng() % 5),
                           1 + static_cast<int>(rng() % 5), std::nullopt,
                           1 + static_cast<int>(rng() % 3));
      r.excluded = rng() % 10 == 0;
      recs.push_back(r);
    }
    const SampleCleaning sc = clean_sample(recs);
    const DimensionCounts& o = sc.report.overall;
    EXPECT_EQ(o.conflict_removed + o.iqr_removed + o.surviving, sc.report.records);
    EXPECT_EQ(sc.report.records + sc.report.excluded_records, n);
    if (!sc.survivors.overall.empty() || !sc.survivors.pc.empty()) {
      const ConsensusScores c = consensus(sc.survivors);
      if (c.mos_overall) {
        EXPECT_GE(*c.mos_overall, 1.0);
        EXPECT_LE(*c.mos_overall, 5.0);
      }
      if (c.pc_level) {
        EXPECT_GE(*c.pc_level, 1);
        EXPECT_LE(*c.pc_level, 3);
      }
    }
  }
}

TEST(Consensus, MeanOfSurvivors) {
  SampleSurvivors s;
  s.sample_id = "s1";
  s.overall = {{"a", 3}, {"b", 4}, {"c", 5}};
  s.pc = {{"a", 3}, {"b", 3}, {"c", 2}, {"d", 2}};
  const ConsensusScores c = consensus(s);
  EXPECT_DOUBLE_EQ(*c.mos_overall, 4.0);
  EXPECT_EQ(c.pc_level, 2);
}

TEST(Exports, EmptyConsensusGivesZeroTable) {
  const auto rows = histograms({}, {});
  EXPECT_FALSE(rows.empty());
  for (const auto& r : rows) EXPECT_EQ(r.count, 0);
  EXPECT_EQ(histogram_csv(rows).rfind("dimension,task,bin,lower,upper,count\n", 0), 0u);
}

TEST(Exports, SingleSamplePopulatesOneCell) {
  ConsensusScores c;
  c.sample_id = "s1";
  c.mos_overall = 4.0;
  c.mos_harmony = 4.0;
  c.mos_naturalness = 4.0;
  int populated = 0;
  for (const GridCell& g : divergence_grid({c})) {
    if (g.count == 0) continue;
    ++populated;
    EXPECT_DOUBLE_EQ(*g.mean_overall, 4.0);
  }
  EXPECT_EQ(populated, 1);
}

TEST(Exports, GridApproximatesAveragePlane) {
  std::mt19937_64 rng(5);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<ConsensusScores> cs;
  for (int i = 0; i < 64 * 120; ++i) {
    ConsensusScores c;
    c.sample_id = "s" + std::to_string(i);
    c.mos_harmony = 1.0 + 4.0 * unit();
    c.mos_naturalness = 1.0 + 4.0 * unit();
    c.mos_overall = (*c.mos_harmony + *c.mos_naturalness) / 2.0;
    cs.push_back(c);
  }
  int total = 0;
  for (const GridCell& g : divergence_grid(cs)) {
    total += g.count;
    ASSERT_GE(g.count, 50);
    const double hc = (bin_lower(g.harmony_bin) + bin_upper(g.harmony_bin)) / 2.0;
    const double nc = (bin_lower(g.naturalness_bin) + bin_upper(g.naturalness_bin)) / 2.0;
    EXPECT_NEAR(*g.mean_overall, (hc + nc) / 2.0, 0.1);
  }
  EXPECT_EQ(total, 64 * 120);
}

}  // namespace
}  // namespace paiqa::stats
