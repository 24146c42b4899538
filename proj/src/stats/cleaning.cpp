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

#include "stats/cleaning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace paiqa::stats {

double quantile_linear(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty list");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

Fences iqr_bounds(std::vector<double> values) {
  if (values.size() < kMinIqrCount) {
    throw ValidationError("IQR fences need at least 4 values, got " +
                          std::to_string(values.size()));
  }
  std::sort(values.begin(), values.end());
  const double q1 = quantile_linear(values, 0.25);
  const double q3 = quantile_linear(values, 0.75);
  const double iqr = q3 - q1;
  return {q1 - 1.5 * iqr, q3 + 1.5 * iqr};
}

bool is_conflict(const RatingRecord& r) {
  return !r.excluded && r.prompt_completion && r.overall && *r.prompt_completion <= 2 &&
         *r.overall >= 3;
}

ConflictSplit filter_conflicts(const std::vector<RatingRecord>& records) {
  ConflictSplit out;
  for (const RatingRecord& r : records) (is_conflict(r) ? out.removed : out.kept).push_back(r);
  return out;
}

namespace {

// One IQR pass. Returns the removed votes; `votes` keeps the survivors.
std::vector<Vote> iqr_pass(std::vector<Vote>& votes) {
  if (votes.size() < kMinIqrCount) return {};
  std::vector<double> values;
  values.reserve(votes.size());
  for (const Vote& v : votes) values.push_back(v.value);
  const Fences f = iqr_bounds(values);
  std::vector<Vote> kept;
  std::vector<Vote> removed;
  for (Vote& v : votes) {
    ((v.value >= f.lo && v.value <= f.hi) ? kept : removed).push_back(std::move(v));
  }
  votes = std::move(kept);
  return removed;
}

void count_submitted(const RatingRecord& r, CleaningEntry& e) {
  if (r.overall) ++e.overall.submitted;
  if (r.harmony) ++e.harmony.submitted;
  if (r.naturalness) ++e.naturalness.submitted;
  if (r.prompt_completion) ++e.pc.submitted;
}

}  // namespace

SampleCleaning clean_sample(const std::vector<RatingRecord>& records) {
  SampleCleaning out;
  if (records.empty()) return out;
  const std::string& id = records.front().sample_id;
  out.survivors.sample_id = id;
  CleaningEntry& e = out.report;
  e.sample_id = id;

  std::vector<RatingRecord> live;
  for (const RatingRecord& r : records) {
    if (r.sample_id != id) throw ValidationError("clean_sample given records of several samples");
    if (r.excluded) {
      ++e.excluded_records;
      continue;
    }
    ++e.records;
    count_submitted(r, e);
    live.push_back(r);
  }

  ConflictSplit split = filter_conflicts(live);
  e.conflict_records = static_cast<int>(split.removed.size());
  for (const RatingRecord& r : split.removed) {
    if (r.overall) ++e.overall.conflict_removed;
    if (r.harmony) ++e.harmony.conflict_removed;
    if (r.naturalness) ++e.naturalness.conflict_removed;
    if (r.prompt_completion) ++e.pc.conflict_removed;
  }

  SampleSurvivors& s = out.survivors;
  for (const RatingRecord& r : split.kept) {
    if (r.overall) s.overall.push_back({r.rater_id, *r.overall});
    if (r.harmony) s.harmony.push_back({r.rater_id, *r.harmony});
    if (r.naturalness) s.naturalness.push_back({r.rater_id, *r.naturalness});
    if (r.prompt_completion) s.pc.push_back({r.rater_id, *r.prompt_completion});
  }

  const std::vector<Vote> dropped_overall = iqr_pass(s.overall);
  e.overall.iqr_removed = static_cast<int>(dropped_overall.size());
  e.harmony.iqr_removed = static_cast<int>(iqr_pass(s.harmony).size());
  e.naturalness.iqr_removed = static_cast<int>(iqr_pass(s.naturalness).size());

  std::set<std::string> dragged;
  for (const Vote& v : dropped_overall) dragged.insert(v.rater_id);
  const auto before = s.pc.size();
  std::erase_if(s.pc, [&](const Vote& v) { return dragged.count(v.rater_id) > 0; });
  e.pc.cascade_removed = static_cast<int>(before - s.pc.size());

  e.overall.surviving = static_cast<int>(s.overall.size());
  e.harmony.surviving = static_cast<int>(s.harmony.size());
  e.naturalness.surviving = static_cast<int>(s.naturalness.size());
  e.pc.surviving = static_cast<int>(s.pc.size());
  return out;
}

int pc_vote(const std::vector<int>& levels) {
  if (levels.empty()) throw ValidationError("pc vote over no ratings");
  std::array<int, 4> counts{};
  for (int l : levels) {
    if (l < 1 || l > 3) throw ValidationError("prompt completion level out of range");
    ++counts[l];
  }
  int best = 1;
  for (int l = 2; l <= 3; ++l) {
    if (counts[l] > counts[best]) best = l;
  }
  return best;
}

ConsensusScores consensus(const SampleSurvivors& s) {
  ConsensusScores c;
  c.sample_id = s.sample_id;
  auto mean = [](const std::vector<Vote>& votes) -> std::optional<double> {
    if (votes.empty()) return std::nullopt;
    long sum = 0;
    for (const Vote& v : votes) sum += v.value;
    return static_cast<double>(sum) / static_cast<double>(votes.size());
  };
  c.mos_overall = mean(s.overall);
  c.mos_harmony = mean(s.harmony);
  c.mos_naturalness = mean(s.naturalness);
  if (!s.pc.empty()) {
    std::vector<int> levels;
    for (const Vote& v : s.pc) levels.push_back(v.value);
    c.pc_level = pc_vote(levels);
  }
  c.n_overall = static_cast<int>(s.overall.size());
  c.n_harmony = static_cast<int>(s.harmony.size());
  c.n_naturalness = static_cast<int>(s.naturalness.size());
  c.n_pc = static_cast<int>(s.pc.size());
  validate(c);
  return c;
}

CleaningOutput clean_ratings(const std::vector<RatingRecord>& records) {
  std::map<std::string, std::vector<RatingRecord>> by_sample;
  for (const RatingRecord& r : records) by_sample[r.sample_id].push_back(r);
  CleaningOutput out;
  for (const auto& [id, recs] : by_sample) {
    SampleCleaning sc = clean_sample(recs);
    out.consensus.push_back(consensus(sc.survivors));
    out.report.push_back(std::move(sc.report));
  }
  return out;
}

namespace {

nlohmann::json dim_json(const DimensionCounts& d) {
  return {{"submitted", d.submitted},
          {"conflict_removed", d.conflict_removed},
          {"iqr_removed", d.iqr_removed},
          {"cascade_removed", d.cascade_removed},
          {"surviving", d.surviving}};
}

}  // namespace

nlohmann::json report_to_json(const std::vector<CleaningEntry>& report) {
  nlohmann::json samples = nlohmann::json::array();
  DimensionCounts tot_o, tot_h, tot_n, tot_p;
  int conflicts = 0;
  int excluded = 0;
  auto add = [](DimensionCounts& t, const DimensionCounts& d) {
    t.submitted += d.submitted;
    t.conflict_removed += d.conflict_removed;
    t.iqr_removed += d.iqr_removed;
    t.cascade_removed += d.cascade_removed;
    t.surviving += d.surviving;
  };
  for (const CleaningEntry& e : report) {
    samples.push_back({{"sample_id", e.sample_id},
                       {"records", e.records},
                       {"excluded_records", e.excluded_records},
                       {"conflict_records", e.conflict_records},
                       {"overall", dim_json(e.overall)},
                       {"harmony", dim_json(e.harmony)},
                       {"naturalness", dim_json(e.naturalness)},
                       {"prompt_completion", dim_json(e.pc)}});
    add(tot_o, e.overall);
    add(tot_h, e.harmony);
    add(tot_n, e.naturalness);
    add(tot_p, e.pc);
    conflicts += e.conflict_records;
    excluded += e.excluded_records;
  }
  return {{"totals",
           {{"samples", report.size()},
            {"conflict_records", conflicts},
            {"excluded_records", excluded},
            {"overall", dim_json(tot_o)},
            {"harmony", dim_json(tot_h)},
            {"naturalness", dim_json(tot_n)},
            {"prompt_completion", dim_json(tot_p)}}},
          {"samples", samples}};
}

}  // namespace paiqa::stats
