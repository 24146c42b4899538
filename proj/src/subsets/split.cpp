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

#include "subsets/split.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/hash.hpp"
#include "core/json_io.hpp"

namespace paiqa::subsets {

const std::set<std::string>& SubsetSets::of(SubsetKind kind) const {
  switch (kind) {
    case SubsetKind::Naturalness: return naturalness;
    case SubsetKind::Harmony: return harmony;
    case SubsetKind::OverallQuality: return overall;
  }
  return overall;
}

std::set<std::string>& SubsetSets::of(SubsetKind kind) {
  return const_cast<std::set<std::string>&>(std::as_const(*this).of(kind));
}

SubsetSets build_subsets(const std::vector<ConsensusScores>& consensus,
                         const std::vector<EditSample>& samples) {
  std::set<std::string> known;
  for (const EditSample& s : samples) known.insert(s.sample_id);
  SubsetSets out;
  for (const ConsensusScores& c : consensus) {
    if (!known.count(c.sample_id)) {
      spdlog::warn("consensus for unknown sample {} ignored", c.sample_id);
      continue;
    }
    if (c.mos_naturalness) out.naturalness.insert(c.sample_id);
    if (c.mos_harmony) out.harmony.insert(c.sample_id);
    if (c.mos_overall && c.mos_harmony && c.mos_naturalness && c.pc_level) {
      out.overall.insert(c.sample_id);
    }
  }
  return out;
}

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  throw ValidationError("unknown split label: " + std::string(name));
}

bool SubsetAssignment::in(SubsetKind kind) const {
  return std::find(subsets.begin(), subsets.end(), kind) != subsets.end();
}

void to_json(nlohmann::json& j, const SubsetAssignment& a) {
  nlohmann::json names = nlohmann::json::array();
  for (SubsetKind k : a.subsets) names.push_back(to_string(k));
  j = {{"sample_id", a.sample_id},
       {"subsets", names},
       {"split", to_string(a.split)},
       {"consensus", a.consensus}};
}

void from_json(const nlohmann::json& j, SubsetAssignment& a) {
  a.sample_id = j.at("sample_id").get<std::string>();
  a.subsets.clear();
  for (const auto& n : j.at("subsets")) a.subsets.push_back(parse_subset_kind(n.get<std::string>()));
  if (a.subsets.empty()) throw ValidationError("split record " + a.sample_id + " has no subsets");
  a.split = parse_split(j.at("split").get<std::string>());
  a.consensus = j.at("consensus").get<ConsensusScores>();
  if (a.consensus.sample_id != a.sample_id) {
    throw ValidationError("split record " + a.sample_id + " carries consensus of another sample");
  }
}

std::vector<std::string> seeded_permutation(std::vector<std::string> ids, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[uniform_below(rng, i)]);
  }
  return ids;
}

int test_target(std::size_t n, double test_ratio) {
  if (n < kMinSplitSize) return 0;
  return static_cast<int>(std::lround(test_ratio * static_cast<double>(n)));
}

std::vector<SubsetAssignment> split_subsets(const SubsetSets& sets,
                                            const std::vector<ConsensusScores>& consensus,
                                            double test_ratio, std::uint64_t seed) {
  if (!(test_ratio >= 0.0 && test_ratio <= 1.0)) {
    throw ValidationError("test ratio must lie in [0,1]");
  }
  std::map<std::string, const ConsensusScores*> by_id;
  for (const ConsensusScores& c : consensus) by_id[c.sample_id] = &c;

  std::map<std::string, std::vector<SubsetKind>> membership;
  for (SubsetKind k : kAllSubsets) {
    for (const std::string& id : sets.of(k)) membership[id].push_back(k);
  }
  std::map<SubsetKind, int> target;
  std::map<SubsetKind, int> taken;
  for (SubsetKind k : kAllSubsets) {
    target[k] = test_target(sets.of(k).size(), test_ratio);
    taken[k] = 0;
    if (sets.of(k).size() < kMinSplitSize) {
      spdlog::warn("subset {} has {} samples; all kept in train", to_string(k), sets.of(k).size());
    }
  }

  std::vector<std::string> ids;
  for (const auto& [id, _] : membership) ids.push_back(id);
  const std::vector<std::string> order = seeded_permutation(ids, seed);
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  // Most memberships first, then permutation order.
  std::vector<std::string> sweep = order;
  std::stable_sort(sweep.begin(), sweep.end(), [&](const std::string& a, const std::string& b) {
    return membership[a].size() > membership[b].size();
  });

  std::map<std::string, Split> label;
  for (const std::string& id : sweep) {
    const auto& kinds = membership[id];
    const bool room = std::all_of(kinds.begin(), kinds.end(),
                                  [&](SubsetKind k) { return taken[k] < target[k]; });
    label[id] = room ? Split::Test : Split::Train;
    if (room) {
      for (SubsetKind k : kinds) ++taken[k];
    }
  }

  std::vector<SubsetAssignment> out;
  for (const auto& [id, kinds] : membership) {
    SubsetAssignment a;
    a.sample_id = id;
    a.subsets = kinds;
    a.split = label.at(id);
    if (auto it = by_id.find(id); it != by_id.end()) {
      a.consensus = *it->second;
    } else {
      throw DataError("no consensus for subset member " + id);
    }
    out.push_back(std::move(a));
  }
  for (const SplitSummary& s : summarize_split(out, test_ratio)) {
    if (!s.within_tolerance) {
      spdlog::warn("subset {}: {} test samples of {} misses the {:.0f}% target by more than one",
                   to_string(s.kind), s.test, s.size, 100.0 * test_ratio);
    }
  }
  return out;
}

std::vector<SplitSummary> summarize_split(const std::vector<SubsetAssignment>& assignments,
                                          double test_ratio) {
  std::vector<SplitSummary> out;
  for (SubsetKind k : kAllSubsets) {
    SplitSummary s{k};
    for (const SubsetAssignment& a : assignments) {
      if (!a.in(k)) continue;
      ++s.size;
      if (a.split == Split::Test) ++s.test;
    }
    s.target = test_target(s.size, test_ratio);
    s.within_tolerance = s.size < static_cast<int>(kMinSplitSize)
                             ? s.test == 0
                             : std::abs(s.test - test_ratio * s.size) <= 1.0 + 1e-9;
    out.push_back(s);
  }
  return out;
}

ScoreRange train_range(const std::vector<SubsetAssignment>& assignments, SubsetKind kind) {
  ScoreRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  int n = 0;
  for (const SubsetAssignment& a : assignments) {
    if (!a.in(kind) || a.split != Split::Train) continue;
    const auto& c = a.consensus;
    const std::optional<double> mos = kind == SubsetKind::Naturalness ? c.mos_naturalness
                                      : kind == SubsetKind::Harmony   ? c.mos_harmony
                                                                      : c.mos_overall;
    if (!mos) continue;
    r.min = std::min(r.min, *mos);
    r.max = std::max(r.max, *mos);
    ++n;
  }
  if (n == 0) throw DataError("subset " + std::string(to_string(kind)) + " has no train samples");
  return r;
}

}  // namespace paiqa::subsets
