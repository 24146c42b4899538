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


#include "eval/judge.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <regex>

#include "core/hash.hpp"
#include "core/parallel.hpp"
#include "core/prompts.hpp"

namespace paiqa::eval {

void to_json(nlohmann::json& j, const JudgeScores& s) {
  j = {{"pa", s.pa}, {"overall", s.overall}};
  if (s.lna) j["lna"] = *s.lna;
  if (s.gha) j["gha"] = *s.gha;
}

void to_json(nlohmann::json& j, const JudgeVerdict& v) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : v.repetitions) reps.push_back(r ? nlohmann::json(*r) : nlohmann::json());
  j = {{"sample_id", v.sample_id},
       {"sample_type", v.sample_type},
       {"repetitions", reps},
       {"aggregate", v.aggregate ? nlohmann::json(*v.aggregate) : nlohmann::json()}};
}

std::optional<JudgeScores> parse_judge_reply(std::string_view text, bool type1) {
  static const std::regex kLine(R"(^\s*\**\s*(PA|LNA|GHA|Overall)\s*\**\s*:\s*\**\s*([0-2])\b)",
                                std::regex::icase | std::regex::multiline);
  std::map<std::string, int> seen;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kLine); it != std::sregex_iterator();
       ++it) {
    std::string key = (*it)[1].str();
    std::transform(key.begin(), key.end(), key.begin(), ::toupper);
    const int value = (*it)[2].str()[0] - '0';
    if (auto [pos, fresh] = seen.emplace(key, value); !fresh && pos->second != value) {
      return std::nullopt;
    }
  }
  if (!seen.count("PA") || !seen.count("OVERALL")) return std::nullopt;
  JudgeScores out{seen["PA"], std::nullopt, std::nullopt, seen["OVERALL"]};
  if (!type1) {
    if (!seen.count("LNA") || !seen.count("GHA")) return std::nullopt;
    out.lna = seen["LNA"];
    out.gha = seen["GHA"];
  }
  return out;
}

int aggregate_mode(const std::vector<int>& values) {
  if (values.empty()) throw ValidationError("mode of no values");
  std::map<int, int> count;
  for (int v : values) ++count[v];
  int best = values.front();
  int best_n = 0;
  for (const auto& [v, n] : count) {
    if (n >= best_n) {  // ascending keys: later ties are higher
      best = v;
      best_n = n;
    }
  }
  return best;
}

JudgeScores aggregate_repetitions(const std::vector<JudgeScores>& reps, bool type1) {
  std::vector<int> pa, lna, gha, overall;
  for (const JudgeScores& r : reps) {
    pa.push_back(r.pa);
    overall.push_back(r.overall);
    if (!type1) {
      lna.push_back(r.lna.value());
      gha.push_back(r.gha.value());
    }
  }
  JudgeScores out{aggregate_mode(pa), std::nullopt, std::nullopt, aggregate_mode(overall)};
  if (!type1) {
    out.lna = aggregate_mode(lna);
    out.gha = aggregate_mode(gha);
  }
  return out;
}

JudgeVerdict judge_explanation(gateway::Gateway& gw, const std::string& judge_endpoint,
                               const instruct::GoldRecord& gold, const std::string& response,
                               std::uint64_t seed) {
  const bool type1 = gold.sample_type == 1;
  gateway::LmmRequest req = gateway::LmmRequest::user(
      gateway::LmmRole::Judge,
      {gateway::ContentPart::text(prompts::judge_request(gold.gold_answer, response, !type1))});
  req.temperature = 0.0;

  JudgeVerdict v;
  v.sample_id = gold.sample_id;
  v.sample_type = gold.sample_type;
  std::vector<JudgeScores> valid;
  for (int rep = 0; rep < kJudgeRepetitions; ++rep) {
    std::optional<JudgeScores> scores;
    for (int attempt = 0; attempt < 2 && !scores; ++attempt) {
      req.seed = derive_seed(seed, gold.sample_id + (attempt == 0 ? "" : "#retry"),
                             static_cast<std::uint64_t>(rep));
      scores = parse_judge_reply(gw.send_to(judge_endpoint, req).text, type1);
    }
    if (scores) valid.push_back(*scores);
    v.repetitions.push_back(scores);
  }
  if (static_cast<int>(valid.size()) >= kMinValidRepetitions) {
    v.aggregate = aggregate_repetitions(valid, type1);
  } else {
    spdlog::warn("sample {} unjudged: {} valid repetitions", gold.sample_id, valid.size());
  }
  return v;
}

std::vector<JudgeVerdict> judge_all(gateway::Gateway& gw, const std::string& judge_endpoint,
                                    const std::vector<instruct::GoldRecord>& gold,
                                    const std::map<std::string, std::string>& responses,
                                    std::uint64_t seed, int parallelism) {
  for (const auto& g : gold) {
    if (!responses.count(g.sample_id)) throw DataError("no response for gold sample " + g.sample_id);
  }
  std::vector<instruct::GoldRecord> sorted = gold;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  std::vector<JudgeVerdict> out(sorted.size());
  parallel_for(sorted.size(), parallelism, [&](std::size_t i) {
    out[i] = judge_explanation(gw, judge_endpoint, sorted[i], responses.at(sorted[i].sample_id),
                               seed);
  });
  return out;
}

JudgeReport summarize_judge(const std::vector<JudgeVerdict>& verdicts) {
  JudgeReport r;
  std::map<std::string, std::pair<double, int>> sums;
  for (const JudgeVerdict& v : verdicts) {
    ++r.type_counts[v.sample_type];
    if (!v.aggregate) {
      ++r.unjudged;
      continue;
    }
    ++r.judged;
    const JudgeScores& a = *v.aggregate;
    auto add = [&](const char* k, int x) {
      sums[k].first += x;
      ++sums[k].second;
    };
    add("PA", a.pa);
    add("Overall", a.overall);
    if (a.lna) add("LNA", *a.lna);
    if (a.gha) add("GHA", *a.gha);
  }
  if (r.judged == 0) throw DataError("no sample was judged");
  for (const auto& [k, s] : sums) {
    r.raw[k] = s.first / s.second;
    r.normalized[k] = r.raw[k] / 2.0;
  }
  return r;
}

void to_json(nlohmann::json& j, const JudgeReport& r) {
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [t, n] : r.type_counts) types["Type" + std::to_string(t)] = n;
  j = {{"normalized", r.normalized},
       {"raw_means", r.raw},
       {"type_counts", types},
       {"judged", r.judged},
       {"unjudged", r.unjudged}};
}

}  // namespace paiqa::eval
