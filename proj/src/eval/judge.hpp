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


#ifndef PAIQA_EVAL_JUDGE_HPP_
#define PAIQA_EVAL_JUDGE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gateway/gateway.hpp"
#include "instruct/instructions.hpp"
#include "json.hpp"

namespace paiqa::eval {

inline constexpr int kJudgeRepetitions = 5;
inline constexpr int kMinValidRepetitions = 3;

struct JudgeScores {
  int pa = 0;
  std::optional<int> lna;
  std::optional<int> gha;
  int overall = 0;

  bool operator==(const JudgeScores&) const = default;
};

struct JudgeVerdict {
  std::string sample_id;
  int sample_type = 0;
  std::vector<std::optional<JudgeScores>> repetitions;  // nullopt = missing
  std::optional<JudgeScores> aggregate;                 // nullopt = unjudged
};

void to_json(nlohmann::json& j, const JudgeScores& s);
void to_json(nlohmann::json& j, const JudgeVerdict& v);

// Lines of the form "<DIM>: <0|1|2>". LNA and GHA are required unless
// `type1`, in which case they are ignored.
std::optional<JudgeScores> parse_judge_reply(std::string_view text, bool type1);

// Most frequent value; among tied values the highest wins.
int aggregate_mode(const std::vector<int>& values);
JudgeScores aggregate_repetitions(const std::vector<JudgeScores>& reps, bool type1);

JudgeVerdict judge_explanation(gateway::Gateway& gw, const std::string& judge_endpoint,
                               const instruct::GoldRecord& gold, const std::string& response,
                               std::uint64_t seed);

// One verdict per gold record, sorted by id. Every gold sample needs a
// response.
std::vector<JudgeVerdict> judge_all(gateway::Gateway& gw, const std::string& judge_endpoint,
                                    const std::vector<instruct::GoldRecord>& gold,
                                    const std::map<std::string, std::string>& responses,
                                    std::uint64_t seed, int parallelism);

struct JudgeReport {
  std::map<std::string, double> normalized;  // PA, LNA, GHA, Overall in [0,1]
  std::map<std::string, double> raw;         // 0..2 means
  std::map<int, int> type_counts;
  int judged = 0;
  int unjudged = 0;
};

// Throws DataError when no sample was judged.
JudgeReport summarize_judge(const std::vector<JudgeVerdict>& verdicts);
void to_json(nlohmann::json& j, const JudgeReport& r);

}  // namespace paiqa::eval

#endif  // PAIQA_EVAL_JUDGE_HPP_
