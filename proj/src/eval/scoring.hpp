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


// Scoring a model through the gateway and tabulating its correlations.

#ifndef PAIQA_EVAL_SCORING_HPP_
#define PAIQA_EVAL_SCORING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "eval/metrics.hpp"
#include "gateway/gateway.hpp"
#include "json.hpp"
#include "subsets/split.hpp"

namespace paiqa::eval {

enum class ScoringTask { Harmony, Naturalness, Overall };
std::string_view to_string(ScoringTask t);
ScoringTask parse_scoring_task(std::string_view name);

enum class ScoreMethod { LogprobFusion, LevelWord };
std::string_view to_string(ScoreMethod m);

struct ScorePrediction {
  std::string sample_id;
  double fused_score = 0.0;
  LevelLogits level_probs{};
  ScoreMethod method = ScoreMethod::LogprobFusion;
};

void to_json(nlohmann::json& j, const ScorePrediction& p);
void validate(const ScorePrediction& p);

// First level word in the reply, as its 1-based index.
std::optional<int> parse_level_word(std::string_view text);

// Asks `endpoint_id` to rate one image. Uses logprob fusion when the
// endpoint reports logprobs, otherwise the generated level word.
// Returns nullopt when the reply names no level.
std::optional<ScorePrediction> score_image(gateway::Gateway& gw, const std::string& endpoint_id,
                                           const std::string& question,
                                           const std::string& image_uri,
                                           const std::string& sample_id, std::uint64_t seed);

struct ScoringOptions {
  ScoringTask task = ScoringTask::Harmony;
  std::string endpoint_id;
  std::filesystem::path crops_dir;  // naturalness crops
  std::string regressor = "ols";
  std::uint64_t seed = 0;
  int parallelism = 4;
};

struct ScoringReport {
  std::vector<MetricRow> rows;
  std::vector<ScorePrediction> predictions;  // test samples, sorted by id
  ScoreMethod method = ScoreMethod::LogprobFusion;
  std::string regressor;  // set for the overall task
  int unscored = 0;
};

// Harmony and naturalness are scored on their subset's test split. Overall
// scores come from a regressor fitted on predicted (harmony, naturalness)
// pairs of the overall subset's train split.
ScoringReport run_scoring(gateway::Gateway& gw, const std::vector<EditSample>& samples,
                          const std::vector<subsets::SubsetAssignment>& splits,
                          const ScoringOptions& opt);

}  // namespace paiqa::eval

#endif  // PAIQA_EVAL_SCORING_HPP_
