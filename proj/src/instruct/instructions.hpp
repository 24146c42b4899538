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


// Instruction records for the three fine-tuning stages.

#ifndef PAIQA_INSTRUCT_INSTRUCTIONS_HPP_
#define PAIQA_INSTRUCT_INSTRUCTIONS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"
#include "gateway/gateway.hpp"
#include "json.hpp"
#include "subsets/split.hpp"

namespace paiqa::instruct {

enum class CotDimension { PromptCompletion, Naturalness, Harmony };
std::string_view to_string(CotDimension d);
CotDimension parse_cot_dimension(std::string_view name);

struct CotSegment {
  CotDimension dimension = CotDimension::PromptCompletion;
  std::string text;
};

enum class Scenario { LowCompletion, FullCompletion };
std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

struct InstructionRecord {
  int stage = 1;
  std::string sample_id;
  std::vector<std::string> image_refs;
  std::string question;
  std::string answer;
  std::optional<std::vector<CotSegment>> cot_segments;
  std::optional<std::string> annotator_id;
  std::optional<std::pair<bool, bool>> scrutiny;
  std::optional<Scenario> scenario;
};

void validate(const InstructionRecord& r);
void to_json(nlohmann::json& j, const InstructionRecord& r);
void from_json(const nlohmann::json& j, InstructionRecord& r);

// Maps a MOS onto five levels over a frozen [min, max] range.
struct LevelMapping {
  double min = 0.0;
  double max = 0.0;
  static constexpr double kEpsilon = 1e-9;
};

LevelMapping mapping_for(const std::vector<subsets::SubsetAssignment>& splits, SubsetKind kind);
// Throws ValidationError when mos lies outside the range.
QualityLevel mos_to_level(double mos, const LevelMapping& m);
// Clamps mos into the range first; used for test samples.
QualityLevel mos_to_level_clamped(double mos, const LevelMapping& m);

// Union of Test-labelled ids.
std::set<std::string> test_ids(const std::vector<subsets::SubsetAssignment>& splits);

// Grounding pairs for every sample outside the test union, sorted by id.
std::vector<InstructionRecord> build_stage1(const std::vector<EditSample>& samples,
                                            const std::vector<subsets::SubsetAssignment>& splits);

struct Stage2Options {
  std::filesystem::path crops_dir;  // naturalness crops are written here
  std::uint64_t seed = 0;
  int parallelism = 4;
  static constexpr int kMinCropSide = 8;
};

// Harmony and naturalness rating pairs over each subset's train split,
// shuffled together.
std::vector<InstructionRecord> build_stage2(gateway::Gateway& gw,
                                            const std::vector<EditSample>& samples,
                                            const std::vector<subsets::SubsetAssignment>& splits,
                                            const Stage2Options& opt);

struct Stage3Options {
  std::uint64_t seed = 0;
  int parallelism = 4;
  subsets::Split split = subsets::Split::Train;
};

// Per-sample record of how the explanation was produced.
struct Stage3Audit {
  std::string sample_id;
  std::vector<std::string> annotators;  // one per generation attempt
  std::vector<std::string> scrutinizers;
  bool qualified = false;
  std::string outcome;  // "qualified", "unqualified", "over-length", "gateway-error"
};

void to_json(nlohmann::json& j, const Stage3Audit& a);

// Type used by the judge: 1 = failed completion, 2 = completed but poor,
// 3 = completed and good; 0 = none of these.
int sample_type(const ConsensusScores& c);

struct GoldRecord {
  std::string sample_id;
  int sample_type = 0;
  std::string gold_answer;
};

void to_json(nlohmann::json& j, const GoldRecord& g);
void from_json(const nlohmann::json& j, GoldRecord& g);

struct Stage3Result {
  std::vector<InstructionRecord> records;  // qualified only, sorted by id
  std::vector<Stage3Audit> audit;          // every candidate, sorted by id
  std::vector<GoldRecord> gold;            // typed samples among `records`
};

// Answer text assembled from the scenario, segments and the overall level.
std::string compose_answer(Scenario scenario, int pc_level,
                           const std::vector<CotSegment>& segments, QualityLevel overall);

// Generates CoT segments for one sample and validates them with both
// scrutinizers. Throws ValidationError if the annotator is also a scrutinizer.
struct CotAttempt {
  std::vector<CotSegment> segments;
  std::vector<bool> verdicts;  // one per scrutinizer, all segments accepted
  bool over_length = false;
};

CotAttempt annotate_and_validate(gateway::Gateway& gw, const EditSample& sample,
                                 const ConsensusScores& c, QualityLevel harmony,
                                 QualityLevel naturalness, const std::string& annotator,
                                 const std::vector<std::string>& scrutinizers,
                                 std::uint64_t seed);

Stage3Result build_stage3(gateway::Gateway& gw, const std::vector<EditSample>& samples,
                          const std::vector<subsets::SubsetAssignment>& splits,
                          const Stage3Options& opt);

}  // namespace paiqa::instruct

#endif  // PAIQA_INSTRUCT_INSTRUCTIONS_HPP_
