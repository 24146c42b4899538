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

#ifndef PAIQA_CORE_MODEL_HPP_
#define PAIQA_CORE_MODEL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paiqa {

inline constexpr int kSchemaVersion = 1;

// Raised when a value violates a type invariant. Never repaired silently.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for unreadable or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceImage {
  std::string id;
  std::string uri;
  int width_px = 0;
  int height_px = 0;
  std::string origin;

  bool operator==(const SourceImage&) const = default;
};

// Half-open pixel rectangle: [x_min, x_max) x [y_min, y_max).
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool operator==(const BBox&) const = default;
};

// Region center and size as fractions of the image size.
struct NormalizedRegion {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

enum class EditingTask { ObjectOperation, ObjectEnhancement, SemanticChange, StyleChange };
inline constexpr std::array<EditingTask, 4> kAllEditingTasks = {
    EditingTask::ObjectOperation, EditingTask::ObjectEnhancement,
    EditingTask::SemanticChange, EditingTask::StyleChange};

enum class DifficultyRoute { Proprietary, Local };

struct EditSample {
  std::string sample_id;
  SourceImage source;
  std::string edited_uri;
  std::string prompt;
  BBox bbox;
  EditingTask task = EditingTask::ObjectOperation;
  std::string editor_tool;
  DifficultyRoute difficulty_route = DifficultyRoute::Local;
};

enum class QualityLevel { Bad = 1, Poor = 2, Fair = 3, Good = 4, Excellent = 5 };

enum class ExclusionReason {
  UnrelatedSubject,
  WholeImagePromptOnly,
  InfeasiblePrompt,
  UngrammaticalPrompt,
  NoEffectiveEdit,
  EthicsViolation
};

struct RatingRecord {
  std::string rater_id;
  std::string sample_id;
  std::optional<int> overall;
  std::optional<int> harmony;
  std::optional<int> naturalness;
  std::optional<int> prompt_completion;
  bool excluded = false;
  std::optional<ExclusionReason> exclusion_reason;
  std::int64_t timestamp = 0;

  bool operator==(const RatingRecord&) const = default;
};

struct ConsensusScores {
  std::string sample_id;
  std::optional<double> mos_overall;
  std::optional<double> mos_harmony;
  std::optional<double> mos_naturalness;
  std::optional<int> pc_level;
  int n_overall = 0;
  int n_harmony = 0;
  int n_naturalness = 0;
  int n_pc = 0;
};

enum class SubsetKind { Naturalness, Harmony, OverallQuality };
inline constexpr std::array<SubsetKind, 3> kAllSubsets = {
    SubsetKind::Naturalness, SubsetKind::Harmony, SubsetKind::OverallQuality};

// Enum <-> wire names. Parsers throw ValidationError on unknown names.
std::string_view to_string(EditingTask task);
std::string_view to_string(DifficultyRoute route);
std::string_view to_string(ExclusionReason reason);
std::string_view to_string(SubsetKind kind);
EditingTask parse_editing_task(std::string_view name);
DifficultyRoute parse_difficulty_route(std::string_view name);
ExclusionReason parse_exclusion_reason(std::string_view name);
SubsetKind parse_subset_kind(std::string_view name);

// Lowercase human phrase, e.g. "object operation".
std::string_view task_phrase(EditingTask task);

// "bad" .. "excellent".
std::string_view level_word(QualityLevel level);
inline constexpr std::array<std::string_view, 5> kLevelWords = {"bad", "poor", "fair", "good",
                                                                 "excellent"};
QualityLevel level_from_index(int one_based);

void validate(const SourceImage& image);
void validate_bbox(const BBox& bbox, int width_px, int height_px);
void validate(const NormalizedRegion& region);
void validate(const EditSample& sample);
void validate(const RatingRecord& record);
void validate(const ConsensusScores& scores);

// Clamps a detector box onto the half-open image bounds, so inclusive-max
// boxes that overrun by one pixel are tolerated. Sets *clamped when anything
// changed. Throws ValidationError if the result is
// still empty or inverted.
BBox ingest_bbox(BBox raw, int width_px, int height_px, bool* clamped = nullptr);

NormalizedRegion bbox_to_normalized(const BBox& bbox, int width_px, int height_px);
BBox normalized_to_bbox(const NormalizedRegion& region, int width_px, int height_px);

// "cx,cy,w,h" with four fractional digits, rounded half-up.
std::string serialize_region(const NormalizedRegion& region);
NormalizedRegion parse_region(std::string_view text);

}  // namespace paiqa

#endif  // PAIQA_CORE_MODEL_HPP_
