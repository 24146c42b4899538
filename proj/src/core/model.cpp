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

#include "core/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace paiqa {
namespace {

constexpr double kRegionEps = 1e-6;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<std::pair<Enum, std::string_view>, N>& table,
                std::string_view what) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

constexpr std::array<std::pair<EditingTask, std::string_view>, 4> kTaskNames = {{
    {EditingTask::ObjectOperation, "ObjectOperation"},
    {EditingTask::ObjectEnhancement, "ObjectEnhancement"},
    {EditingTask::SemanticChange, "SemanticChange"},
    {EditingTask::StyleChange, "StyleChange"},
}};

constexpr std::array<std::pair<DifficultyRoute, std::string_view>, 2> kRouteNames = {{
    {DifficultyRoute::Proprietary, "Proprietary"},
    {DifficultyRoute::Local, "Local"},
}};

constexpr std::array<std::pair<ExclusionReason, std::string_view>, 6> kReasonNames = {{
    {ExclusionReason::UnrelatedSubject, "UnrelatedSubject"},
    {ExclusionReason::WholeImagePromptOnly, "WholeImagePromptOnly"},
    {ExclusionReason::InfeasiblePrompt, "InfeasiblePrompt"},
    {ExclusionReason::UngrammaticalPrompt, "UngrammaticalPrompt"},
    {ExclusionReason::NoEffectiveEdit, "NoEffectiveEdit"},
    {ExclusionReason::EthicsViolation, "EthicsViolation"},
}};

constexpr std::array<std::pair<SubsetKind, std::string_view>, 3> kSubsetNames = {{
    {SubsetKind::Naturalness, "Naturalness"},
    {SubsetKind::Harmony, "Harmony"},
    {SubsetKind::OverallQuality, "OverallQuality"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "?";
}

void check_score(const std::optional<int>& score, int lo, int hi, std::string_view field) {
  if (score && (*score < lo || *score > hi)) {
    throw ValidationError(std::string(field) + " must be in [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "], got " + std::to_string(*score));
  }
}

// Half-up rounding to 4 fractional digits, as an integer count of 1e-4 units.
std::int64_t round_units(double v) {
  return static_cast<std::int64_t>(std::floor(v * 10000.0 + 0.5 + 1e-9));
}

}  // namespace

std::string_view to_string(EditingTask task) { return name_of(task, kTaskNames); }
std::string_view to_string(DifficultyRoute route) { return name_of(route, kRouteNames); }
std::string_view to_string(ExclusionReason reason) { return name_of(reason, kReasonNames); }
std::string_view to_string(SubsetKind kind) { return name_of(kind, kSubsetNames); }

EditingTask parse_editing_task(std::string_view name) {
  return parse_enum(name, kTaskNames, "editing task");
}
DifficultyRoute parse_difficulty_route(std::string_view name) {
  return parse_enum(name, kRouteNames, "difficulty route");
}
ExclusionReason parse_exclusion_reason(std::string_view name) {
  return parse_enum(name, kReasonNames, "exclusion reason");
}
SubsetKind parse_subset_kind(std::string_view name) {
  return parse_enum(name, kSubsetNames, "subset kind");
}

std::string_view task_phrase(EditingTask task) {
  switch (task) {
    case EditingTask::ObjectOperation: return "object operation";
    case EditingTask::ObjectEnhancement: return "object enhancement";
    case EditingTask::SemanticChange: return "semantic change";
    case EditingTask::StyleChange: return "style change";
  }
  return "";
}

std::string_view level_word(QualityLevel level) {
  return kLevelWords[static_cast<int>(level) - 1];
}

QualityLevel level_from_index(int one_based) {
  if (one_based < 1 || one_based > 5) {
    throw ValidationError("quality level index out of range: " + std::to_string(one_based));
  }
  return static_cast<QualityLevel>(one_based);
}

void validate(const SourceImage& image) {
  if (image.id.empty()) throw ValidationError("source image id is empty");
  if (image.width_px <= 0) throw ValidationError("source image " + image.id + ": width_px must be > 0");
  if (image.height_px <= 0) throw ValidationError("source image " + image.id + ": height_px must be > 0");
}

void validate_bbox(const BBox& b, int width_px, int height_px) {
  if (b.x_min < 0) throw ValidationError("bbox violates 0 <= x_min");
  if (b.y_min < 0) throw ValidationError("bbox violates 0 <= y_min");
  if (b.x_min >= b.x_max) throw ValidationError("bbox violates x_min < x_max");
  if (b.y_min >= b.y_max) throw ValidationError("bbox violates y_min < y_max");
  if (b.x_max > width_px) throw ValidationError("bbox violates x_max <= width_px");
  if (b.y_max > height_px) throw ValidationError("bbox violates y_max <= height_px");
}

namespace {

void check_region(const NormalizedRegion& r, double eps) {
  auto in_unit = [eps](double v) { return v >= -eps && v <= 1.0 + eps; };
  if (!in_unit(r.cx) || !in_unit(r.cy)) throw ValidationError("region center outside [0,1]");
  if (!(r.w > 0.0) || r.w > 1.0 + eps) throw ValidationError("region width outside (0,1]");
  if (!(r.h > 0.0) || r.h > 1.0 + eps) throw ValidationError("region height outside (0,1]");
  if (r.cx - r.w / 2 < -eps || r.cx + r.w / 2 > 1.0 + eps) {
    throw ValidationError("region extends past the horizontal image bounds");
  }
  if (r.cy - r.h / 2 < -eps || r.cy + r.h / 2 > 1.0 + eps) {
    throw ValidationError("region extends past the vertical image bounds");
  }
}

// Four-digit serialization moves each field by up to 5e-5, so an edge
// extent can move by 7.5e-5.
constexpr double kSerializedRegionEps = 1e-4;

}  // namespace

void validate(const NormalizedRegion& r) { check_region(r, kRegionEps); }

void validate(const EditSample& s) {
  if (s.sample_id.empty()) throw ValidationError("sample_id is empty");
  validate(s.source);
  if (s.prompt.empty()) throw ValidationError("sample " + s.sample_id + ": prompt is empty");
  try {
    validate_bbox(s.bbox, s.source.width_px, s.source.height_px);
  } catch (const ValidationError& e) {
    throw ValidationError("sample " + s.sample_id + ": " + e.what());
  }
}

void validate(const RatingRecord& r) {
  if (r.rater_id.empty()) throw ValidationError("rating record has empty rater_id");
  if (r.sample_id.empty()) throw ValidationError("rating record has empty sample_id");
  if (r.excluded) {
    if (r.overall || r.harmony || r.naturalness || r.prompt_completion) {
      throw ValidationError("excluded rating record must not carry scores");
    }
    if (!r.exclusion_reason) throw ValidationError("excluded rating record needs exclusion_reason");
    return;
  }
  // Campaigns may collect a subset of the dimensions; at least one is required.
  if (!r.overall && !r.harmony && !r.naturalness && !r.prompt_completion) {
    throw ValidationError("rating record carries no score");
  }
  if (r.exclusion_reason) throw ValidationError("non-excluded rating record carries a reason");
  check_score(r.overall, 1, 5, "overall");
  check_score(r.harmony, 1, 5, "harmony");
  check_score(r.naturalness, 1, 5, "naturalness");
  check_score(r.prompt_completion, 1, 3, "prompt_completion");
}

void validate(const ConsensusScores& c) {
  auto check = [&](const std::optional<double>& mos, int n, std::string_view name) {
    if (mos.has_value() != (n >= 1)) {
      throw ValidationError("sample " + c.sample_id + ": " + std::string(name) +
                            " presence disagrees with its survivor count");
    }
    if (mos && (*mos < 1.0 || *mos > 5.0)) {
      throw ValidationError("sample " + c.sample_id + ": " + std::string(name) + " outside [1,5]");
    }
  };
  check(c.mos_overall, c.n_overall, "mos_overall");
  check(c.mos_harmony, c.n_harmony, "mos_harmony");
  check(c.mos_naturalness, c.n_naturalness, "mos_naturalness");
  if (c.pc_level.has_value() != (c.n_pc >= 1)) {
    throw ValidationError("sample " + c.sample_id + ": pc_level presence disagrees with n_pc");
  }
  if (c.pc_level && (*c.pc_level < 1 || *c.pc_level > 3)) {
    throw ValidationError("sample " + c.sample_id + ": pc_level outside [1,3]");
  }
}

BBox ingest_bbox(BBox raw, int width_px, int height_px, bool* clamped) {
  BBox b = raw;
  b.x_min = std::clamp(b.x_min, 0, width_px);
  b.y_min = std::clamp(b.y_min, 0, height_px);
  b.x_max = std::clamp(b.x_max, 0, width_px);
  b.y_max = std::clamp(b.y_max, 0, height_px);
  if (clamped) *clamped = !(b == raw);
  validate_bbox(b, width_px, height_px);
  return b;
}

NormalizedRegion bbox_to_normalized(const BBox& b, int width_px, int height_px) {
  validate_bbox(b, width_px, height_px);
  const double w = width_px;
  const double h = height_px;
  return NormalizedRegion{
      .cx = (b.x_min + b.x_max) / (2.0 * w),
      .cy = (b.y_min + b.y_max) / (2.0 * h),
      .w = (b.x_max - b.x_min) / w,
      .h = (b.y_max - b.y_min) / h,
  };
}

BBox normalized_to_bbox(const NormalizedRegion& r, int width_px, int height_px) {
  check_region(r, kSerializedRegionEps);
  const double half_w = r.w * width_px / 2.0;
  const double half_h = r.h * height_px / 2.0;
  BBox b{
      .x_min = static_cast<int>(std::lround(r.cx * width_px - half_w)),
      .y_min = static_cast<int>(std::lround(r.cy * height_px - half_h)),
      .x_max = static_cast<int>(std::lround(r.cx * width_px + half_w)),
      .y_max = static_cast<int>(std::lround(r.cy * height_px + half_h)),
  };
  return ingest_bbox(b, width_px, height_px);
}

std::string serialize_region(const NormalizedRegion& r) {
  std::string out;
  for (double v : {r.cx, r.cy, r.w, r.h}) {
    const std::int64_t units = round_units(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%lld.%04lld", out.empty() ? "" : ",",
                  static_cast<long long>(units / 10000), static_cast<long long>(units % 10000));
    out += buf;
  }
  return out;
}

NormalizedRegion parse_region(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) {
      tokens.push_back(text.substr(pos));
      break;
    }
    tokens.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (tokens.size() != 4) {
    throw ValidationError("region must have exactly four comma-separated fields");
  }
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string_view token = tokens[i];
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v[i]);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      throw ValidationError("malformed region field '" + std::string(token) + "'");
    }
  }
  NormalizedRegion r{v[0], v[1], v[2], v[3]};
  check_region(r, kSerializedRegionEps);
  return r;
}

}  // namespace paiqa
