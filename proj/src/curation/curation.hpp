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

#ifndef PAIQA_CURATION_CURATION_HPP_
#define PAIQA_CURATION_CURATION_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core/model.hpp"
#include "gateway/gateway.hpp"
#include "json.hpp"

namespace paiqa::curation {

struct SubjectReport {
  std::string subject;
  int count = 0;
};

class MalformedSubjectReply : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RejectReason {
  MissingSourceImage,
  MissingEditedImage,
  InvalidBBox,
  MalformedSubjectReply,
  MultipleSubjects,
  AmbiguousSemantics,
  AreaTooSmall,
  AreaTooLarge,
  AspectRatio,
  PromptFormat,
  BoxLeakage,
  VisualAnomaly,
  AmbiguousPrompt,
  PromptSubjectMisalignment,
  GatewayFailure,
};

std::string_view to_string(RejectReason reason);

// Empty reject means accepted.
struct Decision {
  std::optional<RejectReason> reject;
  bool accepted() const { return !reject.has_value(); }
};

struct CurationConfig {
  std::set<std::string> blacklist{"light", "ripples", "shadow", "reflection", "sky", "water"};
  double min_area_ratio = 0.05;
  double max_area_ratio = 0.75;
  double min_aspect = 0.25;
  double max_aspect = 4.0;
  double route_threshold = 0.30;  // ratio below this goes to proprietary tools
  std::vector<std::string> proprietary_tools{"stable-diffusion-api", "dalle-2", "midjourney"};
  std::vector<std::string> local_tools{
      "instruct-diffusion",  "ledits-pp",          "instructpix2pix",
      "pag",                 "diffedit",           "sd-2-inpainting",
      "sdxl-0.1-inpainting", "flux-controlnet-inpainting", "hunyuan-dit-inpainting"};
  std::uint64_t seed = 0;
  std::string origin = "curated";
  int parallelism = 4;
};

void to_json(nlohmann::json& j, const CurationConfig& c);
void from_json(const nlohmann::json& j, CurationConfig& c);

// "word|count", no spaces, 1 <= count <= 10.
SubjectReport parse_subject_response(std::string_view text);
Decision filter_subject(const SubjectReport& report, const std::set<std::string>& blacklist);

double area_ratio(const BBox& bbox, int width_px, int height_px);
Decision check_bbox(const BBox& bbox, int width_px, int height_px, const CurationConfig& cfg);
DifficultyRoute route_difficulty(double area_ratio, const CurationConfig& cfg = {});

// Rejected edit-prompt reply; reason is PromptFormat or BoxLeakage.
class PromptRejected : public std::runtime_error {
 public:
  PromptRejected(RejectReason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  RejectReason reason() const { return reason_; }

 private:
  RejectReason reason_;
};

bool mentions_box(std::string_view text);
// Trims and checks a writer reply. Simple-task replies must be "a(n) <noun>";
// complex ones a single sentence. Throws PromptRejected.
std::string validate_prompt_reply(std::string_view reply, bool simple_task);

// Simple template for the local route, complex otherwise. One retry on a
// rejected reply; the second rejection propagates.
std::string generate_edit_prompt(gateway::Gateway& gw, const std::string& boxed_uri,
                                 EditingTask task, DifficultyRoute route);

struct CleanResult {
  std::string prompt;
  bool already_clean = false;
};
CleanResult clean_prompt(gateway::Gateway& gw, std::string_view prompt,
                         const std::string& boxed_uri);

enum class ScrutinyFailure { VisualAnomaly, AmbiguousPrompt, PromptSubjectMisalignment };
std::string_view to_string(ScrutinyFailure f);

struct ScrutinyVerdict {
  bool pass = true;
  std::optional<ScrutinyFailure> fail_reason;
};

// Leading "yes"/"no", case-insensitive. Anything else is nullopt.
std::optional<bool> parse_yes_no(std::string_view text);

// Checks in order: visual anomaly, prompt clarity, prompt-subject alignment.
// Stops at the first failure. An unreadable answer counts as a failure.
ScrutinyVerdict scrutinize(gateway::Gateway& gw, const std::string& source_uri,
                           const std::string& edited_uri, const std::string& boxed_edited_uri,
                           std::string_view prompt);

struct Detection {
  std::string image_id;
  std::string subject;
  BBox raw;
};

// JSON array of {image_id, subject, x_min, y_min, x_max, y_max}.
std::vector<Detection> load_detections(const std::filesystem::path& path);

struct CurationInputs {
  std::filesystem::path images_dir;
  std::filesystem::path detections;
  std::filesystem::path edited_dir;
  std::filesystem::path work_dir;  // boxed renderings land here
};

struct Rejection {
  std::string image_id;
  RejectReason reason;
  std::string detail;
};

struct CurationReport {
  std::vector<EditSample> samples;  // sorted by sample_id
  std::vector<Rejection> rejections;  // sorted by image_id
  int already_clean_prompts = 0;
};

CurationReport run_curation(gateway::Gateway& gw, const CurationInputs& in,
                            const CurationConfig& cfg);

}  // namespace paiqa::curation

#endif  // PAIQA_CURATION_CURATION_HPP_
