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

#include "curation/curation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

#include "core/hash.hpp"
#include "core/image.hpp"
#include "core/json_io.hpp"
#include "core/parallel.hpp"
#include "core/text.hpp"
#include "core/prompts.hpp"

namespace paiqa::curation {

using gateway::ContentPart;
using gateway::Gateway;
using gateway::LmmRequest;
using gateway::LmmRole;

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::MissingSourceImage: return "MissingSourceImage";
    case RejectReason::MissingEditedImage: return "MissingEditedImage";
    case RejectReason::InvalidBBox: return "InvalidBBox";
    case RejectReason::MalformedSubjectReply: return "MalformedSubjectReply";
    case RejectReason::MultipleSubjects: return "MultipleSubjects";
    case RejectReason::AmbiguousSemantics: return "AmbiguousSemantics";
    case RejectReason::AreaTooSmall: return "AreaTooSmall";
    case RejectReason::AreaTooLarge: return "AreaTooLarge";
    case RejectReason::AspectRatio: return "AspectRatio";
    case RejectReason::PromptFormat: return "PromptFormat";
    case RejectReason::BoxLeakage: return "BoxLeakage";
    case RejectReason::VisualAnomaly: return "VisualAnomaly";
    case RejectReason::AmbiguousPrompt: return "AmbiguousPrompt";
    case RejectReason::PromptSubjectMisalignment: return "PromptSubjectMisalignment";
    case RejectReason::GatewayFailure: return "GatewayFailure";
  }
  return "?";
}

std::string_view to_string(ScrutinyFailure f) {
  switch (f) {
    case ScrutinyFailure::VisualAnomaly: return "VisualAnomaly";
    case ScrutinyFailure::AmbiguousPrompt: return "AmbiguousPrompt";
    case ScrutinyFailure::PromptSubjectMisalignment: return "PromptSubjectMisalignment";
  }
  return "?";
}

void to_json(nlohmann::json& j, const CurationConfig& c) {
  j = nlohmann::json{{"blacklist", c.blacklist},
                     {"min_area_ratio", c.min_area_ratio},
                     {"max_area_ratio", c.max_area_ratio},
                     {"min_aspect", c.min_aspect},
                     {"max_aspect", c.max_aspect},
                     {"route_threshold", c.route_threshold},
                     {"proprietary_tools", c.proprietary_tools},
                     {"local_tools", c.local_tools},
                     {"seed", c.seed},
                     {"origin", c.origin},
                     {"parallelism", c.parallelism}};
}

void from_json(const nlohmann::json& j, CurationConfig& c) {
  const CurationConfig d;
  c.blacklist = j.value("blacklist", d.blacklist);
  c.min_area_ratio = j.value("min_area_ratio", d.min_area_ratio);
  c.max_area_ratio = j.value("max_area_ratio", d.max_area_ratio);
  c.min_aspect = j.value("min_aspect", d.min_aspect);
  c.max_aspect = j.value("max_aspect", d.max_aspect);
  c.route_threshold = j.value("route_threshold", d.route_threshold);
  c.proprietary_tools = j.value("proprietary_tools", d.proprietary_tools);
  c.local_tools = j.value("local_tools", d.local_tools);
  c.seed = j.value("seed", d.seed);
  c.origin = j.value("origin", d.origin);
  c.parallelism = j.value("parallelism", d.parallelism);
}

SubjectReport parse_subject_response(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw MalformedSubjectReply("no '|' in subject reply: " + std::string(text));
  }
  if (text.find('|', bar + 1) != std::string_view::npos) {
    throw MalformedSubjectReply("more than one '|' in subject reply: " + std::string(text));
  }
  const std::string_view word = text.substr(0, bar);
  const std::string_view count = text.substr(bar + 1);
  if (word.empty()) throw MalformedSubjectReply("empty subject");
  const auto has_space = [](std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  };
  if (has_space(word) || has_space(count)) {
    throw MalformedSubjectReply("subject reply contains whitespace: " + std::string(text));
  }
  int n = 0;
  const auto [end, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
  if (ec != std::errc() || end != count.data() + count.size() || count.empty()) {
    throw MalformedSubjectReply("count is not an integer: " + std::string(count));
  }
  if (n < 1 || n > 10) throw MalformedSubjectReply("count outside 1..10: " + std::to_string(n));
  return {std::string(word), n};
}

Decision filter_subject(const SubjectReport& report, const std::set<std::string>& blacklist) {
  if (report.count != 1) return {RejectReason::MultipleSubjects};
  std::string lower = report.subject;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (blacklist.count(lower)) return {RejectReason::AmbiguousSemantics};
  return {};
}

double area_ratio(const BBox& bbox, int width_px, int height_px) {
  return static_cast<double>(bbox.area()) /
         (static_cast<double>(width_px) * static_cast<double>(height_px));
}

Decision check_bbox(const BBox& bbox, int width_px, int height_px, const CurationConfig& cfg) {
  const double ratio = area_ratio(bbox, width_px, height_px);
  if (ratio < cfg.min_area_ratio) return {RejectReason::AreaTooSmall};
  if (ratio > cfg.max_area_ratio) return {RejectReason::AreaTooLarge};
  const double aspect = static_cast<double>(bbox.width()) / bbox.height();
  if (aspect < cfg.min_aspect || aspect > cfg.max_aspect) return {RejectReason::AspectRatio};
  return {};
}

DifficultyRoute route_difficulty(double ratio, const CurationConfig& cfg) {
  return ratio < cfg.route_threshold ? DifficultyRoute::Proprietary : DifficultyRoute::Local;
}

namespace {

// Images first, then the instruction text.
LmmRequest image_request(LmmRole role, const std::vector<std::string>& images, std::string text,
                         double temperature) {
  std::vector<ContentPart> parts;
  for (const std::string& uri : images) parts.push_back(ContentPart::image(uri));
  parts.push_back(ContentPart::text(std::move(text)));
  LmmRequest req = LmmRequest::user(role, std::move(parts));
  req.temperature = temperature;
  return req;
}

}  // namespace

bool mentions_box(std::string_view text) {
  static const std::regex kBox(R"(\b(box|boxed|boxes|bounding|bbox)\b)",
                               std::regex::icase);
  return std::regex_search(text.begin(), text.end(), kBox);
}

std::string validate_prompt_reply(std::string_view reply, bool simple_task) {
  std::string p = trim(reply);
  if (p.empty()) throw PromptRejected(RejectReason::PromptFormat, "empty prompt");
  if (mentions_box(p)) throw PromptRejected(RejectReason::BoxLeakage, "prompt mentions the box: " + p);
  if (simple_task) {
    static const std::regex kNoun(R"(^an? [A-Za-z-]+\.?$)", std::regex::icase);
    if (!std::regex_match(p, kNoun)) {
      throw PromptRejected(RejectReason::PromptFormat, "expected 'a' + noun, got: " + p);
    }
    if (p.back() == '.') p.pop_back();
    return p;
  }
  if (sentence_count(p) != 1) {
    throw PromptRejected(RejectReason::PromptFormat, "expected one sentence, got: " + p);
  }
  return p;
}

std::string generate_edit_prompt(Gateway& gw, const std::string& boxed_uri, EditingTask task,
                                 DifficultyRoute route) {
  const bool simple = route == DifficultyRoute::Local;
  const std::string text = simple ? prompts::simple_edit_prompt(task_phrase(task))
                                  : prompts::complex_edit_prompt(task_phrase(task));
  for (int attempt = 0;; ++attempt) {
    LmmRequest req = image_request(LmmRole::PromptWriter, {boxed_uri}, text, 0.7);
    req.seed = static_cast<std::uint64_t>(attempt);
    const auto resp = gw.send(req);
    try {
      return validate_prompt_reply(resp.text, simple);
    } catch (const PromptRejected& e) {
      if (attempt >= 1) throw;
      spdlog::debug("prompt rejected ({}), retrying: {}", to_string(e.reason()), e.what());
    }
  }
}

CleanResult clean_prompt(Gateway& gw, std::string_view prompt, const std::string& boxed_uri) {
  LmmRequest req =
      image_request(LmmRole::PromptCleaner, {boxed_uri}, prompts::prompt_cleaning(prompt), 0.0);
  const std::string cleaned = trim(gw.send(req).text);
  if (cleaned.empty()) throw PromptRejected(RejectReason::PromptFormat, "cleaner returned nothing");
  if (mentions_box(cleaned)) {
    throw PromptRejected(RejectReason::BoxLeakage, "cleaned prompt mentions the box: " + cleaned);
  }
  return {cleaned, cleaned == prompt};
}

std::optional<bool> parse_yes_no(std::string_view text) {
  std::string word;
  for (char c : trim(text)) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (word == "yes") return true;
  if (word == "no") return false;
  return std::nullopt;
}

ScrutinyVerdict scrutinize(Gateway& gw, const std::string& source_uri,
                           const std::string& edited_uri, const std::string& boxed_edited_uri,
                           std::string_view prompt) {
  struct Check {
    ScrutinyFailure failure;
    std::vector<std::string> images;
    std::string text;
  };
  const Check checks[] = {
      {ScrutinyFailure::VisualAnomaly, {source_uri, edited_uri}, prompts::scrutiny_visual_anomaly()},
      {ScrutinyFailure::AmbiguousPrompt, {edited_uri}, prompts::scrutiny_prompt_clarity(prompt)},
      {ScrutinyFailure::PromptSubjectMisalignment,
       {boxed_edited_uri},
       prompts::scrutiny_subject_alignment(prompt)},
  };
  for (const Check& c : checks) {
    const auto resp = gw.send(image_request(LmmRole::Scrutineer, c.images, c.text, 0.0));
    const auto ok = parse_yes_no(resp.text);
    if (!ok.has_value()) {
      spdlog::warn("unreadable scrutiny answer '{}' treated as failure", resp.text);
    }
    if (!ok.value_or(false)) return {false, c.failure};
  }
  return {true, std::nullopt};
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw DataError(path.string() + ": expected a JSON array");
  std::vector<Detection> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& d = doc[i];
    try {
      Detection det{d.at("image_id").get<std::string>(), d.value("subject", ""),
                    BBox{d.at("x_min").get<int>(), d.at("y_min").get<int>(),
                         d.at("x_max").get<int>(), d.at("y_max").get<int>()}};
      if (!seen.insert(det.image_id).second) {
        throw DataError(path.string() + ": duplicate image_id '" + det.image_id + "'");
      }
      out.push_back(std::move(det));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

namespace {

constexpr Rgb kBoxColor = {255, 0, 0};

struct Outcome {
  std::optional<EditSample> sample;
  std::optional<Rejection> rejection;
  bool already_clean = false;
};

Outcome reject(const std::string& id, RejectReason r, std::string detail = {}) {
  spdlog::info("drop {}: {} {}", id, to_string(r), detail);
  return {std::nullopt, Rejection{id, r, std::move(detail)}, false};
}

std::string uri_of(const std::filesystem::path& p) { return p.generic_string(); }

Outcome curate_one(Gateway& gw, const Detection& det, const CurationInputs& in,
                   const CurationConfig& cfg) {
  const std::string& id = det.image_id;
  const auto source_path = in.images_dir / (id + ".png");
  if (!std::filesystem::exists(source_path)) {
    return reject(id, RejectReason::MissingSourceImage, uri_of(source_path));
  }
  const ImageSize size = read_png_size(source_path);

  BBox bbox;
  try {
    bool clamped = false;
    bbox = ingest_bbox(det.raw, size.width, size.height, &clamped);
    if (clamped) spdlog::warn("{}: detector box clamped to image bounds", id);
  } catch (const ValidationError& e) {
    return reject(id, RejectReason::InvalidBBox, e.what());
  }

  try {
    const auto resp = gw.send(image_request(LmmRole::SubjectRecognizer, {uri_of(source_path)},
                                            prompts::subject_recognition(), 0.0));
    SubjectReport report;
    try {
      report = parse_subject_response(trim(resp.text));
    } catch (const MalformedSubjectReply& e) {
      return reject(id, RejectReason::MalformedSubjectReply, e.what());
    }
    if (auto d = filter_subject(report, cfg.blacklist); !d.accepted()) {
      return reject(id, *d.reject, report.subject);
    }
    if (auto d = check_bbox(bbox, size.width, size.height, cfg); !d.accepted()) {
      return reject(id, *d.reject);
    }
    const auto edited_path = in.edited_dir / (id + ".png");
    if (!std::filesystem::exists(edited_path)) {
      return reject(id, RejectReason::MissingEditedImage, uri_of(edited_path));
    }

    const DifficultyRoute route = route_difficulty(area_ratio(bbox, size.width, size.height), cfg);
    const std::uint64_t h = derive_seed(cfg.seed, "task:" + id);
    EditingTask task;
    if (route == DifficultyRoute::Proprietary) {
      task = kAllEditingTasks[h % kAllEditingTasks.size()];
    } else {
      task = (h % 2 == 0) ? EditingTask::ObjectOperation : EditingTask::StyleChange;
    }
    const auto& tools =
        route == DifficultyRoute::Proprietary ? cfg.proprietary_tools : cfg.local_tools;
    if (tools.empty()) throw ValidationError("no editing tools configured for route");
    const std::string tool = tools[derive_seed(cfg.seed, "tool:" + id) % tools.size()];

    Image boxed = read_png(source_path);
    boxed.draw_outline(bbox, kBoxColor);
    const auto boxed_path = in.work_dir / "boxed" / (id + ".png");
    write_png(boxed_path, boxed);
    Image edited = read_png(edited_path);
    if (edited.width() != size.width || edited.height() != size.height) {
      return reject(id, RejectReason::MissingEditedImage, "edited image size differs from source");
    }
    edited.draw_outline(bbox, kBoxColor);
    const auto boxed_edited_path = in.work_dir / "boxed-edited" / (id + ".png");
    write_png(boxed_edited_path, edited);

    std::string prompt;
    CleanResult cleaned;
    try {
      prompt = generate_edit_prompt(gw, uri_of(boxed_path), task, route);
      cleaned = clean_prompt(gw, prompt, uri_of(boxed_path));
    } catch (const PromptRejected& e) {
      return reject(id, e.reason(), e.what());
    }

    const ScrutinyVerdict v = scrutinize(gw, uri_of(source_path), uri_of(edited_path),
                                         uri_of(boxed_edited_path), cleaned.prompt);
    if (!v.pass) {
      switch (*v.fail_reason) {
        case ScrutinyFailure::VisualAnomaly: return reject(id, RejectReason::VisualAnomaly);
        case ScrutinyFailure::AmbiguousPrompt: return reject(id, RejectReason::AmbiguousPrompt);
        case ScrutinyFailure::PromptSubjectMisalignment:
          return reject(id, RejectReason::PromptSubjectMisalignment);
      }
    }

    EditSample s;
    s.sample_id = id;
    s.source = SourceImage{id, uri_of(source_path), size.width, size.height, cfg.origin};
    s.edited_uri = uri_of(edited_path);
    s.prompt = cleaned.prompt;
    s.bbox = bbox;
    s.task = task;
    s.editor_tool = tool;
    s.difficulty_route = route;
    validate(s);
    return {std::move(s), std::nullopt, cleaned.already_clean};
  } catch (const gateway::GatewayError& e) {
    return reject(id, RejectReason::GatewayFailure, e.what());
  }
}

}  // namespace

CurationReport run_curation(Gateway& gw, const CurationInputs& in, const CurationConfig& cfg) {
  const std::vector<Detection> detections = load_detections(in.detections);
  std::vector<Outcome> outcomes(detections.size());
  parallel_for(detections.size(), cfg.parallelism,
               [&](std::size_t i) { outcomes[i] = curate_one(gw, detections[i], in, cfg); });

  CurationReport report;
  for (Outcome& o : outcomes) {
    if (o.sample) {
      report.samples.push_back(std::move(*o.sample));
      if (o.already_clean) ++report.already_clean_prompts;
    }
    if (o.rejection) report.rejections.push_back(std::move(*o.rejection));
  }
  std::sort(report.samples.begin(), report.samples.end(),
            [](const EditSample& a, const EditSample& b) { return a.sample_id < b.sample_id; });
  std::sort(report.rejections.begin(), report.rejections.end(),
            [](const Rejection& a, const Rejection& b) { return a.image_id < b.image_id; });
  return report;
}

}  // namespace paiqa::curation
