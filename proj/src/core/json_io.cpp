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

#include "core/json_io.hpp"

#include <fstream>
#include <sstream>

namespace paiqa {
namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

void to_json(json& j, const SourceImage& v) {
  j = json{{"id", v.id},
           {"uri", v.uri},
           {"width_px", v.width_px},
           {"height_px", v.height_px},
           {"origin", v.origin}};
}

void from_json(const json& j, SourceImage& v) {
  j.at("id").get_to(v.id);
  j.at("uri").get_to(v.uri);
  j.at("width_px").get_to(v.width_px);
  j.at("height_px").get_to(v.height_px);
  v.origin = j.value("origin", "");
  validate(v);
}

void to_json(json& j, const BBox& v) {
  j = json{{"x_min", v.x_min}, {"y_min", v.y_min}, {"x_max", v.x_max}, {"y_max", v.y_max}};
}

void from_json(const json& j, BBox& v) {
  j.at("x_min").get_to(v.x_min);
  j.at("y_min").get_to(v.y_min);
  j.at("x_max").get_to(v.x_max);
  j.at("y_max").get_to(v.y_max);
}

void to_json(json& j, const EditSample& v) {
  j = json{{"sample_id", v.sample_id},
           {"source", v.source},
           {"edited_uri", v.edited_uri},
           {"prompt", v.prompt},
           {"bbox", v.bbox},
           {"task", to_string(v.task)},
           {"editor_tool", v.editor_tool},
           {"difficulty_route", to_string(v.difficulty_route)}};
}

void from_json(const json& j, EditSample& v) {
  j.at("sample_id").get_to(v.sample_id);
  j.at("source").get_to(v.source);
  j.at("edited_uri").get_to(v.edited_uri);
  j.at("prompt").get_to(v.prompt);
  j.at("bbox").get_to(v.bbox);
  v.task = parse_editing_task(j.at("task").get<std::string>());
  j.at("editor_tool").get_to(v.editor_tool);
  v.difficulty_route = parse_difficulty_route(j.at("difficulty_route").get<std::string>());
  validate(v);
}

void to_json(json& j, const RatingRecord& v) {
  j = json::object();
  j["rater_id"] = v.rater_id;
  j["sample_id"] = v.sample_id;
  put_optional(j, "overall", v.overall);
  put_optional(j, "harmony", v.harmony);
  put_optional(j, "naturalness", v.naturalness);
  put_optional(j, "prompt_completion", v.prompt_completion);
  j["excluded"] = v.excluded;
  j["exclusion_reason"] =
      v.exclusion_reason ? json(std::string(to_string(*v.exclusion_reason))) : json(nullptr);
  j["timestamp"] = v.timestamp;
}

void from_json(const json& j, RatingRecord& v) {
  j.at("rater_id").get_to(v.rater_id);
  j.at("sample_id").get_to(v.sample_id);
  v.overall = get_optional<int>(j, "overall");
  v.harmony = get_optional<int>(j, "harmony");
  v.naturalness = get_optional<int>(j, "naturalness");
  v.prompt_completion = get_optional<int>(j, "prompt_completion");
  v.excluded = j.value("excluded", false);
  auto reason = get_optional<std::string>(j, "exclusion_reason");
  v.exclusion_reason = reason ? std::optional(parse_exclusion_reason(*reason)) : std::nullopt;
  v.timestamp = j.value("timestamp", std::int64_t{0});
  validate(v);
}

void to_json(json& j, const ConsensusScores& v) {
  j = json::object();
  j["sample_id"] = v.sample_id;
  put_optional(j, "mos_overall", v.mos_overall);
  put_optional(j, "mos_harmony", v.mos_harmony);
  put_optional(j, "mos_naturalness", v.mos_naturalness);
  put_optional(j, "pc_level", v.pc_level);
  j["n_overall"] = v.n_overall;
  j["n_harmony"] = v.n_harmony;
  j["n_naturalness"] = v.n_naturalness;
  j["n_pc"] = v.n_pc;
}

void from_json(const json& j, ConsensusScores& v) {
  j.at("sample_id").get_to(v.sample_id);
  v.mos_overall = get_optional<double>(j, "mos_overall");
  v.mos_harmony = get_optional<double>(j, "mos_harmony");
  v.mos_naturalness = get_optional<double>(j, "mos_naturalness");
  v.pc_level = get_optional<int>(j, "pc_level");
  j.at("n_overall").get_to(v.n_overall);
  j.at("n_harmony").get_to(v.n_harmony);
  j.at("n_naturalness").get_to(v.n_naturalness);
  j.at("n_pc").get_to(v.n_pc);
  validate(v);
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": record is not an object");
    }
    const auto version = j.find("schema_version");
    if (version == j.end() || !version->is_number_integer() ||
        version->get<int>() != kSchemaVersion) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": missing or unsupported schema_version");
    }
    j.erase("schema_version");
    out.push_back(std::move(j));
  }
  return out;
}

std::string to_jsonl_line(json record) {
  record["schema_version"] = kSchemaVersion;
  return record.dump() + "\n";
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::string buf;
  for (const json& r : records) buf += to_jsonl_line(r);
  write_file(path, buf);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("short write to " + path.string());
}

}  // namespace paiqa
