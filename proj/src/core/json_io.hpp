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

// JSON schema of the manifest records and line-delimited file helpers.
// Every from_json validates the decoded value; invalid input throws.

#ifndef PAIQA_CORE_JSON_IO_HPP_
#define PAIQA_CORE_JSON_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/model.hpp"

namespace paiqa {

using json = nlohmann::json;

void to_json(json& j, const SourceImage& v);
void from_json(const json& j, SourceImage& v);
void to_json(json& j, const BBox& v);
void from_json(const json& j, BBox& v);
void to_json(json& j, const EditSample& v);
void from_json(const json& j, EditSample& v);
void to_json(json& j, const RatingRecord& v);
void from_json(const json& j, RatingRecord& v);
void to_json(json& j, const ConsensusScores& v);
void from_json(const json& j, ConsensusScores& v);

// Reads one JSON object per non-empty line. Each must carry a matching
// schema_version. Errors name the file and line.
std::vector<json> read_jsonl(const std::filesystem::path& path);

// Serializes with sorted keys and a schema_version field; '\n' terminated.
std::string to_jsonl_line(json record);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

template <typename T>
std::vector<T> load_manifest(const std::filesystem::path& path) {
  std::vector<T> out;
  std::size_t line = 0;
  for (const json& j : read_jsonl(path)) {
    ++line;
    try {
      out.push_back(j.get<T>());
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": record " + std::to_string(line) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": record " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void save_manifest(const std::filesystem::path& path, const std::vector<T>& items) {
  std::vector<json> records;
  records.reserve(items.size());
  for (const T& item : items) records.emplace_back(item);
  write_jsonl(path, records);
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace paiqa

#endif  // PAIQA_CORE_JSON_IO_HPP_
