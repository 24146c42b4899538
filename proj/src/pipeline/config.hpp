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


#ifndef PAIQA_PIPELINE_CONFIG_HPP_
#define PAIQA_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curation/curation.hpp"
#include "gateway/gateway.hpp"
#include "json.hpp"
#include "rating/service.hpp"

namespace paiqa::pipeline {

// Every violation found while validating a configuration.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative mock paths resolve here
  std::vector<gateway::EndpointConfig> endpoints;
  curation::CurationConfig curation;
  rating::RatingConfig rating;
  std::uint64_t split_seed = 17;
  double test_ratio = 0.2;
  std::uint64_t instruction_seed = 0;
  std::uint64_t judge_seed = 0;
  std::optional<std::string> scoring_endpoint;
  std::optional<std::string> judge_endpoint;
  int parallelism = 4;
  int max_attempts = 5;
  int base_backoff_ms = 1000;
};

// Replaces ${NAME} with the environment value; unset names are violations.
std::string interpolate_env(std::string_view text, std::vector<std::string>& violations);

// Parses and validates; throws ConfigError listing every problem.
PipelineConfig parse_config(const nlohmann::json& raw, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the id when it is not configured.
void require_endpoint(const PipelineConfig& cfg, const std::string& id);

std::unique_ptr<gateway::Gateway> make_gateway(const PipelineConfig& cfg);

}  // namespace paiqa::pipeline

#endif  // PAIQA_PIPELINE_CONFIG_HPP_
