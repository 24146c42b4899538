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


#include "pipeline/config.hpp"

#include <cstdlib>
#include <map>
#include <set>

#include "core/json_io.hpp"
#include "gateway/http_provider.hpp"

namespace paiqa::pipeline {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const std::string& s : v) out += "\n  - " + s;
  return out;
}

void interpolate_all(nlohmann::json& j, std::vector<std::string>& violations) {
  if (j.is_string()) {
    j = interpolate_env(j.get<std::string>(), violations);
  } else if (j.is_structured()) {
    for (auto& child : j) interpolate_all(child, violations);
  }
}

// Reads j[key] as a non-negative integer seed when present.
void read_seed(const nlohmann::json& j, const char* key, const std::string& where,
               std::uint64_t& out, std::vector<std::string>& violations) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) {
    violations.push_back(where + "." + key + " must be a non-negative integer");
    return;
  }
  out = v.get<std::uint64_t>();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError(join_lines(violations)), violations_(std::move(violations)) {}

std::string interpolate_env(std::string_view text, std::vector<std::string>& violations) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto open = text.find("${", i);
    if (open == std::string_view::npos) {
      out += text.substr(i);
      break;
    }
    const auto close = text.find('}', open);
    if (close == std::string_view::npos) {
      violations.push_back("unterminated ${ in \"" + std::string(text) + "\"");
      out += text.substr(i);
      break;
    }
    out += text.substr(i, open - i);
    const std::string name(text.substr(open + 2, close - open - 2));
    if (const char* v = std::getenv(name.c_str())) {
      out += v;
    } else {
      violations.push_back("environment variable " + name + " is not set");
    }
    i = close + 1;
  }
  return out;
}

PipelineConfig parse_config(const nlohmann::json& input, const std::filesystem::path& base_dir) {
  std::vector<std::string> v;
  if (!input.is_object()) throw ConfigError({"configuration must be a JSON object"});
  nlohmann::json raw = input;
  interpolate_all(raw, v);

  PipelineConfig cfg;
  cfg.base_dir = base_dir;

  static const std::set<std::string> kSections = {"endpoints", "curation", "rating", "split",
                                                  "instructions", "scoring", "judge", "gateway",
                                                  "parallelism", "paths"};
  for (const auto& [key, _] : raw.items()) {
    if (!kSections.count(key)) v.push_back("unknown section \"" + key + "\"");
  }

  std::set<std::string> ids;
  if (raw.contains("endpoints")) {
    if (!raw["endpoints"].is_array()) {
      v.push_back("endpoints must be an array");
    } else {
      std::size_t index = 0;
      for (const auto& e : raw["endpoints"]) {
        const std::string where = "endpoints[" + std::to_string(index++) + "]";
        try {
          gateway::EndpointConfig ec = e.get<gateway::EndpointConfig>();
          if (ec.id.empty()) v.push_back(where + ": empty endpoint id");
          if (!ids.insert(ec.id).second) v.push_back(where + ": duplicate endpoint id " + ec.id);
          if (ec.roles.empty()) v.push_back(where + ": endpoint " + ec.id + " has no roles");
          if (ec.provider != "http" && ec.provider != "mock") {
            v.push_back(where + ": unknown provider " + ec.provider);
          } else if (ec.provider == "http" && ec.base_url.empty()) {
            v.push_back(where + ": endpoint " + ec.id + " needs a base_url");
          }
          cfg.endpoints.push_back(std::move(ec));
        } catch (const std::exception& ex) {
          v.push_back(where + ": " + ex.what());
        }
      }
    }
  }
  std::map<gateway::LmmRole, int> pool;
  for (const auto& e : cfg.endpoints) {
    for (gateway::LmmRole r : e.roles) ++pool[r];
  }
  if (pool.count(gateway::LmmRole::CotAnnotator) && pool[gateway::LmmRole::CotAnnotator] < 3) {
    v.push_back("the CotAnnotator pool needs at least 3 endpoints");
  }
  if (pool.count(gateway::LmmRole::CotScrutinizer) && pool[gateway::LmmRole::CotScrutinizer] < 2) {
    v.push_back("the CotScrutinizer pool needs at least 2 endpoints");
  }

  auto section = [&](const char* name, auto& target) {
    if (!raw.contains(name)) return;
    try {
      raw.at(name).get_to(target);
    } catch (const std::exception& ex) {
      v.push_back(std::string(name) + ": " + ex.what());
    }
  };
  section("curation", cfg.curation);
  section("rating", cfg.rating);

  if (raw.contains("split")) {
    const auto& s = raw["split"];
    read_seed(s, "seed", "split", cfg.split_seed, v);
    if (s.contains("test_ratio")) {
      const auto& r = s["test_ratio"];
      if (!r.is_number() || r.get<double>() < 0.0 || r.get<double>() > 1.0) {
        v.push_back("split.test_ratio must be a number in [0,1]");
      } else {
        cfg.test_ratio = r.get<double>();
      }
    }
  }
  if (raw.contains("instructions")) read_seed(raw["instructions"], "seed", "instructions",
                                              cfg.instruction_seed, v);
  auto endpoint_ref = [&](const char* sec, std::optional<std::string>& out) {
    if (!raw.contains(sec) || !raw[sec].contains("endpoint")) return;
    const auto& e = raw[sec]["endpoint"];
    if (!e.is_string()) {
      v.push_back(std::string(sec) + ".endpoint must be a string");
    } else if (!ids.count(e.get<std::string>())) {
      v.push_back(std::string(sec) + ".endpoint references unknown endpoint id " +
                  e.get<std::string>());
    } else {
      out = e.get<std::string>();
    }
  };
  endpoint_ref("scoring", cfg.scoring_endpoint);
  endpoint_ref("judge", cfg.judge_endpoint);
  if (raw.contains("judge")) read_seed(raw["judge"], "seed", "judge", cfg.judge_seed, v);

  if (raw.contains("parallelism")) {
    if (!raw["parallelism"].is_number_integer() || raw["parallelism"].get<int>() < 1) {
      v.push_back("parallelism must be a positive integer");
    } else {
      cfg.parallelism = raw["parallelism"].get<int>();
    }
  }
  if (raw.contains("gateway")) {
    const auto& g = raw["gateway"];
    if (g.contains("max_attempts")) {
      if (!g["max_attempts"].is_number_integer() || g["max_attempts"].get<int>() < 1) {
        v.push_back("gateway.max_attempts must be a positive integer");
      } else {
        cfg.max_attempts = g["max_attempts"].get<int>();
      }
    }
    if (g.contains("base_backoff_ms")) {
      if (!g["base_backoff_ms"].is_number_integer() || g["base_backoff_ms"].get<int>() < 0) {
        v.push_back("gateway.base_backoff_ms must be a non-negative integer");
      } else {
        cfg.base_backoff_ms = g["base_backoff_ms"].get<int>();
      }
    }
  }
  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return parse_config(raw, path.parent_path());
}

void require_endpoint(const PipelineConfig& cfg, const std::string& id) {
  for (const auto& e : cfg.endpoints) {
    if (e.id == id) return;
  }
  throw ConfigError({"unknown endpoint id " + id});
}

std::unique_ptr<gateway::Gateway> make_gateway(const PipelineConfig& cfg) {
  std::vector<std::pair<gateway::EndpointConfig, std::shared_ptr<gateway::Provider>>> eps;
  for (const auto& e : cfg.endpoints) eps.emplace_back(e, gateway::make_provider(e, cfg.base_dir));
  gateway::GatewayOptions opt;
  opt.max_attempts = cfg.max_attempts;
  opt.base_backoff = std::chrono::milliseconds(cfg.base_backoff_ms);
  return std::make_unique<gateway::Gateway>(std::move(eps), opt);
}

}  // namespace paiqa::pipeline
