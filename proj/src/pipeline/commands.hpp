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


// One function per pipeline stage. Each writes its artifacts plus a run
// manifest with input checksums, seeds and parameters.

#ifndef PAIQA_PIPELINE_COMMANDS_HPP_
#define PAIQA_PIPELINE_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gateway/gateway.hpp"
#include "pipeline/config.hpp"

namespace paiqa::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

namespace fs = std::filesystem;

class Session {
 public:
  explicit Session(PipelineConfig cfg) : cfg_(std::move(cfg)) {}

  const PipelineConfig& config() const { return cfg_; }
  // Built on first use from the configured endpoints.
  gateway::Gateway& gateway();
  // When set, every gateway-backed command writes its transcript here.
  void set_transcript(std::optional<fs::path> path) { transcript_ = std::move(path); }
  void flush_transcript();

 private:
  PipelineConfig cfg_;
  std::unique_ptr<gateway::Gateway> gw_;
  std::optional<fs::path> transcript_;
};

// Sidecar manifest path for a file artifact: "<path>.manifest.json".
fs::path manifest_path(const fs::path& artifact);

struct SynthArgs {
  int n_samples = 40;
  int n_raters = 10;
  std::uint64_t seed = 7;
  fs::path outdir;
};
void synth_corpus_cmd(const SynthArgs& a);

struct CurateArgs {
  fs::path images;
  fs::path detections;
  fs::path edited;
  fs::path out;
  fs::path workdir;  // empty = the output's directory
};
void curate_cmd(Session& s, const CurateArgs& a);

struct ReplayArgs {
  fs::path samples;
  fs::path script;
  fs::path out;
  fs::path db;       // empty = in memory
  std::string url;   // non-empty = drive a running rating server instead
};
void replay_cmd(Session& s, const ReplayArgs& a);

struct CleanArgs {
  fs::path ratings;
  fs::path out;
  fs::path report;
};
void clean_ratings_cmd(const CleanArgs& a);

struct PlotArgs {
  fs::path consensus;
  fs::path samples;
  fs::path outdir;
};
void plot_stats_cmd(const PlotArgs& a);

struct SubsetArgs {
  fs::path consensus;
  fs::path samples;
  std::optional<std::uint64_t> seed;       // default: config split seed
  std::optional<double> test_ratio;        // default: config ratio
  fs::path out;
};
void build_subsets_cmd(Session& s, const SubsetArgs& a);

struct InstructionArgs {
  int stage = 1;
  fs::path splits;
  fs::path consensus;  // optional cross-check of the inline consensus
  fs::path samples;
  std::optional<std::uint64_t> seed;
  std::string split = "train";  // stage 3 only
  fs::path out;
  fs::path gold_out;  // stage 3 only
};
void build_instructions_cmd(Session& s, const InstructionArgs& a);

struct ScoringArgs {
  std::string task;
  fs::path splits;
  fs::path samples;
  std::string endpoint;  // empty = config scoring endpoint
  std::optional<std::uint64_t> seed;
  std::string regressor = "ols";
  fs::path out;
};
void evaluate_scoring_cmd(Session& s, const ScoringArgs& a);

struct JudgeArgs {
  fs::path gold;
  fs::path responses;
  std::string judge;  // empty = config judge endpoint
  std::optional<std::uint64_t> seed;
  fs::path out;
};
void evaluate_explanations_cmd(Session& s, const JudgeArgs& a);

}  // namespace paiqa::pipeline

#endif  // PAIQA_PIPELINE_COMMANDS_HPP_
