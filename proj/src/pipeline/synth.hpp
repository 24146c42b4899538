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


// Seeded synthetic corpus: flat-colour images with a contrasting rectangle as
// the edit, matching detections, and scripted ratings around a latent
// per-sample quality.

#ifndef PAIQA_PIPELINE_SYNTH_HPP_
#define PAIQA_PIPELINE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/model.hpp"
#include "curation/curation.hpp"

namespace paiqa::pipeline {

struct SynthOptions {
  int n_samples = 40;
  int n_raters = 10;
  std::uint64_t seed = 7;
  double outlier_rate = 0.05;
  double conflict_rate = 0.05;
  double exclusion_rate = 0.01;
};

struct SynthCorpus {
  std::vector<EditSample> samples;      // sorted by id
  std::vector<RatingRecord> ratings;    // by sample, then rater
  std::vector<curation::Detection> detections;
  int injected_conflicts = 0;
  int injected_outliers = 0;
  int excluded = 0;
};

// Image URIs are `root`/images/{id}.png and `root`/edited/{id}.png.
SynthCorpus synth_corpus(const SynthOptions& opt, const std::filesystem::path& root);

// The source and edited rasters of one synthetic sample.
std::pair<Image, Image> render_sample(const EditSample& sample, std::uint64_t seed);

// Writes images, samples.jsonl, ratings.jsonl, detections.json and
// synth-report.json under `root`.
void write_synth_corpus(const SynthCorpus& corpus, const SynthOptions& opt,
                        const std::filesystem::path& root);

}  // namespace paiqa::pipeline

#endif  // PAIQA_PIPELINE_SYNTH_HPP_
