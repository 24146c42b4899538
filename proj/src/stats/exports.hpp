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

#ifndef PAIQA_STATS_EXPORTS_HPP_
#define PAIQA_STATS_EXPORTS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace paiqa::stats {

inline constexpr int kScoreBins = 8;

// Bin of a MOS over [1,5] in equal steps; the top bin is right-closed.
int score_bin(double mos, int bins = kScoreBins);
double bin_lower(int bin, int bins = kScoreBins);
double bin_upper(int bin, int bins = kScoreBins);

struct HistogramRow {
  std::string dimension;  // overall, harmony, naturalness, prompt_completion
  std::string task;       // editing task name, or "all"
  int bin = 0;            // score bin, or the pc level for prompt_completion
  double lower = 0.0;
  double upper = 0.0;
  int count = 0;
};

// Every (dimension, task, bin) combination, zero counts included. Samples
// missing from `samples` count toward "all" only.
std::vector<HistogramRow> histograms(const std::vector<ConsensusScores>& consensus,
                                     const std::vector<EditSample>& samples);

struct GridCell {
  int harmony_bin = 0;
  int naturalness_bin = 0;
  int count = 0;
  std::optional<double> mean_overall;
};

// Row-major over (harmony_bin, naturalness_bin); samples with all three MOS.
std::vector<GridCell> divergence_grid(const std::vector<ConsensusScores>& consensus,
                                      int bins = kScoreBins);

struct ScatterPoint {
  std::string sample_id;
  double harmony = 0.0;
  double naturalness = 0.0;
  double overall = 0.0;
};

std::vector<ScatterPoint> scatter3d(const std::vector<ConsensusScores>& consensus,
                                    int pc_filter = 3);

std::string histogram_csv(const std::vector<HistogramRow>& rows);
std::string divergence_csv(const std::vector<GridCell>& cells, int bins = kScoreBins);
std::string scatter_csv(const std::vector<ScatterPoint>& points);
// gnuplot-style description of the three plots over the CSV files.
std::string plot_description();

// Writes histogram.csv, divergence.csv, scatter3d.csv and plots.gp.
void write_plot_stats(const std::filesystem::path& outdir,
                      const std::vector<ConsensusScores>& consensus,
                      const std::vector<EditSample>& samples);

}  // namespace paiqa::stats

#endif  // PAIQA_STATS_EXPORTS_HPP_
