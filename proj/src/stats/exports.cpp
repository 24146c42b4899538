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

#include "stats/exports.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "core/json_io.hpp"

namespace paiqa::stats {

int score_bin(double mos, int bins) {
  const double width = 4.0 / bins;
  const int b = static_cast<int>(std::floor((mos - 1.0) / width));
  return std::clamp(b, 0, bins - 1);
}

double bin_lower(int bin, int bins) { return 1.0 + bin * (4.0 / bins); }
double bin_upper(int bin, int bins) { return 1.0 + (bin + 1) * (4.0 / bins); }

std::vector<HistogramRow> histograms(const std::vector<ConsensusScores>& consensus,
                                     const std::vector<EditSample>& samples) {
  std::map<std::string, EditingTask> task_of;
  for (const EditSample& s : samples) task_of.emplace(s.sample_id, s.task);

  std::vector<std::string> tasks;
  for (EditingTask t : kAllEditingTasks) tasks.emplace_back(to_string(t));
  tasks.emplace_back("all");
  const std::vector<std::string> dims = {"overall", "harmony", "naturalness", "prompt_completion"};

  // counts[dim][task][bin]
  std::map<std::string, std::map<std::string, std::vector<int>>> counts;
  for (const auto& d : dims) {
    for (const auto& t : tasks) counts[d][t].assign(d == "prompt_completion" ? 3 : kScoreBins, 0);
  }
  int unknown = 0;
  for (const ConsensusScores& c : consensus) {
    std::vector<std::string> where = {"all"};
    if (auto it = task_of.find(c.sample_id); it != task_of.end()) {
      where.emplace_back(to_string(it->second));
    } else {
      ++unknown;
    }
    for (const auto& t : where) {
      if (c.mos_overall) ++counts["overall"][t][score_bin(*c.mos_overall)];
      if (c.mos_harmony) ++counts["harmony"][t][score_bin(*c.mos_harmony)];
      if (c.mos_naturalness) ++counts["naturalness"][t][score_bin(*c.mos_naturalness)];
      if (c.pc_level) ++counts["prompt_completion"][t][*c.pc_level - 1];
    }
  }
  if (unknown > 0) spdlog::warn("{} consensus rows have no sample record; counted as 'all' only", unknown);

  std::vector<HistogramRow> rows;
  for (const auto& d : dims) {
    for (const auto& t : tasks) {
      const auto& bins = counts[d][t];
      for (int b = 0; b < static_cast<int>(bins.size()); ++b) {
        if (d == "prompt_completion") {
          rows.push_back({d, t, b + 1, b + 1.0, b + 1.0, bins[b]});
        } else {
          rows.push_back({d, t, b, bin_lower(b), bin_upper(b), bins[b]});
        }
      }
    }
  }
  return rows;
}

std::vector<GridCell> divergence_grid(const std::vector<ConsensusScores>& consensus, int bins) {
  std::vector<int> count(bins * bins, 0);
  std::vector<double> sum(bins * bins, 0.0);
  for (const ConsensusScores& c : consensus) {
    if (!c.mos_overall || !c.mos_harmony || !c.mos_naturalness) continue;
    const int cell = score_bin(*c.mos_harmony, bins) * bins + score_bin(*c.mos_naturalness, bins);
    ++count[cell];
    sum[cell] += *c.mos_overall;
  }
  std::vector<GridCell> cells;
  for (int h = 0; h < bins; ++h) {
    for (int n = 0; n < bins; ++n) {
      const int i = h * bins + n;
      GridCell g{h, n, count[i], std::nullopt};
      if (count[i] > 0) g.mean_overall = sum[i] / count[i];
      cells.push_back(g);
    }
  }
  return cells;
}

std::vector<ScatterPoint> scatter3d(const std::vector<ConsensusScores>& consensus, int pc_filter) {
  std::vector<ScatterPoint> out;
  for (const ConsensusScores& c : consensus) {
    if (c.pc_level != pc_filter) continue;
    if (!c.mos_overall || !c.mos_harmony || !c.mos_naturalness) continue;
    out.push_back({c.sample_id, *c.mos_harmony, *c.mos_naturalness, *c.mos_overall});
  }
  std::sort(out.begin(), out.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) { return a.sample_id < b.sample_id; });
  return out;
}

std::string histogram_csv(const std::vector<HistogramRow>& rows) {
  std::string out = "dimension,task,bin,lower,upper,count\n";
  for (const HistogramRow& r : rows) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{}\n", r.dimension, r.task, r.bin, r.lower, r.upper,
                       r.count);
  }
  return out;
}

std::string divergence_csv(const std::vector<GridCell>& cells, int bins) {
  std::string out =
      "harmony_bin,naturalness_bin,harmony_lower,harmony_upper,naturalness_lower,"
      "naturalness_upper,count,mean_overall\n";
  for (const GridCell& g : cells) {
    out += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f},{},{}\n", g.harmony_bin,
                       g.naturalness_bin, bin_lower(g.harmony_bin, bins),
                       bin_upper(g.harmony_bin, bins), bin_lower(g.naturalness_bin, bins),
                       bin_upper(g.naturalness_bin, bins), g.count,
                       g.mean_overall ? fmt::format("{:.6f}", *g.mean_overall) : "");
  }
  return out;
}

std::string scatter_csv(const std::vector<ScatterPoint>& points) {
  std::string out = "sample_id,harmony,naturalness,overall\n";
  for (const ScatterPoint& p : points) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", p.sample_id, p.harmony, p.naturalness,
                       p.overall);
  }
  return out;
}

std::string plot_description() {
  return R"gp(# Rating statistics plots. Render with: gnuplot plots.gp
set datafile separator ","
set terminal pngcairo size 1200,800

set output "histogram-overall.png"
set title "Overall MOS distribution (all tasks)"
set style fill solid 0.8
set boxwidth 0.45
plot "histogram.csv" using ((strcol(1) eq "overall" && strcol(2) eq "all") ? ($4+$5)/2 : 1/0):6 with boxes notitle

set output "divergence.png"
set title "Mean overall MOS over harmony x naturalness"
set xlabel "naturalness"
set ylabel "harmony"
set view map
splot "divergence.csv" using (($5+$6)/2):(($3+$4)/2):8 with points pointtype 5 pointsize 3 palette notitle

set output "scatter3d.png"
set title "Harmony, naturalness and overall MOS (full prompt completion)"
set xlabel "harmony"
set ylabel "naturalness"
set zlabel "overall"
unset view
splot "scatter3d.csv" using 2:3:4 with points pointtype 7 notitle
)gp";
}

void write_plot_stats(const std::filesystem::path& outdir,
                      const std::vector<ConsensusScores>& consensus,
                      const std::vector<EditSample>& samples) {
  write_file(outdir / "histogram.csv", histogram_csv(histograms(consensus, samples)));
  write_file(outdir / "divergence.csv", divergence_csv(divergence_grid(consensus)));
  write_file(outdir / "scatter3d.csv", scatter_csv(scatter3d(consensus)));
  write_file(outdir / "plots.gp", plot_description());
}

}  // namespace paiqa::stats
