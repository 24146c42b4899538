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


#include "pipeline/synth.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "core/hash.hpp"
#include "core/json_io.hpp"
#include "subsets/split.hpp"

namespace paiqa::pipeline {

namespace {

constexpr std::int64_t kEpoch = 1700000000;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(std::mt19937_64& rng, double sigma) {
  // Box-Muller; u1 is kept away from zero.
  const double u1 = 1.0 - unit(rng);
  const double u2 = unit(rng);
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<int>(subsets::uniform_below(rng, n));
}

int to_score(double latent, int hi = 5) {
  return std::clamp(static_cast<int>(std::lround(latent)), 1, hi);
}

constexpr std::array<std::string_view, 6> kObjects = {"a red block", "a blue ball",
                                                      "a green lamp", "a wooden chair",
                                                      "a yellow kite", "a small boat"};

struct Latent {
  double harmony;
  double naturalness;
  double overall;
  int pc;
  bool has_overall, has_harmony, has_naturalness, has_pc;
};

BBox draw_bbox(std::mt19937_64& rng, int w, int h) {
  const curation::CurationConfig cfg;
  for (;;) {
    const double ratio = 0.08 + 0.52 * unit(rng);
    const double aspect = std::exp(std::log(0.5) + std::log(4.0) * unit(rng));
    const double area = ratio * w * h;
    const int bw = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 8, w - 2);
    const int bh = std::clamp(static_cast<int>(std::lround(std::sqrt(area / aspect))), 8, h - 2);
    const int x = below(rng, static_cast<std::uint64_t>(w - bw + 1));
    const int y = below(rng, static_cast<std::uint64_t>(h - bh + 1));
    const BBox box{x, y, x + bw, y + bh};
    if (curation::check_bbox(box, w, h, cfg).accepted()) return box;
  }
}

}  // namespace

std::pair<Image, Image> render_sample(const EditSample& s, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "colour:" + s.sample_id));
  const Rgb bg = {static_cast<std::uint8_t>(below(rng, 256)),
                  static_cast<std::uint8_t>(below(rng, 256)),
                  static_cast<std::uint8_t>(below(rng, 256))};
  const Rgb fg = {static_cast<std::uint8_t>(255 - bg[0]), static_cast<std::uint8_t>(255 - bg[1]),
                  static_cast<std::uint8_t>(255 - bg[2])};
  Image source(s.source.width_px, s.source.height_px, bg);
  Image edited = source;
  edited.fill_rect(s.bbox, fg);
  return {std::move(source), std::move(edited)};
}

SynthCorpus synth_corpus(const SynthOptions& opt, const std::filesystem::path& root) {
  if (opt.n_samples < 1) throw ValidationError("synthetic corpus needs at least one sample");
  if (opt.n_raters < 10) throw ValidationError("synthetic corpus needs at least 10 raters");
  for (double r : {opt.outlier_rate, opt.conflict_rate, opt.exclusion_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("injection rates must lie in [0,1]");
  }
  const curation::CurationConfig cur;
  SynthCorpus out;
  std::vector<Latent> latents;
  const int id_width = std::max(5, static_cast<int>(std::to_string(opt.n_samples).size()));
  const int rater_width = std::max(2, static_cast<int>(std::to_string(opt.n_raters).size()));

  for (int i = 0; i < opt.n_samples; ++i) {
    std::mt19937_64 rng(derive_seed(opt.seed, "sample", static_cast<std::uint64_t>(i)));
    EditSample s;
    s.sample_id = fmt::format("s{:0{}}", i + 1, id_width);
    const int w = 64 + below(rng, 65);
    const int h = 64 + below(rng, 65);
    s.source = {s.sample_id, (root / "images" / (s.sample_id + ".png")).generic_string(), w, h,
                "synthetic"};
    s.edited_uri = (root / "edited" / (s.sample_id + ".png")).generic_string();
    s.bbox = draw_bbox(rng, w, h);
    s.difficulty_route = curation::route_difficulty(curation::area_ratio(s.bbox, w, h), cur);
    if (s.difficulty_route == DifficultyRoute::Proprietary) {
      s.task = kAllEditingTasks[static_cast<std::size_t>(below(rng, 4))];
      s.editor_tool = cur.proprietary_tools[static_cast<std::size_t>(
          below(rng, cur.proprietary_tools.size()))];
    } else {
      s.task = below(rng, 2) == 0 ? EditingTask::ObjectOperation : EditingTask::StyleChange;
      s.editor_tool =
          cur.local_tools[static_cast<std::size_t>(below(rng, cur.local_tools.size()))];
    }
    const std::string_view object = kObjects[static_cast<std::size_t>(below(rng, kObjects.size()))];
    s.prompt = s.difficulty_route == DifficultyRoute::Local
                   ? std::string(object) + "."
                   : fmt::format("Replace the dog with {}.", object);
    validate(s);

    Latent lat{};
    const double q = 1.2 + 3.6 * unit(rng);
    lat.harmony = std::clamp(q + normal(rng, 0.4), 1.0, 5.0);
    lat.naturalness = std::clamp(q + normal(rng, 0.4), 1.0, 5.0);
    const double u = unit(rng);
    lat.pc = u < 0.15 ? 1 : u < 0.30 ? 2 : 3;
    lat.overall = lat.pc == 3 ? 0.5 * (lat.harmony + lat.naturalness)
                              : (lat.pc == 1 ? 1.2 : 1.7) + 0.3 * unit(rng);
    const double p = unit(rng);
    lat.has_harmony = p < 0.95;
    lat.has_naturalness = p < 0.90 || p >= 0.95;
    lat.has_overall = p < 0.80;
    lat.has_pc = p < 0.70;

    out.detections.push_back({s.sample_id, "dog", s.bbox});
    for (int r = 0; r < opt.n_raters; ++r) {
      RatingRecord rec;
      rec.rater_id = fmt::format("r{:0{}}", r + 1, rater_width);
      rec.sample_id = s.sample_id;
      rec.timestamp = kEpoch + static_cast<std::int64_t>(i) * opt.n_raters + r;
      if (unit(rng) < opt.exclusion_rate) {
        rec.excluded = true;
        rec.exclusion_reason = static_cast<ExclusionReason>(below(rng, 6));
        ++out.excluded;
      } else {
        if (lat.has_harmony) rec.harmony = to_score(lat.harmony + normal(rng, 0.5));
        if (lat.has_naturalness) rec.naturalness = to_score(lat.naturalness + normal(rng, 0.5));
        if (lat.has_overall) rec.overall = to_score(lat.overall + normal(rng, 0.5));
        if (lat.has_pc) {
          int pc = lat.pc;
          if (unit(rng) >= 0.85) pc = std::clamp(pc + (below(rng, 2) == 0 ? -1 : 1), 1, 3);
          rec.prompt_completion = pc;
          if (pc <= 2 && rec.overall) rec.overall = std::min(*rec.overall, 2);
        }
      }
      validate(rec);
      out.ratings.push_back(rec);
    }
    out.samples.push_back(std::move(s));
    latents.push_back(lat);
  }

  // Conflicts and outliers go to disjoint, seeded sets of scored records.
  const long total = static_cast<long>(out.ratings.size());
  std::mt19937_64 rng(derive_seed(opt.seed, "inject"));
  std::vector<std::size_t> order(out.ratings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(below(rng, i))]);
  }
  std::vector<bool> touched(out.ratings.size(), false);

  const long want_conflicts = std::lround(opt.conflict_rate * static_cast<double>(total));
  for (std::size_t k : order) {
    if (out.injected_conflicts >= want_conflicts) break;
    RatingRecord& r = out.ratings[k];
    if (r.excluded || !r.overall || !r.prompt_completion) continue;
    r.prompt_completion = 1 + below(rng, 2);
    r.overall = 3 + below(rng, 3);
    touched[k] = true;
    ++out.injected_conflicts;
  }
  if (out.injected_conflicts < want_conflicts) {
    spdlog::warn("only {} of {} conflicts could be injected", out.injected_conflicts,
                 want_conflicts);
  }

  const long want_outliers = std::lround(opt.outlier_rate * static_cast<double>(total));
  for (std::size_t k : order) {
    if (out.injected_outliers >= want_outliers) break;
    RatingRecord& r = out.ratings[k];
    if (touched[k] || r.excluded) continue;
    const Latent& lat = latents[k / static_cast<std::size_t>(opt.n_raters)];
    auto flip = [](std::optional<int>& v, double latent) { v = latent >= 3.0 ? 1 : 5; };
    // An overall outlier of 5 next to pc <= 2 would be a conflict; use h/n.
    const bool overall_ok = r.overall && (!r.prompt_completion || *r.prompt_completion == 3);
    std::vector<int> dims;
    if (overall_ok) dims.push_back(0);
    if (r.harmony) dims.push_back(1);
    if (r.naturalness) dims.push_back(2);
    if (dims.empty()) continue;
    switch (dims[static_cast<std::size_t>(below(rng, dims.size()))]) {
      case 0: flip(r.overall, lat.overall); break;
      case 1: flip(r.harmony, lat.harmony); break;
      default: flip(r.naturalness, lat.naturalness); break;
    }
    touched[k] = true;
    ++out.injected_outliers;
  }
  return out;
}

void write_synth_corpus(const SynthCorpus& corpus, const SynthOptions& opt,
                        const std::filesystem::path& root) {
  for (const EditSample& s : corpus.samples) {
    const auto [source, edited] = render_sample(s, opt.seed);
    write_png(s.source.uri, source);
    write_png(s.edited_uri, edited);
  }
  save_manifest(root / "samples.jsonl", corpus.samples);
  save_manifest(root / "ratings.jsonl", corpus.ratings);
  nlohmann::json dets = nlohmann::json::array();
  for (const curation::Detection& d : corpus.detections) {
    dets.push_back({{"image_id", d.image_id},
                    {"subject", d.subject},
                    {"x_min", d.raw.x_min},
                    {"y_min", d.raw.y_min},
                    {"x_max", d.raw.x_max},
                    {"y_max", d.raw.y_max}});
  }
  write_file(root / "detections.json", dets.dump(2) + "\n");
  const nlohmann::json report = {{"n_samples", opt.n_samples},
                                 {"n_raters", opt.n_raters},
                                 {"seed", opt.seed},
                                 {"total_ratings", corpus.ratings.size()},
                                 {"injected_conflicts", corpus.injected_conflicts},
                                 {"injected_outliers", corpus.injected_outliers},
                                 {"excluded", corpus.excluded}};
  write_file(root / "synth-report.json", report.dump(2) + "\n");
}

}  // namespace paiqa::pipeline
