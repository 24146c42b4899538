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


#include "pipeline/commands.hpp"

#include <spdlog/spdlog.h>

#include <map>
#include <set>

#include "core/hash.hpp"
#include "core/json_io.hpp"
#include "curation/curation.hpp"
#include "eval/judge.hpp"
#include "eval/scoring.hpp"
#include "instruct/instructions.hpp"
#include "pipeline/synth.hpp"
#include "rating/http.hpp"
#include "rating/replay.hpp"
#include "rating/service.hpp"
#include "rating/storage.hpp"
#include "stats/cleaning.hpp"
#include "stats/exports.hpp"
#include "subsets/split.hpp"

namespace paiqa::pipeline {

using nlohmann::json;

gateway::Gateway& Session::gateway() {
  if (!gw_) {
    if (cfg_.endpoints.empty()) throw ConfigError({"no gateway endpoints are configured"});
    gw_ = make_gateway(cfg_);
    gw_->enable_transcript(transcript_.has_value());
  }
  return *gw_;
}

void Session::flush_transcript() {
  if (!transcript_ || !gw_) return;
  std::vector<json> lines;
  for (const auto& e : gw_->transcript()) lines.emplace_back(e);
  write_jsonl(*transcript_, lines);
}

fs::path manifest_path(const fs::path& artifact) {
  return fs::path(artifact.string() + ".manifest.json");
}

namespace {

// Accumulates the run manifest of one command.
class Manifest {
 public:
  explicit Manifest(std::string command) { doc_ = {{"command", command}, {"version", kVersion}}; }

  void input(const std::string& name, const fs::path& path) {
    doc_["inputs"][name] = {{"path", path.generic_string()}, {"sha256", file_sha256_hex(path)}};
  }
  void output(const std::string& name, const fs::path& path) {
    doc_["outputs"][name] = {{"path", path.generic_string()}, {"sha256", file_sha256_hex(path)}};
  }
  void seed(const std::string& name, std::uint64_t value) { doc_["seeds"][name] = value; }
  void param(const std::string& name, json value) { doc_["parameters"][name] = std::move(value); }
  void write(const fs::path& path) const { write_file(path, doc_.dump(2) + "\n"); }

 private:
  json doc_;
};

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

void config_inputs(Manifest& m, const Session& s) {
  m.param("endpoints", [&] {
    json ids = json::array();
    for (const auto& e : s.config().endpoints) ids.push_back(e.id);
    return ids;
  }());
}

}  // namespace

void synth_corpus_cmd(const SynthArgs& a) {
  require(a.outdir, "--outdir");
  SynthOptions opt;
  opt.n_samples = a.n_samples;
  opt.n_raters = a.n_raters;
  opt.seed = a.seed;
  const SynthCorpus corpus = synth_corpus(opt, a.outdir);
  write_synth_corpus(corpus, opt, a.outdir);
  Manifest m("synth-corpus");
  m.seed("seed", a.seed);
  m.param("samples", a.n_samples);
  m.param("raters", a.n_raters);
  for (const char* f : {"samples.jsonl", "ratings.jsonl", "detections.json"}) {
    m.output(f, a.outdir / f);
  }
  m.write(a.outdir / "run-manifest.json");
  spdlog::info("synthetic corpus: {} samples, {} ratings, {} conflicts, {} outliers",
               corpus.samples.size(), corpus.ratings.size(), corpus.injected_conflicts,
               corpus.injected_outliers);
}

void curate_cmd(Session& s, const CurateArgs& a) {
  require(a.images, "--images");
  require(a.detections, "--detections");
  require(a.edited, "--edited");
  require(a.out, "--out");
  curation::CurationInputs in{a.images, a.detections, a.edited,
                              a.workdir.empty() ? a.out.parent_path() : a.workdir};
  curation::CurationConfig cfg = s.config().curation;
  cfg.parallelism = s.config().parallelism;
  const curation::CurationReport rep = curation::run_curation(s.gateway(), in, cfg);
  save_manifest(a.out, rep.samples);

  json rejected = json::array();
  std::map<std::string, int> by_reason;
  for (const auto& r : rep.rejections) {
    rejected.push_back({{"image_id", r.image_id},
                        {"reason", curation::to_string(r.reason)},
                        {"detail", r.detail}});
    ++by_reason[std::string(curation::to_string(r.reason))];
  }
  const fs::path report = fs::path(a.out.string() + ".report.json");
  write_file(report, json{{"accepted", rep.samples.size()},
                          {"rejected", rep.rejections.size()},
                          {"rejected_by_reason", by_reason},
                          {"already_clean_prompts", rep.already_clean_prompts},
                          {"rejections", rejected}}
                         .dump(2) + "\n");
  s.flush_transcript();

  Manifest m("curate");
  m.input("detections", a.detections);
  config_inputs(m, s);
  m.seed("curation", cfg.seed);
  m.param("curation", cfg);
  m.output("samples", a.out);
  m.output("report", report);
  m.write(manifest_path(a.out));
  spdlog::info("curation: {} accepted, {} rejected", rep.samples.size(), rep.rejections.size());
}

void replay_cmd(Session& s, const ReplayArgs& a) {
  require(a.samples, "--samples");
  require(a.script, "--script");
  require(a.out, "--out");
  const auto script = load_manifest<RatingRecord>(a.script);
  rating::ReplayReport rep;
  std::string exported;
  if (!a.url.empty()) {
    rating::HttpRatingClient client(a.url);
    rep = rating::replay_campaign(client, script);
    exported = client.export_ratings_jsonl();
  } else {
    std::shared_ptr<rating::Storage> store;
    if (a.db.empty()) {
      store = std::make_shared<rating::MemoryStore>();
    } else {
      store = std::make_shared<rating::SqliteStore>(a.db);
    }
    // Simulated clock: one tick per terminal action, from a fixed epoch.
    auto now = std::make_shared<std::int64_t>(1700000000);
    rating::RatingService service(load_manifest<EditSample>(a.samples), s.config().rating, store,
                                  [now] { return *now; });
    rating::LocalRatingApi api(service);
    rep = rating::replay_campaign(api, script, [now] { ++*now; });
    exported = api.export_ratings_jsonl();
  }
  write_file(a.out, exported);

  Manifest m("replay-campaign");
  m.input("samples", a.samples);
  m.input("script", a.script);
  m.param("rating", s.config().rating);
  m.param("target", a.url.empty() ? "local" : a.url);
  m.param("submitted", rep.submitted);
  m.param("flagged", rep.flagged);
  m.param("corrected", rep.corrected);
  m.output("ratings", a.out);
  m.write(manifest_path(a.out));
  spdlog::info("campaign: {} ratings, {} exclusions, {} corrected", rep.submitted, rep.flagged,
               rep.corrected);
}

void clean_ratings_cmd(const CleanArgs& a) {
  require(a.ratings, "--ratings");
  require(a.out, "--out");
  require(a.report, "--report");
  const stats::CleaningOutput out = stats::clean_ratings(load_manifest<RatingRecord>(a.ratings));
  save_manifest(a.out, out.consensus);
  write_file(a.report, stats::report_to_json(out.report).dump(2) + "\n");
  Manifest m("clean-ratings");
  m.input("ratings", a.ratings);
  m.output("consensus", a.out);
  m.output("report", a.report);
  m.write(manifest_path(a.out));
}

void plot_stats_cmd(const PlotArgs& a) {
  require(a.consensus, "--consensus");
  require(a.samples, "--samples");
  require(a.outdir, "--outdir");
  stats::write_plot_stats(a.outdir, load_manifest<ConsensusScores>(a.consensus),
                          load_manifest<EditSample>(a.samples));
  Manifest m("plot-stats");
  m.input("consensus", a.consensus);
  m.input("samples", a.samples);
  for (const char* f : {"histogram.csv", "divergence.csv", "scatter3d.csv", "plots.gp"}) {
    m.output(f, a.outdir / f);
  }
  m.write(a.outdir / "run-manifest.json");
}

void build_subsets_cmd(Session& s, const SubsetArgs& a) {
  require(a.consensus, "--consensus");
  require(a.samples, "--samples");
  require(a.out, "--out");
  const std::uint64_t seed = a.seed.value_or(s.config().split_seed);
  const double ratio = a.test_ratio.value_or(s.config().test_ratio);
  const auto consensus = load_manifest<ConsensusScores>(a.consensus);
  const auto sets = subsets::build_subsets(consensus, load_manifest<EditSample>(a.samples));
  const auto splits = subsets::split_subsets(sets, consensus, ratio, seed);
  save_manifest(a.out, splits);

  json summary = json::array();
  for (const auto& sm : subsets::summarize_split(splits, ratio)) {
    summary.push_back({{"subset", to_string(sm.kind)},
                       {"size", sm.size},
                       {"test", sm.test},
                       {"target", sm.target},
                       {"within_tolerance", sm.within_tolerance}});
  }
  Manifest m("build-subsets");
  m.input("consensus", a.consensus);
  m.input("samples", a.samples);
  m.seed("split", seed);
  m.param("test_ratio", ratio);
  m.param("summary", summary);
  m.output("splits", a.out);
  m.write(manifest_path(a.out));
}

namespace {

void cross_check_consensus(const std::vector<subsets::SubsetAssignment>& splits,
                           const fs::path& consensus_path) {
  std::map<std::string, json> expected;
  for (const auto& c : load_manifest<ConsensusScores>(consensus_path)) {
    expected[c.sample_id] = c;
  }
  for (const auto& a : splits) {
    auto it = expected.find(a.sample_id);
    if (it == expected.end() || it->second != json(a.consensus)) {
      throw DataError("splits and consensus disagree for sample " + a.sample_id);
    }
  }
}

}  // namespace

void build_instructions_cmd(Session& s, const InstructionArgs& a) {
  require(a.splits, "--splits");
  require(a.samples, "--samples");
  require(a.out, "--out");
  if (a.stage < 1 || a.stage > 3) throw ValidationError("--stage must be 1, 2 or 3");
  const std::uint64_t seed = a.seed.value_or(s.config().instruction_seed);
  const auto splits = load_manifest<subsets::SubsetAssignment>(a.splits);
  const auto samples = load_manifest<EditSample>(a.samples);
  if (!a.consensus.empty()) cross_check_consensus(splits, a.consensus);

  Manifest m("build-instructions");
  m.input("splits", a.splits);
  m.input("samples", a.samples);
  if (!a.consensus.empty()) m.input("consensus", a.consensus);
  m.seed("instructions", seed);
  m.param("stage", a.stage);

  std::vector<instruct::InstructionRecord> records;
  if (a.stage == 1) {
    records = instruct::build_stage1(samples, splits);
  } else {
    config_inputs(m, s);
    json ranges;
    for (SubsetKind k : kAllSubsets) {
      const auto r = instruct::mapping_for(splits, k);
      ranges[std::string(to_string(k))] = {r.min, r.max};
    }
    m.param("level_ranges", ranges);
    if (a.stage == 2) {
      instruct::Stage2Options opt;
      opt.crops_dir = a.out.parent_path() / "crops";
      opt.seed = seed;
      opt.parallelism = s.config().parallelism;
      records = instruct::build_stage2(s.gateway(), samples, splits, opt);
    } else {
      instruct::Stage3Options opt;
      opt.seed = seed;
      opt.parallelism = s.config().parallelism;
      opt.split = subsets::parse_split(a.split);
      m.param("split", a.split);
      instruct::Stage3Result res = instruct::build_stage3(s.gateway(), samples, splits, opt);
      records = std::move(res.records);
      const fs::path audit = fs::path(a.out.string() + ".audit.jsonl");
      save_manifest(audit, res.audit);
      m.output("audit", audit);
      if (!a.gold_out.empty()) {
        save_manifest(a.gold_out, res.gold);
        m.output("gold", a.gold_out);
      }
      std::map<std::string, int> outcomes;
      for (const auto& x : res.audit) ++outcomes[x.outcome];
      m.param("outcomes", outcomes);
    }
    s.flush_transcript();
  }
  save_manifest(a.out, records);
  m.param("records", records.size());
  m.output("instructions", a.out);
  m.write(manifest_path(a.out));
  spdlog::info("stage {}: {} instruction records", a.stage, records.size());
}

void evaluate_scoring_cmd(Session& s, const ScoringArgs& a) {
  require(a.splits, "--splits");
  require(a.samples, "--samples");
  require(a.out, "--out");
  eval::ScoringOptions opt;
  opt.task = eval::parse_scoring_task(a.task);
  opt.endpoint_id = !a.endpoint.empty() ? a.endpoint : s.config().scoring_endpoint.value_or("");
  if (opt.endpoint_id.empty()) throw ConfigError({"no scoring endpoint given"});
  require_endpoint(s.config(), opt.endpoint_id);
  opt.crops_dir = a.out.parent_path() / "crops-eval";
  opt.regressor = a.regressor;
  opt.seed = a.seed.value_or(0);
  opt.parallelism = s.config().parallelism;
  const eval::ScoringReport rep =
      eval::run_scoring(s.gateway(), load_manifest<EditSample>(a.samples),
                        load_manifest<subsets::SubsetAssignment>(a.splits), opt);
  write_file(a.out, eval::metric_table_csv(rep.rows, eval::to_string(rep.method)));
  const fs::path preds = fs::path(a.out.string() + ".predictions.jsonl");
  save_manifest(preds, rep.predictions);
  s.flush_transcript();

  Manifest m("evaluate-scoring");
  m.input("splits", a.splits);
  m.input("samples", a.samples);
  m.seed("scoring", opt.seed);
  m.param("task", a.task);
  m.param("endpoint", opt.endpoint_id);
  m.param("method", eval::to_string(rep.method));
  if (!rep.regressor.empty()) m.param("regressor", rep.regressor);
  m.param("unscored", rep.unscored);
  m.output("table", a.out);
  m.output("predictions", preds);
  m.write(manifest_path(a.out));
}

void evaluate_explanations_cmd(Session& s, const JudgeArgs& a) {
  require(a.gold, "--gold");
  require(a.responses, "--responses");
  require(a.out, "--out");
  const std::string judge = !a.judge.empty() ? a.judge : s.config().judge_endpoint.value_or("");
  if (judge.empty()) throw ConfigError({"no judge endpoint given"});
  require_endpoint(s.config(), judge);
  const std::uint64_t seed = a.seed.value_or(s.config().judge_seed);

  const auto gold = load_manifest<instruct::GoldRecord>(a.gold);
  std::map<std::string, std::string> responses;
  for (const json& j : read_jsonl(a.responses)) {
    try {
      const std::string id = j.at("sample_id").get<std::string>();
      if (!responses.emplace(id, j.at("response").get<std::string>()).second) {
        throw DataError(a.responses.string() + ": duplicate response for " + id);
      }
    } catch (const json::exception& e) {
      throw DataError(a.responses.string() + ": " + e.what());
    }
  }
  const auto verdicts =
      eval::judge_all(s.gateway(), judge, gold, responses, seed, s.config().parallelism);
  json doc = eval::summarize_judge(verdicts);
  doc["verdicts"] = verdicts;
  write_file(a.out, doc.dump(2) + "\n");
  s.flush_transcript();

  Manifest m("evaluate-explanations");
  m.input("gold", a.gold);
  m.input("responses", a.responses);
  m.seed("judge", seed);
  m.param("judge", judge);
  m.output("report", a.out);
  m.write(manifest_path(a.out));
}

}  // namespace paiqa::pipeline
