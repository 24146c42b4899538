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


// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Reference values come from the brute-force oracles in
// tests/support, never from the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "core/hash.hpp"
#include "core/json_io.hpp"
#include "eval/judge.hpp"
#include "eval/metrics.hpp"
#include "eval/scoring.hpp"
#include "gateway/mock_provider.hpp"
#include "instruct/instructions.hpp"
#include "pipeline/synth.hpp"
#include "stats/cleaning.hpp"
#include "subsets/split.hpp"
#include "support/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace paiqa;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of one criterion.
class Check {
 public:
  void fail(const std::string& msg) {
    ok_ = false;
    if (++failures_ <= 5) notes_ << (notes_.tellp() > 0 ? "; " : "") << msg;
  }
  void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }
  void note(const std::string& msg) { info_ << (info_.tellp() > 0 ? ", " : "") << msg; }
  Outcome outcome() const {
    std::string d = info_.str();
    if (!ok_) d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + notes_.str();
    return {ok_, d};
  }

 private:
  bool ok_ = true;
  int failures_ = 0;
  std::ostringstream notes_;
  std::ostringstream info_;
};

std::mt19937_64 rng_for(const std::string& tag) { return std::mt19937_64(derive_seed(2026, tag)); }

int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

RatingRecord record(const std::string& sample, int rater) {
  RatingRecord r;
  r.sample_id = sample;
  r.rater_id = "r" + std::to_string(rater);
  return r;
}

std::vector<stats::Vote> sorted(std::vector<stats::Vote> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return std::tie(a.rater_id, a.value) < std::tie(b.rater_id, b.value);
  });
  return v;
}

// 1. Outlier removal matches a brute-force Tukey filter.
Outcome criterion_iqr() {
  Check c;
  auto rng = rng_for("iqr");
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = draw(rng, 10, 15);
    std::vector<int> values;
    std::vector<RatingRecord> records;
    for (int i = 0; i < n; ++i) {
      values.push_back(draw(rng, 1, 5));
      RatingRecord r = record("s", i);
      r.harmony = values.back();
      records.push_back(r);
    }
    const auto keep = oracle::tukey_keep(values);
    std::vector<stats::Vote> expect;
    for (int i = 0; i < n; ++i) {
      if (keep[static_cast<std::size_t>(i)]) expect.push_back({"r" + std::to_string(i), values[i]});
    }
    const auto got = stats::clean_sample(records).survivors.harmony;
    if (sorted(got) != sorted(expect)) {
      ++mismatches;
      c.fail("multiset " + std::to_string(t));
    }
  }
  c.note("1000 multisets, " + std::to_string(mismatches) + " mismatches");
  return c.outcome();
}

// 2. Rank and linear correlation against brute force; rank invariance.
Outcome criterion_correlation() {
  Check c;
  auto rng = rng_for("corr");
  double worst = 0.0;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(20), y(20);
    const bool ties = t % 2 == 0;
    for (int i = 0; i < 20; ++i) {
      x[static_cast<std::size_t>(i)] = ties ? draw(rng, 1, 5) : 5.0 * unit(rng);
      y[static_cast<std::size_t>(i)] = ties ? draw(rng, 1, 5) : x[static_cast<std::size_t>(i)] + unit(rng);
    }
    if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end() ||
        std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
      continue;
    }
    pairs.emplace_back(x, y);
    const double ds = std::abs(eval::srcc(x, y) - static_cast<double>(oracle::spearman(x, y)));
    const double dp = std::abs(eval::plcc(x, y) - static_cast<double>(oracle::pearson(x, y)));
    worst = std::max({worst, ds, dp});
    c.expect(ds <= 1e-9 && dp <= 1e-9, "pair " + std::to_string(t));
  }
  c.expect(pairs.size() >= 495, "too few non-constant pairs");

  // Strictly increasing maps with random parameters.
  double worst_inv = 0.0;
  for (int m = 0; m < 100; ++m) {
    const double a = 0.1 + 3.0 * unit(rng);
    const double b = 10.0 * unit(rng) - 5.0;
    std::function<double(double)> f;
    switch (m % 5) {
      case 0: f = [=](double v) { return a * v + b; }; break;
      case 1: f = [=](double v) { return std::exp(a * v / 5.0) + b; }; break;
      case 2: f = [=](double v) { return v * v * v + a * v; }; break;
      case 3: f = [=](double v) { return std::log(v + 1.0 + a); }; break;
      default: f = [=](double v) { return std::atan(a * (v - 2.5)); }; break;
    }
    const auto& [x, y] = pairs[static_cast<std::size_t>(m) % pairs.size()];
    std::vector<double> fx(x.size());
    std::transform(x.begin(), x.end(), fx.begin(), f);
    const double d = std::abs(eval::srcc(fx, y) - eval::srcc(x, y));
    worst_inv = std::max(worst_inv, d);
    c.expect(d <= 1e-9, "monotone map " + std::to_string(m));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu pairs, max dev %.1e, 100 maps, max drift %.1e",
                pairs.size(), worst, worst_inv);
  c.note(buf);
  return c.outcome();
}

// 3. Logit fusion.
Outcome criterion_fusion() {
  Check c;
  auto rng = rng_for("fusion");
  for (double v : {-40.0, -1.0, 0.0, 0.5, 17.0}) {
    const double f = eval::fuse_level_logits({v, v, v, v, v});
    c.expect(std::abs(f - 3.0) <= 1e-9, "equal logits " + std::to_string(v));
  }
  double worst_shift = 0.0;
  for (int t = 0; t < 1000; ++t) {
    eval::LevelLogits l{};
    for (double& v : l) v = 20.0 * unit(rng) - 10.0;
    const double base = eval::fuse_level_logits(l);
    const double shift = 200.0 * unit(rng) - 100.0;
    eval::LevelLogits s = l;
    for (double& v : s) v += shift;
    const double d = std::abs(eval::fuse_level_logits(s) - base);
    worst_shift = std::max(worst_shift, d);
    c.expect(d <= 1e-9, "shift " + std::to_string(shift));
  }
  for (int t = 0; t < 10000; ++t) {
    eval::LevelLogits l{};
    const double scale = t % 3 == 0 ? 1000.0 : 30.0;
    for (double& v : l) v = scale * (2.0 * unit(rng) - 1.0);
    const double f = eval::fuse_level_logits(l);
    c.expect(f >= 1.0 && f <= 5.0, "out of range " + std::to_string(f));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "shift drift %.1e, 10000 vectors in [1,5]", worst_shift);
  c.note(buf);
  return c.outcome();
}

struct Prepared {
  pipeline::SynthCorpus corpus;
  std::vector<ConsensusScores> consensus;
  std::vector<subsets::SubsetAssignment> splits;
};

Prepared prepare(int n, std::uint64_t split_seed) {
  pipeline::SynthOptions opt;
  opt.n_samples = n;
  Prepared p;
  p.corpus = pipeline::synth_corpus(opt, "corpus");
  p.consensus = stats::clean_ratings(p.corpus.ratings).consensus;
  const auto sets = subsets::build_subsets(p.consensus, p.corpus.samples);
  p.splits = subsets::split_subsets(sets, p.consensus, 0.2, split_seed);
  return p;
}

// 4. Shared split: no cross-subset leakage, test fraction within one sample.
Outcome criterion_split() {
  Check c;
  for (int n : {40, 5000}) {
    const Prepared p = prepare(n, 17);
    std::map<SubsetKind, std::set<std::string>> train, test;
    for (const auto& a : p.splits) {
      for (SubsetKind k : a.subsets) {
        (a.split == subsets::Split::Test ? test : train)[k].insert(a.sample_id);
      }
    }
    for (SubsetKind a : kAllSubsets) {
      for (SubsetKind b : kAllSubsets) {
        for (const auto& id : train[a]) {
          c.expect(!test[b].count(id), "n=" + std::to_string(n) + " " + id + " in Train(" +
                                           std::string(to_string(a)) + ") and Test(" +
                                           std::string(to_string(b)) + ")");
        }
      }
      const std::size_t size = train[a].size() + test[a].size();
      const double dev = std::abs(static_cast<double>(test[a].size()) - 0.2 * static_cast<double>(size));
      c.expect(dev <= 1.0, "n=" + std::to_string(n) + " " + std::string(to_string(a)) +
                               " test " + std::to_string(test[a].size()) + " of " +
                               std::to_string(size));
      c.note(std::to_string(n) + "/" + std::string(to_string(a)) + " " +
             std::to_string(test[a].size()) + "/" + std::to_string(size));
    }
  }
  return c.outcome();
}

// 5. Judge aggregation over every tuple of five repetitions.
Outcome criterion_judge() {
  Check c;
  int tuples = 0;
  for (int code = 0; code < 243; ++code) {
    std::vector<int> v;
    for (int k = 0, x = code; k < 5; ++k, x /= 3) v.push_back(x % 3);
    ++tuples;
    const int expect = oracle::mode_high(v);
    c.expect(eval::aggregate_mode(v) == expect, "tuple " + std::to_string(code));
    std::vector<eval::JudgeScores> reps;
    for (int x : v) reps.push_back({x, x, x, x});
    const eval::JudgeScores full = eval::aggregate_repetitions(reps, false);
    c.expect(full.pa == expect && full.lna == expect && full.gha == expect &&
                 full.overall == expect,
             "repetitions " + std::to_string(code));
    const eval::JudgeScores t1 = eval::aggregate_repetitions(reps, true);
    c.expect(!t1.lna && !t1.gha && t1.pa == expect, "type1 aggregate " + std::to_string(code));
  }

  // End to end through the judge role with the synthetic mock.
  gateway::EndpointConfig judge;
  judge.id = "judge";
  judge.roles = {gateway::LmmRole::Judge};
  judge.provider = "mock";
  auto mock = std::make_shared<gateway::MockProvider>();
  mock->set_synthetic(true);
  gateway::Gateway gw({{judge, mock}});
  std::vector<instruct::GoldRecord> gold;
  std::map<std::string, std::string> responses;
  for (int i = 0; i < 30; ++i) {
    const std::string id = "g" + std::to_string(i);
    gold.push_back({id, 1 + i % 3, "The prompt completion is non-completion. Gold " + id + "."});
    responses[id] = "Candidate explanation " + std::to_string(i * 7) + ".";
  }
  int type1 = 0;
  for (const auto& v : eval::judge_all(gw, "judge", gold, responses, 3, 2)) {
    if (v.sample_type != 1 || !v.aggregate) continue;
    ++type1;
    c.expect(!v.aggregate->lna && !v.aggregate->gha, "type1 verdict " + v.sample_id);
    for (const auto& r : v.repetitions) {
      if (r) c.expect(!r->lna && !r->gha, "type1 repetition " + v.sample_id);
    }
  }
  c.expect(type1 > 0, "no type1 verdicts judged");
  c.note(std::to_string(tuples) + " tuples, " + std::to_string(type1) + " type1 verdicts");
  return c.outcome();
}

// 6. Scoring loop: a mock that knows the truth ranks well, noise does not.
Outcome criterion_scoring() {
  Check c;
  const Prepared p = prepare(1500, 17);
  std::map<std::string, double> truth;  // edited uri -> harmony MOS
  std::map<std::string, std::string> id_of;
  for (const auto& s : p.corpus.samples) id_of[s.edited_uri] = s.sample_id;
  for (const auto& a : p.splits) {
    if (a.consensus.mos_harmony) truth[a.sample_id] = *a.consensus.mos_harmony;
  }

  gateway::EndpointConfig ep;
  ep.id = "scorer";
  ep.roles = {gateway::LmmRole::ScoredModel};
  ep.provider = "mock";
  ep.supports_logprobs = true;

  auto run = [&](std::function<eval::LevelLogits(const std::string&)> logits) {
    auto mock = std::make_shared<gateway::MockProvider>();
    mock->set_responder([&, logits](const gateway::EndpointConfig&, const gateway::LmmRequest& r) {
      const std::string id = id_of.at(r.image_uris().at(0));
      const eval::LevelLogits l = logits(id);
      gateway::TokenLogprobs lp;
      for (std::size_t i = 0; i < 5; ++i) lp[r.target_tokens[i]] = l[i];
      return std::optional<gateway::ProviderReply>(gateway::ProviderReply{r.target_tokens[2], lp});
    });
    gateway::Gateway gw({{ep, mock}});
    eval::ScoringOptions opt;
    opt.task = eval::ScoringTask::Harmony;
    opt.endpoint_id = "scorer";
    return eval::run_scoring(gw, p.corpus.samples, p.splits, opt);
  };

  const auto one_hot = run([&](const std::string& id) {
    eval::LevelLogits l{};
    const int level = std::clamp(static_cast<int>(std::lround(truth.at(id))), 1, 5);
    for (int i = 0; i < 5; ++i) l[static_cast<std::size_t>(i)] = i + 1 == level ? 0.0 : -30.0;
    return l;
  });
  std::vector<double> pred, gt;
  for (const auto& sp : one_hot.predictions) {
    pred.push_back(sp.fused_score);
    gt.push_back(truth.at(sp.sample_id));
  }
  const double s_hot = static_cast<double>(oracle::spearman(pred, gt));
  const auto pooled = std::find_if(one_hot.rows.begin(), one_hot.rows.end(),
                                   [](const auto& r) { return r.task == "all"; });
  c.expect(pooled != one_hot.rows.end() && pooled->srcc, "no pooled row");
  if (pooled != one_hot.rows.end() && pooled->srcc) {
    c.expect(std::abs(*pooled->srcc - s_hot) <= 1e-9, "pooled row disagrees with oracle");
    c.expect(*pooled->srcc >= 0.95, "one-hot SRCC " + std::to_string(*pooled->srcc));
  }

  const auto random = run([](const std::string& id) {
    std::mt19937_64 r(derive_seed(99, "random-logits:" + id));
    eval::LevelLogits l{};
    for (double& v : l) v = 8.0 * unit(r) - 4.0;
    return l;
  });
  std::vector<double> rp, rt;
  for (const auto& sp : random.predictions) {
    if (rp.size() == 200) break;
    rp.push_back(sp.fused_score);
    rt.push_back(truth.at(sp.sample_id));
  }
  c.expect(rp.size() == 200, "fewer than 200 test predictions");
  const double s_rand = eval::srcc(rp, rt);
  c.expect(std::abs(s_rand) <= 0.2, "random SRCC " + std::to_string(s_rand));
  char buf[128];
  std::snprintf(buf, sizeof buf, "one-hot SRCC %.4f (n=%zu), random SRCC %+.4f (n=%zu)", s_hot,
                pred.size(), s_rand, rp.size());
  c.note(buf);
  return c.outcome();
}

int run_in(const fs::path& dir, const std::string& cmd) {
  const std::string line = "cd '" + dir.string() + "' && " + cmd + " >>run.log 2>&1";
  return std::system(line.c_str());
}

std::map<std::string, std::string> tree_digest(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "run.log") continue;
    out[fs::relative(e.path(), root).generic_string()] = file_sha256_hex(e.path());
  }
  return out;
}

// 7. Offline end-to-end run through the CLI, twice.
Outcome criterion_e2e(const fs::path& cli, const fs::path& config) {
  Check c;
  oracle::TempDir tmp("acceptance-e2e");
  const std::string p = "'" + fs::absolute(cli).string() + "'";
  const std::string g = p + " --config mock-config.json";
  const std::vector<std::string> steps = {
      p + " synth-corpus --samples 40 --raters 10 --seed 7 --outdir corpus",
      g + " --transcript work/curate.transcript.jsonl curate --images corpus/images"
          " --detections corpus/detections.json --edited corpus/edited --out work/samples.jsonl",
      g + " replay-campaign --samples work/samples.jsonl --script corpus/ratings.jsonl"
          " --out work/ratings.jsonl",
      p + " clean-ratings --ratings work/ratings.jsonl --out work/consensus.jsonl"
          " --report work/cleaning-report.json",
      g + " build-subsets --consensus work/consensus.jsonl --samples work/samples.jsonl"
          " --seed 17 --out work/splits.jsonl",
      g + " build-instructions --stage 1 --splits work/splits.jsonl --consensus"
          " work/consensus.jsonl --samples work/samples.jsonl --seed 5"
          " --out work/instructions-stage1.jsonl",
      g + " build-instructions --stage 2 --splits work/splits.jsonl --consensus"
          " work/consensus.jsonl --samples work/samples.jsonl --seed 5"
          " --out work/instructions-stage2.jsonl",
      g + " build-instructions --stage 3 --splits work/splits.jsonl --consensus"
          " work/consensus.jsonl --samples work/samples.jsonl --seed 5"
          " --out work/instructions-stage3.jsonl",
      g + " evaluate-scoring --task overall --splits work/splits.jsonl"
          " --samples work/samples.jsonl --out work/table.csv",
  };
  std::vector<std::map<std::string, std::string>> digests;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = tmp.path() / run;
    fs::create_directories(dir);
    fs::copy_file(config, dir / "mock-config.json");
    bool ok = true;
    for (std::size_t i = 0; i < steps.size() && ok; ++i) {
      const int rc = run_in(dir, steps[i]);
      if (rc != 0) {
        c.fail(std::string("run ") + run + " step " + std::to_string(i + 1) + " exited " +
               std::to_string(rc) + " (see run.log)");
        std::cerr << read_file(dir / "run.log");
        ok = false;
      }
    }
    if (!ok) return c.outcome();
    digests.push_back(tree_digest(dir));
  }
  c.expect(digests[0] == digests[1], "outputs differ between runs");
  c.note(std::to_string(digests[0].size()) + " files byte-identical");

  // Schema checks through the loaders, which validate every record.
  const fs::path w = tmp.path() / "a" / "work";
  try {
    const auto samples = load_manifest<EditSample>(w / "samples.jsonl");
    const auto ratings = load_manifest<RatingRecord>(w / "ratings.jsonl");
    const auto consensus = load_manifest<ConsensusScores>(w / "consensus.jsonl");
    const auto splits = load_manifest<subsets::SubsetAssignment>(w / "splits.jsonl");
    c.expect(!samples.empty() && !ratings.empty(), "empty samples or ratings");
    c.expect(consensus.size() == samples.size(), "consensus count differs from samples");
    c.expect(!splits.empty(), "empty splits");
    std::size_t total = 0;
    for (int st = 1; st <= 3; ++st) {
      const auto recs = load_manifest<instruct::InstructionRecord>(
          w / ("instructions-stage" + std::to_string(st) + ".jsonl"));
      c.expect(!recs.empty(), "stage " + std::to_string(st) + " empty");
      for (const auto& r : recs) c.expect(r.stage == st, "stage mismatch " + r.sample_id);
      total += recs.size();
    }
    c.expect(json::parse(read_file(w / "cleaning-report.json")).is_array() ||
                 json::parse(read_file(w / "cleaning-report.json")).is_object(),
             "cleaning report");
    const std::string table = read_file(w / "table.csv");
    c.expect(table.starts_with("task,n,srcc,plcc,method\n"), "table header");
    for (const char* art : {"samples.jsonl", "ratings.jsonl", "consensus.jsonl", "splits.jsonl",
                            "instructions-stage1.jsonl", "instructions-stage2.jsonl",
                            "instructions-stage3.jsonl", "table.csv"}) {
      c.expect(fs::exists(w / (std::string(art) + ".manifest.json")),
               std::string("no manifest for ") + art);
    }

    // Every stage-3 record passed both scrutinizers, neither of them its annotator.
    std::map<std::string, json> audit;
    for (const json& a : read_jsonl(w / "instructions-stage3.jsonl.audit.jsonl")) {
      audit[a.at("sample_id").get<std::string>()] = a;
    }
    const auto stage3 = load_manifest<instruct::InstructionRecord>(w / "instructions-stage3.jsonl");
    for (const auto& r : stage3) {
      c.expect(r.scrutiny == std::make_pair(true, true), "scrutiny " + r.sample_id);
      const auto it = audit.find(r.sample_id);
      if (it == audit.end()) {
        c.fail("no audit for " + r.sample_id);
        continue;
      }
      const auto scrutinizers = it->second.at("scrutinizers").get<std::vector<std::string>>();
      c.expect(scrutinizers.size() == 2 && scrutinizers[0] != scrutinizers[1],
               "scrutinizers " + r.sample_id);
      c.expect(std::find(scrutinizers.begin(), scrutinizers.end(), *r.annotator_id) ==
                   scrutinizers.end(),
               "annotator scrutinized itself " + r.sample_id);
      c.expect(it->second.at("qualified").get<bool>(), "audit not qualified " + r.sample_id);
    }
    c.note(std::to_string(total) + " instruction records, " + std::to_string(stage3.size()) +
           " stage-3 doubly scrutinized");
  } catch (const std::exception& e) {
    c.fail(std::string("schema: ") + e.what());
  }
  return c.outcome();
}

// 8. Cleaning fidelity.
Outcome criterion_cleaning() {
  Check c;
  auto rng = rng_for("cleaning");
  auto maybe = [&](int lo, int hi) -> std::optional<int> {
    if (uniform_below(rng, 5) == 0) return std::nullopt;
    return draw(rng, lo, hi);
  };

  // Conflict rule: exactly pc <= 2 with overall >= 3.
  std::vector<RatingRecord> records;
  for (int i = 0; i < 20000; ++i) {
    RatingRecord r = record("s", i);
    r.overall = maybe(1, 5);
    r.harmony = maybe(1, 5);
    r.prompt_completion = maybe(1, 3);
    if (!r.overall && !r.harmony && !r.prompt_completion) r.naturalness = 3;
    records.push_back(r);
  }
  const stats::ConflictSplit split = stats::filter_conflicts(records);
  std::set<std::string> removed;
  for (const auto& r : split.removed) removed.insert(r.rater_id);
  int expected = 0;
  for (const auto& r : records) {
    const bool conflict = r.prompt_completion && *r.prompt_completion <= 2 && r.overall &&
                          *r.overall >= 3;
    expected += conflict ? 1 : 0;
    c.expect(removed.count(r.rater_id) == (conflict ? 1u : 0u), "conflict rule " + r.rater_id);
  }
  c.expect(split.kept.size() + split.removed.size() == records.size(), "records lost");

  // Cascade: pc drops only with the rater's IQR-removed overall score.
  int cascaded = 0;
  for (int t = 0; t < 2000; ++t) {
    const std::string sid = "c" + std::to_string(t);
    const int n = draw(rng, 6, 15);
    std::vector<RatingRecord> rs;
    const int centre = draw(rng, 2, 4);
    for (int i = 0; i < n; ++i) {
      RatingRecord r = record(sid, i);
      r.overall = uniform_below(rng, 8) == 0 ? draw(rng, 1, 5) : std::clamp(centre + draw(rng, -1, 1) * (uniform_below(rng, 2) == 0 ? 1 : 0), 1, 5);
      if (uniform_below(rng, 6) != 0) r.prompt_completion = draw(rng, 1, 3);
      if (uniform_below(rng, 9) == 0) r.overall.reset();
      if (!r.overall && !r.prompt_completion) r.harmony = 3;
      rs.push_back(r);
    }
    std::vector<RatingRecord> kept;
    for (const auto& r : rs) {
      if (!(r.prompt_completion && *r.prompt_completion <= 2 && r.overall && *r.overall >= 3)) {
        kept.push_back(r);
      }
    }
    std::vector<int> overall;
    std::vector<std::string> who;
    for (const auto& r : kept) {
      if (r.overall) {
        overall.push_back(*r.overall);
        who.push_back(r.rater_id);
      }
    }
    std::set<std::string> dropped;
    const auto keep = oracle::tukey_keep(overall);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (!keep[i]) dropped.insert(who[i]);
    }
    std::vector<stats::Vote> expect;
    for (const auto& r : kept) {
      if (r.prompt_completion && !dropped.count(r.rater_id)) {
        expect.push_back({r.rater_id, *r.prompt_completion});
      }
    }
    const stats::SampleCleaning got = stats::clean_sample(rs);
    c.expect(sorted(got.survivors.pc) == sorted(expect), "cascade " + sid);
    cascaded += got.report.pc.cascade_removed;
  }
  c.expect(cascaded > 0, "cascade never exercised");

  // pc vote ties go to the lower level: every multiset up to size 9.
  int votes = 0;
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      for (int d = 0; d <= 3; ++d) {
        if (a + b + d == 0) continue;
        std::vector<int> v(static_cast<std::size_t>(a), 1);
        v.insert(v.end(), static_cast<std::size_t>(b), 2);
        v.insert(v.end(), static_cast<std::size_t>(d), 3);
        const int top = std::max({a, b, d});
        const int expect_level = a == top ? 1 : b == top ? 2 : 3;
        c.expect(stats::pc_vote(v) == expect_level, "pc vote " + std::to_string(a) +
                                                        std::to_string(b) + std::to_string(d));
        ++votes;
      }
    }
  }
  c.note(std::to_string(expected) + " conflicts of 20000, " + std::to_string(cascaded) +
         " cascaded pc ratings over 2000 samples, " + std::to_string(votes) + " pc votes");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAIQA acceptance suite"};
  std::string cli;
  std::string config;
  app.add_option("--cli", cli, "paiqa command-line binary")->required();
  app.add_option("--config", config, "offline mock configuration")->required();
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "IQR outlier removal vs oracle", 5.0, criterion_iqr},
      {2, "SRCC/PLCC vs brute force, rank invariance", 5.0, criterion_correlation},
      {3, "logit fusion", 0.0, criterion_fusion},
      {4, "shared train/test split", 0.0, criterion_split},
      {5, "judge aggregation", 0.0, criterion_judge},
      {6, "closed-loop scoring", 30.0, criterion_scoring},
      {7, "offline end-to-end run", 120.0, [&] { return criterion_e2e(cli, config); }},
      {8, "cleaning fidelity", 0.0, criterion_cleaning},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0.0 && secs > cr.budget_s) {
      o.pass = false;
      o.detail += "; over time budget of " + std::to_string(static_cast<int>(cr.budget_s)) + " s";
    }
    std::printf("criterion %d: %s  %s (%.2f s)  %s\n", cr.id, o.pass ? "PASS" : "FAIL", cr.name,
                secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
