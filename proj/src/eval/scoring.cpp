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


#include "eval/scoring.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

#include "core/hash.hpp"
#include "core/image.hpp"
#include "core/parallel.hpp"
#include "core/prompts.hpp"

namespace paiqa::eval {

using gateway::Gateway;
using gateway::LmmRequest;
using gateway::LmmRole;
using subsets::Split;
using subsets::SubsetAssignment;

std::string_view to_string(ScoringTask t) {
  switch (t) {
    case ScoringTask::Harmony: return "harmony";
    case ScoringTask::Naturalness: return "naturalness";
    case ScoringTask::Overall: return "overall";
  }
  return "harmony";
}

ScoringTask parse_scoring_task(std::string_view name) {
  if (name == "harmony") return ScoringTask::Harmony;
  if (name == "naturalness") return ScoringTask::Naturalness;
  if (name == "overall") return ScoringTask::Overall;
  throw ValidationError("unknown scoring task: " + std::string(name));
}

std::string_view to_string(ScoreMethod m) {
  return m == ScoreMethod::LogprobFusion ? "logprob-fusion" : "level-word";
}

void to_json(nlohmann::json& j, const ScorePrediction& p) {
  j = {{"sample_id", p.sample_id},
       {"fused_score", p.fused_score},
       {"level_probs", p.level_probs},
       {"method", to_string(p.method)}};
}

void validate(const ScorePrediction& p) {
  double sum = 0.0;
  for (double v : p.level_probs) {
    if (!(v >= 0.0)) throw ValidationError("negative level probability for " + p.sample_id);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("level probabilities of " + p.sample_id + " do not sum to 1");
  }
  if (!(p.fused_score >= 1.0 && p.fused_score <= 5.0)) {
    throw ValidationError("fused score of " + p.sample_id + " outside [1,5]");
  }
}

std::optional<int> parse_level_word(std::string_view text) {
  static const std::regex kWord(R"(\b(bad|poor|fair|good|excellent)\b)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, kWord)) return std::nullopt;
  std::string w = m[1].str();
  std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
  for (std::size_t i = 0; i < kLevelWords.size(); ++i) {
    if (kLevelWords[i] == w) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<ScorePrediction> score_image(Gateway& gw, const std::string& endpoint_id,
                                           const std::string& question,
                                           const std::string& image_uri,
                                           const std::string& sample_id, std::uint64_t seed) {
  const bool logprobs = gw.endpoint(endpoint_id).supports_logprobs;
  LmmRequest req =
      LmmRequest::user(LmmRole::ScoredModel, gateway::interleave(question, {image_uri}));
  req.temperature = 0.0;
  req.seed = seed;
  req.max_tokens = 32;
  req.want_logprobs = logprobs;
  if (logprobs) req.target_tokens.assign(kLevelWords.begin(), kLevelWords.end());
  const gateway::LmmResponse resp = gw.send_to(endpoint_id, req);

  ScorePrediction p;
  p.sample_id = sample_id;
  if (logprobs && resp.token_logprobs) {
    LevelLogits logits{};
    for (std::size_t i = 0; i < 5; ++i) {
      auto it = resp.token_logprobs->find(std::string(kLevelWords[i]));
      logits[i] = it == resp.token_logprobs->end() ? gateway::kMissingKeywordLogprob : it->second;
    }
    p.level_probs = softmax(logits);
    p.fused_score = fuse_level_logits(logits);
    p.method = ScoreMethod::LogprobFusion;
  } else {
    const std::optional<int> level = parse_level_word(resp.text);
    if (!level) return std::nullopt;
    p.level_probs = {};
    p.level_probs[static_cast<std::size_t>(*level - 1)] = 1.0;
    p.fused_score = *level;
    p.method = ScoreMethod::LevelWord;
  }
  validate(p);
  return p;
}

namespace {

struct Target {
  const SubsetAssignment* a;
  ScoringTask dim;  // Harmony or Naturalness
};

std::string crop_for(const EditSample& s, const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / (s.sample_id + ".png");
  write_png(path, read_png(s.edited_uri).crop(s.bbox));
  return path.generic_string();
}

}  // namespace

ScoringReport run_scoring(Gateway& gw, const std::vector<EditSample>& samples,
                          const std::vector<SubsetAssignment>& splits, const ScoringOptions& opt) {
  std::map<std::string, const EditSample*> by_id;
  std::map<std::string, EditingTask> task_of;
  for (const EditSample& s : samples) {
    by_id[s.sample_id] = &s;
    task_of[s.sample_id] = s.task;
  }
  if (!gw.has_endpoint(opt.endpoint_id)) {
    throw ValidationError("unknown scoring endpoint " + opt.endpoint_id);
  }
  const ScoreMethod method = gw.endpoint(opt.endpoint_id).supports_logprobs
                                 ? ScoreMethod::LogprobFusion
                                 : ScoreMethod::LevelWord;
  if (method == ScoreMethod::LevelWord) {
    spdlog::warn("endpoint {} has no logprobs; scoring from generated level words",
                 opt.endpoint_id);
  }

  const SubsetKind kind = opt.task == ScoringTask::Harmony       ? SubsetKind::Harmony
                          : opt.task == ScoringTask::Naturalness ? SubsetKind::Naturalness
                                                                 : SubsetKind::OverallQuality;
  std::vector<Target> targets;
  for (const SubsetAssignment& a : splits) {
    if (!a.in(kind)) continue;
    if (!by_id.count(a.sample_id)) throw DataError("split references unknown sample " + a.sample_id);
    if (opt.task == ScoringTask::Overall) {
      targets.push_back({&a, ScoringTask::Harmony});
      targets.push_back({&a, ScoringTask::Naturalness});
    } else if (a.split == Split::Test) {
      targets.push_back({&a, opt.task});
    }
  }

  std::vector<std::optional<ScorePrediction>> preds(targets.size());
  parallel_for(targets.size(), opt.parallelism, [&](std::size_t i) {
    const EditSample& s = *by_id.at(targets[i].a->sample_id);
    const bool harmony = targets[i].dim == ScoringTask::Harmony;
    const std::string uri = harmony ? s.edited_uri : crop_for(s, opt.crops_dir);
    const std::string question =
        harmony ? prompts::harmony_scoring_question() : prompts::naturalness_scoring_question();
    preds[i] = score_image(gw, opt.endpoint_id, question, uri, s.sample_id,
                           derive_seed(opt.seed, "score:" + std::string(to_string(targets[i].dim)) +
                                                     ":" + s.sample_id));
  });

  ScoringReport report;
  report.method = method;
  std::map<std::string, double> predicted;
  std::map<std::string, double> truth;

  if (opt.task != ScoringTask::Overall) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& c = targets[i].a->consensus;
      if (!preds[i]) {
        ++report.unscored;
        continue;
      }
      predicted[preds[i]->sample_id] = preds[i]->fused_score;
      truth[c.sample_id] = opt.task == ScoringTask::Harmony ? *c.mos_harmony : *c.mos_naturalness;
      report.predictions.push_back(*preds[i]);
    }
  } else {
    // Pair up (harmony, naturalness) predictions per sample.
    std::map<std::string, std::array<std::optional<ScorePrediction>, 2>> pairs;
    std::map<std::string, const SubsetAssignment*> assignment;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const std::string& id = targets[i].a->sample_id;
      assignment[id] = targets[i].a;
      pairs[id][targets[i].dim == ScoringTask::Harmony ? 0 : 1] = preds[i];
    }
    std::vector<std::array<double, 2>> x;
    std::vector<double> y;
    std::vector<std::string> test;
    for (const auto& [id, pr] : pairs) {
      if (!pr[0] || !pr[1]) {
        ++report.unscored;
        continue;
      }
      if (assignment[id]->split == Split::Train) {
        x.push_back({pr[0]->fused_score, pr[1]->fused_score});
        y.push_back(*assignment[id]->consensus.mos_overall);
      } else {
        test.push_back(id);
      }
    }
    std::unique_ptr<Regressor> reg = make_regressor(opt.regressor);
    reg->fit(x, y);
    report.regressor = reg->name();
    for (const std::string& id : test) {
      const auto& pr = pairs[id];
      const double score = reg->predict({pr[0]->fused_score, pr[1]->fused_score});
      predicted[id] = score;
      truth[id] = *assignment[id]->consensus.mos_overall;
      ScorePrediction p;
      p.sample_id = id;
      p.fused_score = score;
      // Level distribution of the nearest level, for the record shape.
      p.level_probs[static_cast<std::size_t>(std::lround(score) - 1)] = 1.0;
      p.method = method;
      report.predictions.push_back(p);
    }
  }
  if (report.unscored > 0) {
    spdlog::warn("{} samples could not be scored (no level in the reply)", report.unscored);
  }
  std::sort(report.predictions.begin(), report.predictions.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  report.rows = evaluate_scoring(predicted, truth, task_of);
  return report;
}

}  // namespace paiqa::eval
