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


#include "instruct/instructions.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "core/hash.hpp"
#include "core/image.hpp"
#include "core/json_io.hpp"
#include "core/parallel.hpp"
#include "core/prompts.hpp"
#include "core/text.hpp"
#include "curation/curation.hpp"

namespace paiqa::instruct {

using gateway::Gateway;
using gateway::LmmRequest;
using gateway::LmmRole;
using subsets::Split;
using subsets::SubsetAssignment;

std::string_view to_string(CotDimension d) {
  switch (d) {
    case CotDimension::PromptCompletion: return "PromptCompletion";
    case CotDimension::Naturalness: return "Naturalness";
    case CotDimension::Harmony: return "Harmony";
  }
  return "PromptCompletion";
}

CotDimension parse_cot_dimension(std::string_view name) {
  if (name == "PromptCompletion") return CotDimension::PromptCompletion;
  if (name == "Naturalness") return CotDimension::Naturalness;
  if (name == "Harmony") return CotDimension::Harmony;
  throw ValidationError("unknown CoT dimension: " + std::string(name));
}

std::string_view to_string(Scenario s) {
  return s == Scenario::LowCompletion ? "LowCompletion" : "FullCompletion";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "LowCompletion") return Scenario::LowCompletion;
  if (name == "FullCompletion") return Scenario::FullCompletion;
  throw ValidationError("unknown scenario: " + std::string(name));
}

namespace {

std::size_t count_markers(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(prompts::kImageToken); pos != std::string_view::npos;
       pos = text.find(prompts::kImageToken, pos + 1)) {
    ++n;
  }
  return n;
}

}  // namespace

void validate(const InstructionRecord& r) {
  const std::string where = "instruction " + r.sample_id;
  if (r.stage < 1 || r.stage > 3) throw ValidationError(where + ": stage must be 1..3");
  if (r.sample_id.empty()) throw ValidationError("instruction without sample_id");
  if (r.question.empty() || r.answer.empty()) {
    throw ValidationError(where + ": empty question or answer");
  }
  if (r.image_refs.empty()) throw ValidationError(where + ": no image refs");
  if (count_markers(r.question) != r.image_refs.size()) {
    throw ValidationError(where + ": image marker count differs from image refs");
  }
  if (r.stage == 3) {
    if (!r.cot_segments || r.cot_segments->empty() || !r.annotator_id || !r.scrutiny ||
        !r.scenario) {
      throw ValidationError(where + ": stage 3 requires segments, annotator, scrutiny, scenario");
    }
  } else if (r.cot_segments || r.annotator_id || r.scrutiny || r.scenario) {
    throw ValidationError(where + ": CoT fields are for stage 3 only");
  }
}

void to_json(nlohmann::json& j, const InstructionRecord& r) {
  j = {{"stage", r.stage},
       {"sample_id", r.sample_id},
       {"image_refs", r.image_refs},
       {"question", r.question},
       {"answer", r.answer}};
  if (r.cot_segments) {
    nlohmann::json segs = nlohmann::json::array();
    for (const CotSegment& s : *r.cot_segments) {
      segs.push_back({{"dimension", to_string(s.dimension)}, {"text", s.text}});
    }
    j["cot_segments"] = segs;
  }
  if (r.annotator_id) j["annotator_id"] = *r.annotator_id;
  if (r.scrutiny) j["scrutiny"] = {r.scrutiny->first, r.scrutiny->second};
  if (r.scenario) j["scenario"] = to_string(*r.scenario);
}

void from_json(const nlohmann::json& j, InstructionRecord& r) {
  r = {};
  r.stage = j.at("stage").get<int>();
  r.sample_id = j.at("sample_id").get<std::string>();
  r.image_refs = j.at("image_refs").get<std::vector<std::string>>();
  r.question = j.at("question").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  if (j.contains("cot_segments")) {
    std::vector<CotSegment> segs;
    for (const auto& s : j.at("cot_segments")) {
      segs.push_back({parse_cot_dimension(s.at("dimension").get<std::string>()),
                      s.at("text").get<std::string>()});
    }
    r.cot_segments = std::move(segs);
  }
  if (j.contains("annotator_id")) r.annotator_id = j.at("annotator_id").get<std::string>();
  if (j.contains("scrutiny")) {
    const auto& s = j.at("scrutiny");
    if (!s.is_array() || s.size() != 2) throw ValidationError("scrutiny must be a pair");
    r.scrutiny = std::make_pair(s[0].get<bool>(), s[1].get<bool>());
  }
  if (j.contains("scenario")) r.scenario = parse_scenario(j.at("scenario").get<std::string>());
  validate(r);
}

LevelMapping mapping_for(const std::vector<SubsetAssignment>& splits, SubsetKind kind) {
  const subsets::ScoreRange r = subsets::train_range(splits, kind);
  return {r.min, r.max};
}

QualityLevel mos_to_level(double mos, const LevelMapping& m) {
  if (!(m.min <= m.max)) throw ValidationError("level mapping range is inverted");
  if (!(mos >= m.min && mos <= m.max)) {
    throw ValidationError("MOS outside the level mapping range");
  }
  const double s = 5.0 * (mos - m.min) / (m.max - m.min + LevelMapping::kEpsilon);
  return level_from_index(std::clamp(static_cast<int>(std::floor(s)) + 1, 1, 5));
}

QualityLevel mos_to_level_clamped(double mos, const LevelMapping& m) {
  return mos_to_level(std::clamp(mos, m.min, m.max), m);
}

std::set<std::string> test_ids(const std::vector<SubsetAssignment>& splits) {
  std::set<std::string> out;
  for (const SubsetAssignment& a : splits) {
    if (a.split == Split::Test) out.insert(a.sample_id);
  }
  return out;
}

std::vector<InstructionRecord> build_stage1(const std::vector<EditSample>& samples,
                                            const std::vector<SubsetAssignment>& splits) {
  const std::set<std::string> held_out = test_ids(splits);
  std::vector<InstructionRecord> out;
  for (const EditSample& s : samples) {
    if (held_out.count(s.sample_id)) continue;
    InstructionRecord r;
    r.stage = 1;
    r.sample_id = s.sample_id;
    r.image_refs = {s.source.uri, s.edited_uri};
    r.question = prompts::grounding_question();
    r.answer = prompts::grounding_answer(serialize_region(
        bbox_to_normalized(s.bbox, s.source.width_px, s.source.height_px)));
    validate(r);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sample_id < b.sample_id;
  });
  return out;
}

namespace {

std::map<std::string, const EditSample*> index_samples(const std::vector<EditSample>& samples) {
  std::map<std::string, const EditSample*> out;
  for (const EditSample& s : samples) out[s.sample_id] = &s;
  return out;
}

const EditSample& sample_of(const std::map<std::string, const EditSample*>& idx,
                            const std::string& id) {
  auto it = idx.find(id);
  if (it == idx.end()) throw DataError("split references unknown sample " + id);
  return *it->second;
}

// Two-sentence prior for a low-rated dimension; one retry when too long.
std::optional<std::string> generate_prior(Gateway& gw, const std::string& request_text,
                                          const std::string& image_uri, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    LmmRequest req = LmmRequest::user(LmmRole::CotAnnotator,
                                      gateway::interleave(request_text, {image_uri}));
    req.temperature = 0.7;
    req.seed = seed + attempt;
    const std::string text = trim(gw.send(req).text);
    if (!text.empty() && sentence_count(text) <= 2) return text;
  }
  return std::nullopt;
}

void seeded_shuffle(std::vector<InstructionRecord>& records, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = records.size(); i > 1; --i) {
    std::swap(records[i - 1], records[subsets::uniform_below(rng, i)]);
  }
}

}  // namespace

std::vector<InstructionRecord> build_stage2(Gateway& gw, const std::vector<EditSample>& samples,
                                            const std::vector<SubsetAssignment>& splits,
                                            const Stage2Options& opt) {
  const auto idx = index_samples(samples);
  const LevelMapping harmony_map = mapping_for(splits, SubsetKind::Harmony);
  const LevelMapping natural_map = mapping_for(splits, SubsetKind::Naturalness);

  struct Job {
    const SubsetAssignment* a;
    SubsetKind kind;
  };
  std::vector<Job> jobs;
  for (SubsetKind kind : {SubsetKind::Harmony, SubsetKind::Naturalness}) {
    for (const SubsetAssignment& a : splits) {
      if (a.split == Split::Train && a.in(kind)) jobs.push_back({&a, kind});
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) {
    return x.kind != y.kind ? x.kind == SubsetKind::Harmony : x.a->sample_id < y.a->sample_id;
  });

  std::vector<std::optional<InstructionRecord>> made(jobs.size());
  parallel_for(jobs.size(), opt.parallelism, [&](std::size_t i) {
    const SubsetAssignment& a = *jobs[i].a;
    const EditSample& s = sample_of(idx, a.sample_id);
    InstructionRecord r;
    r.stage = 2;
    r.sample_id = s.sample_id;
    if (jobs[i].kind == SubsetKind::Harmony) {
      const QualityLevel level = mos_to_level(*a.consensus.mos_harmony, harmony_map);
      std::string prior(prompts::kNeutralHarmonyPrior);
      if (level < QualityLevel::Good) {
        auto p = generate_prior(gw, prompts::harmony_prior_request(), s.edited_uri,
                                derive_seed(opt.seed, "prior:harmony:" + s.sample_id));
        if (!p) {
          spdlog::warn("harmony prior for {} exceeds two sentences; skipped", s.sample_id);
          return;
        }
        prior = *p;
      }
      r.image_refs = {s.edited_uri};
      r.question = prompts::harmony_question(prior);
      r.answer = prompts::harmony_answer(level);
    } else {
      const QualityLevel level = mos_to_level(*a.consensus.mos_naturalness, natural_map);
      if (s.bbox.width() < Stage2Options::kMinCropSide ||
          s.bbox.height() < Stage2Options::kMinCropSide) {
        spdlog::warn("edited region of {} is below {} px; naturalness pair skipped", s.sample_id,
                     Stage2Options::kMinCropSide);
        return;
      }
      const std::filesystem::path crop_path = opt.crops_dir / (s.sample_id + ".png");
      write_png(crop_path, read_png(s.edited_uri).crop(s.bbox));
      const std::string crop_uri = crop_path.generic_string();
      std::string prior(prompts::kNeutralNaturalnessPrior);
      if (level < QualityLevel::Good) {
        auto p = generate_prior(gw, prompts::naturalness_prior_request(), crop_uri,
                                derive_seed(opt.seed, "prior:naturalness:" + s.sample_id));
        if (!p) {
          spdlog::warn("naturalness prior for {} exceeds two sentences; skipped", s.sample_id);
          return;
        }
        prior = *p;
      }
      r.image_refs = {crop_uri};
      r.question = prompts::naturalness_question(prior);
      r.answer = prompts::naturalness_answer(level);
    }
    validate(r);
    made[i] = std::move(r);
  });

  std::vector<InstructionRecord> out;
  for (auto& m : made) {
    if (m) out.push_back(std::move(*m));
  }
  seeded_shuffle(out, opt.seed);
  return out;
}

void to_json(nlohmann::json& j, const Stage3Audit& a) {
  j = {{"sample_id", a.sample_id},
       {"annotators", a.annotators},
       {"scrutinizers", a.scrutinizers},
       {"qualified", a.qualified},
       {"outcome", a.outcome}};
}

int sample_type(const ConsensusScores& c) {
  if (!c.pc_level) return 0;
  if (*c.pc_level <= 2) return 1;
  if (!c.mos_overall || !c.mos_harmony || !c.mos_naturalness) return 0;
  const double h = *c.mos_harmony, n = *c.mos_naturalness, o = *c.mos_overall;
  if (std::min(h, n) < 3.0 && o < 3.0) return 2;
  if (h > 3.0 && n > 3.0 && o > 3.0) return 3;
  return 0;
}

void to_json(nlohmann::json& j, const GoldRecord& g) {
  j = {{"sample_id", g.sample_id}, {"sample_type", g.sample_type}, {"gold_answer", g.gold_answer}};
}

void from_json(const nlohmann::json& j, GoldRecord& g) {
  g.sample_id = j.at("sample_id").get<std::string>();
  g.sample_type = j.at("sample_type").get<int>();
  g.gold_answer = j.at("gold_answer").get<std::string>();
  if (g.sample_id.empty()) throw ValidationError("gold record without sample_id");
  if (g.sample_type < 1 || g.sample_type > 3) {
    throw ValidationError("gold record " + g.sample_id + ": sample_type must be 1..3");
  }
  if (g.gold_answer.empty()) throw ValidationError("gold record " + g.sample_id + ": empty answer");
}

std::string compose_answer(Scenario scenario, int pc_level,
                           const std::vector<CotSegment>& segments, QualityLevel overall) {
  auto text_of = [&](CotDimension d) -> std::string {
    for (const CotSegment& s : segments) {
      if (s.dimension == d) return strip_terminal(s.text);
    }
    throw ValidationError("missing CoT segment " + std::string(to_string(d)));
  };
  std::string out = "The prompt completion is " + std::string(prompts::completion_phrase(pc_level)) +
                    ". " + text_of(CotDimension::PromptCompletion) + ". ";
  if (scenario == Scenario::LowCompletion) {
    overall = pc_level == 1 ? QualityLevel::Bad : QualityLevel::Poor;
  } else {
    out += "The harmony: " + text_of(CotDimension::Harmony) + ". ";
    out += "The local naturalness: " + text_of(CotDimension::Naturalness) + ". ";
  }
  out += "Therefore, the overall editing quality level of the image is ";
  out += level_word(overall);
  return out;
}

namespace {

std::string_view dimension_phrase(CotDimension d) {
  switch (d) {
    case CotDimension::PromptCompletion: return "prompt completion";
    case CotDimension::Naturalness: return "local naturalness";
    case CotDimension::Harmony: return "harmony";
  }
  return "prompt completion";
}

LmmRequest cot_request(LmmRole role, const EditSample& s, const std::string& body) {
  return LmmRequest::user(role, gateway::interleave(prompts::cot_context(s.prompt) + body,
                                                    {s.source.uri, s.edited_uri}));
}

}  // namespace

CotAttempt annotate_and_validate(Gateway& gw, const EditSample& sample, const ConsensusScores& c,
                                 QualityLevel harmony, QualityLevel naturalness,
                                 const std::string& annotator,
                                 const std::vector<std::string>& scrutinizers,
                                 std::uint64_t seed) {
  if (std::find(scrutinizers.begin(), scrutinizers.end(), annotator) != scrutinizers.end()) {
    throw ValidationError("annotator " + annotator + " is also a scrutinizer");
  }
  if (!c.pc_level) throw ValidationError("sample " + sample.sample_id + " has no pc level");
  const int pc = *c.pc_level;

  struct Ask {
    CotDimension dim;
    std::string request;
    std::string level_text;
  };
  std::vector<Ask> asks = {{CotDimension::PromptCompletion,
                            prompts::cot_prompt_completion_request(pc),
                            std::string(prompts::completion_phrase(pc))}};
  if (pc == 3) {
    asks.push_back({CotDimension::Naturalness, prompts::cot_naturalness_request(naturalness),
                    std::string(level_word(naturalness))});
    asks.push_back({CotDimension::Harmony, prompts::cot_harmony_request(harmony),
                    std::string(level_word(harmony))});
  }

  CotAttempt out;
  for (const Ask& ask : asks) {
    std::optional<std::string> text;
    for (std::uint64_t retry = 0; retry < 2 && !text; ++retry) {
      LmmRequest req = cot_request(LmmRole::CotAnnotator, sample, ask.request);
      req.temperature = 0.7;
      req.seed = derive_seed(seed, "cot:" + std::string(to_string(ask.dim)), retry);
      std::string reply = trim(gw.send_to(annotator, req).text);
      if (!reply.empty() && sentence_count(reply) <= 2) text = std::move(reply);
    }
    if (!text) {
      out.over_length = true;
      return out;
    }
    out.segments.push_back({ask.dim, *text});
  }

  for (const std::string& scrutinizer : scrutinizers) {
    bool all_yes = true;
    for (std::size_t i = 0; i < asks.size() && all_yes; ++i) {
      LmmRequest req = cot_request(
          LmmRole::CotScrutinizer, sample,
          prompts::cot_validation_request(dimension_phrase(asks[i].dim), asks[i].level_text,
                                          out.segments[i].text));
      req.temperature = 0.0;
      all_yes = curation::parse_yes_no(gw.send_to(scrutinizer, req).text).value_or(false);
    }
    out.verdicts.push_back(all_yes);
  }
  return out;
}

namespace {

constexpr std::size_t kScrutinizersPerSample = 2;

std::vector<std::string> first_scrutinizers(std::vector<std::string> rest) {
  rest.resize(std::min(rest.size(), kScrutinizersPerSample));
  return rest;
}

}  // namespace

Stage3Result build_stage3(Gateway& gw, const std::vector<EditSample>& samples,
                          const std::vector<SubsetAssignment>& splits, const Stage3Options& opt) {
  const std::vector<std::string> pool = gw.endpoints_for(LmmRole::CotAnnotator);
  if (pool.size() < 3) {
    throw ValidationError("CotAnnotator pool needs at least 3 endpoints, has " +
                          std::to_string(pool.size()));
  }
  for (const std::string& id : pool) {
    if (!gw.endpoint(id).serves(LmmRole::CotScrutinizer)) {
      throw ValidationError("CotAnnotator endpoint " + id + " must also serve CotScrutinizer");
    }
  }
  const auto idx = index_samples(samples);
  const LevelMapping harmony_map = mapping_for(splits, SubsetKind::Harmony);
  const LevelMapping natural_map = mapping_for(splits, SubsetKind::Naturalness);
  const LevelMapping overall_map = mapping_for(splits, SubsetKind::OverallQuality);
  const bool clamp = opt.split == Split::Test;
  auto level = [&](double mos, const LevelMapping& m) {
    return clamp ? mos_to_level_clamped(mos, m) : mos_to_level(mos, m);
  };

  std::vector<const SubsetAssignment*> candidates;
  for (const SubsetAssignment& a : splits) {
    if (a.split == opt.split && a.in(SubsetKind::OverallQuality)) candidates.push_back(&a);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto* x, const auto* y) { return x->sample_id < y->sample_id; });

  std::vector<Stage3Audit> audit(candidates.size());
  std::vector<std::optional<InstructionRecord>> made(candidates.size());
  parallel_for(candidates.size(), opt.parallelism, [&](std::size_t i) {
    const SubsetAssignment& a = *candidates[i];
    const ConsensusScores& c = a.consensus;
    const EditSample& s = sample_of(idx, a.sample_id);
    Stage3Audit& log = audit[i];
    log.sample_id = s.sample_id;

    const QualityLevel h = level(*c.mos_harmony, harmony_map);
    const QualityLevel n = level(*c.mos_naturalness, natural_map);
    const gateway::AnnotatorChoice first = gateway::pick_annotator(pool, opt.seed, s.sample_id);

    std::vector<std::pair<std::string, std::vector<std::string>>> plans = {
        {first.annotator, first_scrutinizers(first.scrutinizers)}};
    // The regeneration goes to another member of the pool.
    const std::string second =
        first.scrutinizers[derive_seed(opt.seed, "reannotate:" + s.sample_id) %
                           first.scrutinizers.size()];
    std::vector<std::string> rest;
    for (const std::string& id : pool) {
      if (id != second) rest.push_back(id);
    }
    plans.emplace_back(second, first_scrutinizers(rest));

    try {
      for (std::size_t attempt = 0; attempt < plans.size(); ++attempt) {
        const auto& [annotator, scrutinizers] = plans[attempt];
        log.annotators.push_back(annotator);
        log.scrutinizers = scrutinizers;
        CotAttempt res = annotate_and_validate(
            gw, s, c, h, n, annotator, scrutinizers,
            derive_seed(opt.seed, "stage3:" + s.sample_id, attempt));
        if (res.over_length) {
          log.outcome = "over-length";
          return;
        }
        const bool qualified =
            std::all_of(res.verdicts.begin(), res.verdicts.end(), [](bool v) { return v; });
        if (!qualified) continue;

        const Scenario scenario = *c.pc_level == 3 ? Scenario::FullCompletion
                                                   : Scenario::LowCompletion;
        InstructionRecord r;
        r.stage = 3;
        r.sample_id = s.sample_id;
        r.image_refs = {s.source.uri, s.edited_uri};
        r.question = prompts::explanation_question(s.prompt);
        r.answer = compose_answer(scenario, *c.pc_level, res.segments,
                                  level(*c.mos_overall, overall_map));
        r.cot_segments = res.segments;
        r.annotator_id = annotator;
        r.scrutiny = std::make_pair(res.verdicts.at(0), res.verdicts.at(1));
        r.scenario = scenario;
        validate(r);
        made[i] = std::move(r);
        log.qualified = true;
        log.outcome = "qualified";
        return;
      }
      log.outcome = "unqualified";
    } catch (const gateway::GatewayError& e) {
      spdlog::warn("explanation for {} abandoned: {}", s.sample_id, e.what());
      log.outcome = "gateway-error";
    }
  });

  Stage3Result out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.audit.push_back(std::move(audit[i]));
    if (!made[i]) continue;
    const int type = sample_type(candidates[i]->consensus);
    if (type != 0) out.gold.push_back({made[i]->sample_id, type, made[i]->answer});
    out.records.push_back(std::move(*made[i]));
  }
  return out;
}

}  // namespace paiqa::instruct
