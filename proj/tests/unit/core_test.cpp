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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "core/hash.hpp"
#include "core/image.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"
#include "core/prompts.hpp"
#include "core/text.hpp"
#include "support/oracles.hpp"

namespace paiqa {
namespace {

int count_markers(const std::string& s) {
  int n = 0;
  for (auto p = s.find(prompts::kImageToken); p != std::string::npos;
       p = s.find(prompts::kImageToken, p + 1)) {
    ++n;
  }
  return n;
}

void expect_region(const NormalizedRegion& r, double cx, double cy, double w, double h) {
  EXPECT_NEAR(r.cx, cx, 1e-12);
  EXPECT_NEAR(r.cy, cy, 1e-12);
  EXPECT_NEAR(r.w, w, 1e-12);
  EXPECT_NEAR(r.h, h, 1e-12);
}

TEST(Region, NormalizationExamples) {
  expect_region(bbox_to_normalized({0, 0, 100, 100}, 100, 100), 0.5, 0.5, 1.0, 1.0);
  expect_region(bbox_to_normalized({25, 25, 75, 75}, 100, 100), 0.5, 0.5, 0.5, 0.5);
  expect_region(bbox_to_normalized({10, 20, 30, 80}, 200, 100), 0.1, 0.5, 0.1, 0.6);
  EXPECT_THROW(bbox_to_normalized({10, 20, 10, 80}, 200, 100), ValidationError);
}

TEST(Region, SerializationExamples) {
  EXPECT_EQ(serialize_region({0.5, 0.5, 1.0, 1.0}), "0.5000,0.5000,1.0000,1.0000");
  EXPECT_EQ(serialize_region({0.12345, 0.5, 0.25, 0.3}), "0.1235,0.5000,0.2500,0.3000");
  EXPECT_THROW(parse_region("0.1,0.2,0.3"), ValidationError);
  EXPECT_THROW(parse_region("0.1,0.2,0.3,x"), ValidationError);
}

TEST(Region, RoundTripsWithinBounds) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 5000; ++i) {
    const int w = 8 + static_cast<int>(rng() % 2000);
    const int h = 8 + static_cast<int>(rng() % 2000);
    BBox b;
    b.x_min = static_cast<int>(rng() % static_cast<unsigned>(w - 1));
    b.y_min = static_cast<int>(rng() % static_cast<unsigned>(h - 1));
    b.x_max = b.x_min + 1 + static_cast<int>(rng() % static_cast<unsigned>(w - b.x_min));
    b.y_max = b.y_min + 1 + static_cast<int>(rng() % static_cast<unsigned>(h - b.y_min));
    const NormalizedRegion r = bbox_to_normalized(b, w, h);
    const NormalizedRegion parsed = parse_region(serialize_region(r));
    EXPECT_LE(std::abs(parsed.cx - r.cx), 5e-5 + 1e-12);
    EXPECT_LE(std::abs(parsed.cy - r.cy), 5e-5 + 1e-12);
    EXPECT_LE(std::abs(parsed.w - r.w), 5e-5 + 1e-12);
    EXPECT_LE(std::abs(parsed.h - r.h), 5e-5 + 1e-12);
    const NormalizedRegion again = bbox_to_normalized(normalized_to_bbox(r, w, h), w, h);
    const double tol = 1.0 / (2.0 * std::min(w, h)) + 1e-12;
    EXPECT_LE(std::abs(again.cx - r.cx), tol);
    EXPECT_LE(std::abs(again.cy - r.cy), tol);
    EXPECT_LE(std::abs(again.w - r.w), tol);
    EXPECT_LE(std::abs(again.h - r.h), tol);
  }
}

TEST(BBox, IngestClampsInclusiveOverrun) {
  bool clamped = false;
  EXPECT_EQ(ingest_bbox({10, 10, 101, 50}, 100, 100, &clamped), (BBox{10, 10, 100, 50}));
  EXPECT_TRUE(clamped);
  EXPECT_EQ(ingest_bbox({10, 10, 90, 50}, 100, 100, &clamped), (BBox{10, 10, 90, 50}));
  EXPECT_FALSE(clamped);
  EXPECT_THROW(ingest_bbox({120, 10, 130, 50}, 100, 100), ValidationError);
  EXPECT_THROW(validate_bbox({10, 10, 101, 50}, 100, 100), ValidationError);
}

TEST(Model, EnumNamesRoundTrip) {
  for (EditingTask t : kAllEditingTasks) EXPECT_EQ(parse_editing_task(to_string(t)), t);
  for (SubsetKind k : kAllSubsets) EXPECT_EQ(parse_subset_kind(to_string(k)), k);
  EXPECT_EQ(parse_difficulty_route(to_string(DifficultyRoute::Proprietary)),
            DifficultyRoute::Proprietary);
  EXPECT_EQ(parse_exclusion_reason(to_string(ExclusionReason::EthicsViolation)),
            ExclusionReason::EthicsViolation);
  EXPECT_THROW(parse_editing_task("Teleport"), ValidationError);
  EXPECT_EQ(level_word(QualityLevel::Excellent), "excellent");
  EXPECT_THROW(level_from_index(6), ValidationError);
}

TEST(Model, RatingRecordInvariants) {
  RatingRecord r{"r1", "s1", 4, 4, 4, 3, false, std::nullopt, 10};
  EXPECT_NO_THROW(validate(r));
  r.overall = 6;
  EXPECT_THROW(validate(r), ValidationError);
  RatingRecord empty{"r1", "s1", {}, {}, {}, {}, false, std::nullopt, 10};
  EXPECT_THROW(validate(empty), ValidationError);
  RatingRecord ex{"r1", "s1", {}, {}, {}, {}, true, ExclusionReason::InfeasiblePrompt, 10};
  EXPECT_NO_THROW(validate(ex));
  ex.overall = 3;
  EXPECT_THROW(validate(ex), ValidationError);
  r.overall = 3;
  r.prompt_completion = 4;
  EXPECT_THROW(validate(r), ValidationError);
}

EditSample make_sample() {
  EditSample s;
  s.sample_id = "s00001";
  s.source = {"s00001", "images/s00001.png", 100, 80, "synthetic"};
  s.edited_uri = "edited/s00001.png";
  s.prompt = "Replace the dog with a cat.";
  s.bbox = {10, 10, 60, 50};
  s.task = EditingTask::SemanticChange;
  s.editor_tool = "dalle-2";
  s.difficulty_route = DifficultyRoute::Proprietary;
  return s;
}

TEST(Json, ManifestRoundTripAndRejection) {
  oracle::TempDir dir("core");
  const EditSample s = make_sample();
  save_manifest(dir.path() / "samples.jsonl", std::vector<EditSample>{s});
  const auto back = load_manifest<EditSample>(dir.path() / "samples.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(json(back[0]).dump(), json(s).dump());
  const std::string line = read_file(dir.path() / "samples.jsonl");
  EXPECT_NE(line.find("\"schema_version\":1"), std::string::npos);
  EXPECT_EQ(line.back(), '\n');

  json broken = s;
  broken["bbox"]["x_max"] = 500;
  write_file(dir.path() / "bad.jsonl", to_jsonl_line(broken));
  EXPECT_THROW(load_manifest<EditSample>(dir.path() / "bad.jsonl"), ValidationError);
  write_file(dir.path() / "nover.jsonl", json(s).dump() + "\n");
  EXPECT_THROW(read_jsonl(dir.path() / "nover.jsonl"), DataError);
  write_file(dir.path() / "garbage.jsonl", "{not json\n");
  EXPECT_THROW(read_jsonl(dir.path() / "garbage.jsonl"), DataError);
  EXPECT_THROW(read_jsonl(dir.path() / "missing.jsonl"), DataError);
}

TEST(Json, RatingAndConsensusRoundTrip) {
  const RatingRecord r{"r1", "s1", 4, std::nullopt, 2, 3, false, std::nullopt, 1700000000};
  EXPECT_EQ(json(r).get<RatingRecord>(), r);
  EXPECT_FALSE(json(r).contains("harmony") && !json(r)["harmony"].is_null());
  ConsensusScores c;
  c.sample_id = "s1";
  c.mos_overall = 3.5;
  c.n_overall = 10;
  c.pc_level = 3;
  c.n_pc = 9;
  const auto back = json(c).get<ConsensusScores>();
  EXPECT_EQ(json(back).dump(), json(c).dump());
  json bad = c;
  bad["mos_overall"] = 7.0;
  EXPECT_THROW(bad.get<ConsensusScores>(), ValidationError);
}

TEST(Hash, KnownDigestAndDerivedSeeds) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(derive_seed(1, "k", 0), derive_seed(1, "k", 0));
  EXPECT_NE(derive_seed(1, "k", 0), derive_seed(1, "k", 1));
  EXPECT_NE(derive_seed(1, "k", 0), derive_seed(2, "k", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
  std::mt19937_64 rng(3);
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[uniform_below(rng, 3)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_THROW(uniform_below(rng, 0), ValidationError);
}

TEST(Image, PngRoundTripAndExactCrop) {
  oracle::TempDir dir("png");
  Image img(37, 23, {10, 20, 30});
  img.fill_rect({5, 6, 20, 18}, {200, 100, 50});
  img.set(0, 0, {1, 2, 3});
  write_png(dir.path() / "a.png", img);
  EXPECT_EQ(read_png(dir.path() / "a.png"), img);
  const ImageSize sz = read_png_size(dir.path() / "a.png");
  EXPECT_EQ(sz.width, 37);
  EXPECT_EQ(sz.height, 23);
  const Image crop = img.crop({5, 6, 20, 18});
  ASSERT_EQ(crop.width(), 15);
  ASSERT_EQ(crop.height(), 12);
  for (int y = 0; y < crop.height(); ++y) {
    for (int x = 0; x < crop.width(); ++x) EXPECT_EQ(crop.at(x, y), img.at(x + 5, y + 6));
  }
  Image boxed = img;
  boxed.draw_outline({5, 6, 20, 18}, {255, 0, 0});
  EXPECT_EQ(boxed.at(5, 6), (Rgb{255, 0, 0}));
  EXPECT_EQ(boxed.at(12, 12), img.at(12, 12));
  EXPECT_THROW(img.crop({30, 0, 40, 5}), ValidationError);
  write_file(dir.path() / "bad.png", "not a png");
  EXPECT_THROW(read_png(dir.path() / "bad.png"), DataError);
}

TEST(Text, Helpers) {
  EXPECT_EQ(trim("  \"a cat\" \n"), "a cat");
  EXPECT_EQ(sentence_count("One. Two! Three?"), 3);
  EXPECT_EQ(sentence_count("Just one sentence."), 1);
  EXPECT_EQ(sentence_count("No terminator"), 1);
  EXPECT_EQ(strip_terminal("Done.. "), "Done");
}

TEST(Prompts, ImageMarkersAndTemplates) {
  EXPECT_EQ(count_markers(prompts::grounding_question()), 2);
  EXPECT_EQ(count_markers(prompts::harmony_question("p")), 1);
  EXPECT_EQ(count_markers(prompts::naturalness_question("p")), 1);
  EXPECT_EQ(count_markers(prompts::cot_context("Make it red.")), 2);
  EXPECT_EQ(count_markers(prompts::explanation_question("Make it red.")), 2);
  EXPECT_EQ(count_markers(prompts::harmony_scoring_question()), 1);
  EXPECT_EQ(count_markers(prompts::naturalness_scoring_question()), 1);
  EXPECT_EQ(prompts::harmony_answer(QualityLevel::Excellent), "Harmony level is: excellent.");
  EXPECT_EQ(prompts::naturalness_answer(QualityLevel::Bad), "Naturalness level is: bad.");
  EXPECT_NE(prompts::grounding_answer("0.5000,0.5000,0.5000,0.5000")
                .find("0.5000,0.5000,0.5000,0.5000"),
            std::string::npos);
  EXPECT_EQ(prompts::cot_context("Make it red.").find(".."), std::string::npos);
  EXPECT_EQ(prompts::scrutiny_prompt_clarity("Make it red.").find(".."), std::string::npos);
  const std::string full = prompts::judge_request("gold", "resp", true);
  const std::string short_form = prompts::judge_request("gold", "resp", false);
  EXPECT_NE(full.find("\nLNA: "), std::string::npos);
  EXPECT_EQ(short_form.find("\nLNA: "), std::string::npos);
  EXPECT_NE(short_form.find("\nPA: "), std::string::npos);
}

}  // namespace
}  // namespace paiqa
