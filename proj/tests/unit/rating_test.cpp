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

#include <atomic>
#include <map>
#include <set>
#include <thread>

#include "httplib.h"

#include "core/image.hpp"
#include "core/json_io.hpp"
#include "pipeline/synth.hpp"
#include "rating/api.hpp"
#include "rating/http.hpp"
#include "rating/replay.hpp"
#include "rating/service.hpp"
#include "rating/storage.hpp"
#include "support/oracles.hpp"

namespace paiqa::rating {
namespace {

using Kind = RatingError::Kind;

std::vector<EditSample> samples(int n) {
  pipeline::SynthOptions opt;
  opt.n_samples = n;
  return pipeline::synth_corpus(opt, "corpus").samples;
}

RatingRecord rating(const std::string& rater, const std::string& sample, int overall = 4,
                    int pc = 3) {
  RatingRecord r;
  r.rater_id = rater;
  r.sample_id = sample;
  r.overall = overall;
  r.harmony = 3;
  r.naturalness = 3;
  r.prompt_completion = pc;
  return r;
}

template <typename Fn>
Kind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const RatingError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected RatingError";
  return Kind::InvalidRecord;
}

struct Campaign {
  std::int64_t now = 1000;
  std::vector<EditSample> items;
  RatingService service;

  explicit Campaign(int n, RatingConfig cfg = {},
                    std::shared_ptr<Storage> store = std::make_shared<MemoryStore>())
      : items(samples(n)), service(items, cfg, std::move(store), [this] { return now; }) {}

  std::string id(int i) const { return items.at(static_cast<std::size_t>(i)).sample_id; }

  // Registers `rater`, takes the next assignment and rates it.
  std::string rate_next(const std::string& rater, int overall = 4) {
    service.register_rater(rater);
    const auto a = service.next_assignment(rater);
    EXPECT_TRUE(a.has_value());
    service.submit_rating(rating(rater, a->sample_id, overall));
    ++now;
    return a->sample_id;
  }
};

TEST(RatingService, ProtocolRule) {
  EXPECT_TRUE(violates_protocol(rating("r", "s", 3, 2)));
  EXPECT_TRUE(violates_protocol(rating("r", "s", 5, 1)));
  EXPECT_FALSE(violates_protocol(rating("r", "s", 2, 2)));
  EXPECT_FALSE(violates_protocol(rating("r", "s", 5, 3)));
}

TEST(RatingService, ServesFewestRatedFirst) {
  Campaign c(3);
  for (const char* r : {"a", "b", "c", "d"}) c.service.register_rater(r);
  EXPECT_EQ(c.service.next_assignment("a")->sample_id, c.id(0));
  EXPECT_EQ(c.service.next_assignment("b")->sample_id, c.id(1));
  EXPECT_EQ(c.service.next_assignment("c")->sample_id, c.id(2));
  // All at load 1; ties by id.
  EXPECT_EQ(c.service.next_assignment("d")->sample_id, c.id(0));
  // Asking again returns the same open assignment.
  EXPECT_EQ(c.service.next_assignment("a")->sample_id, c.id(0));
  EXPECT_EQ(c.service.status(c.id(0)).open_assignments, 2);
}

TEST(RatingService, RaterNeverSeesASampleTwice) {
  Campaign c(4);
  std::set<std::string> seen;
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(seen.insert(c.rate_next("a")).second);
  EXPECT_FALSE(c.service.next_assignment("a").has_value());
}

TEST(RatingService, CompletionAndTarget) {
  Campaign c(1);
  for (int i = 0; i < 9; ++i) c.rate_next("r" + std::to_string(i));
  EXPECT_EQ(c.service.status(c.id(0)).ratings, 9);
  EXPECT_FALSE(c.service.status(c.id(0)).complete);
  for (int i = 9; i < 11; ++i) c.rate_next("r" + std::to_string(i));
  EXPECT_EQ(c.service.status(c.id(0)).ratings, 11);
  EXPECT_TRUE(c.service.status(c.id(0)).complete);
  c.rate_next("r11");
  c.service.register_rater("late");
  EXPECT_FALSE(c.service.next_assignment("late").has_value());
}

TEST(RatingService, OpenAssignmentsCountTowardTarget) {
  RatingConfig cfg;
  cfg.target = 2;
  Campaign c(1, cfg);
  for (const char* r : {"a", "b", "c"}) c.service.register_rater(r);
  EXPECT_TRUE(c.service.next_assignment("a"));
  EXPECT_TRUE(c.service.next_assignment("b"));
  EXPECT_FALSE(c.service.next_assignment("c"));
}

TEST(RatingService, ProtocolViolationKeepsAssignmentOpen) {
  Campaign c(1);
  c.service.register_rater("a");
  const auto a = c.service.next_assignment("a");
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("a", a->sample_id, 3, 2)); }),
            Kind::ProtocolViolation);
  EXPECT_EQ(c.service.status(a->sample_id).ratings, 0);
  EXPECT_EQ(c.service.status(a->sample_id).open_assignments, 1);
  const RatingRecord stored = c.service.submit_rating(rating("a", a->sample_id, 2, 2));
  EXPECT_EQ(stored.timestamp, c.now);
  EXPECT_EQ(c.service.status(a->sample_id).ratings, 1);
}

TEST(RatingService, DuplicatesAndMissingAssignments) {
  Campaign c(2);
  const std::string first = c.rate_next("a");
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("a", first)); }),
            Kind::DuplicateSubmission);
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("a", c.id(1))); }),
            Kind::NoOpenAssignment);
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("ghost", c.id(1))); }),
            Kind::UnknownRater);
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("a", "nope")); }),
            Kind::UnknownSample);
  EXPECT_EQ(error_kind([&] { c.service.status("nope"); }), Kind::UnknownSample);
  RatingRecord empty;
  empty.rater_id = "a";
  empty.sample_id = c.id(1);
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(empty); }), Kind::InvalidRecord);
}

TEST(RatingService, FlagThenRateIsDuplicate) {
  Campaign c(1);
  c.service.register_rater("a");
  const auto a = c.service.next_assignment("a");
  const RatingRecord flag =
      c.service.flag_exclusion("a", a->sample_id, ExclusionReason::InfeasiblePrompt);
  EXPECT_TRUE(flag.excluded);
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("a", a->sample_id)); }),
            Kind::DuplicateSubmission);
  EXPECT_EQ(c.service.status(a->sample_id).exclusions, 1);
  EXPECT_EQ(c.service.status(a->sample_id).ratings, 0);
}

TEST(RatingService, PartialRecordsAreAccepted) {
  Campaign c(1);
  c.service.register_rater("a");
  const auto a = c.service.next_assignment("a");
  RatingRecord r;
  r.rater_id = "a";
  r.sample_id = a->sample_id;
  r.harmony = 4;
  EXPECT_NO_THROW(c.service.submit_rating(r));
}

TEST(RatingService, WithdrawnAfterThreeFlags) {
  Campaign c(1);
  for (int i = 0; i < 3; ++i) {
    const std::string r = "f" + std::to_string(i);
    c.service.register_rater(r);
    const auto a = c.service.next_assignment(r);
    ASSERT_TRUE(a);
    EXPECT_FALSE(c.service.status(c.id(0)).withdrawn);
    c.service.flag_exclusion(r, a->sample_id, ExclusionReason::NoEffectiveEdit);
  }
  EXPECT_TRUE(c.service.status(c.id(0)).withdrawn);
  c.service.register_rater("next");
  EXPECT_FALSE(c.service.next_assignment("next").has_value());
}

TEST(RatingService, WithdrawalCancelsOtherOpenAssignments) {
  Campaign c(1);
  c.service.register_rater("holder");
  ASSERT_TRUE(c.service.next_assignment("holder"));
  for (int i = 0; i < 3; ++i) {
    const std::string r = "f" + std::to_string(i);
    c.service.register_rater(r);
    ASSERT_TRUE(c.service.next_assignment(r));
    c.service.flag_exclusion(r, c.id(0), ExclusionReason::EthicsViolation);
  }
  EXPECT_FALSE(c.service.next_assignment("holder").has_value());
}

TEST(RatingService, AssignmentsExpire) {
  RatingConfig cfg;
  Campaign c(1, cfg);
  c.service.register_rater("slow");
  const auto a = c.service.next_assignment("slow");
  EXPECT_EQ(a->expires_at - a->issued_at, cfg.assignment_ttl_s);
  c.now = a->expires_at;
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating("slow", a->sample_id)); }),
            Kind::NoOpenAssignment);
  EXPECT_EQ(c.service.status(a->sample_id).open_assignments, 0);
  // The sample is offered again, also to the same rater.
  const auto again = c.service.next_assignment("slow");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->issued_at, c.now);
}

TEST(RatingService, ExportIsOrderedAndDeterministic) {
  auto run = [] {
    Campaign c(3);
    for (int i = 0; i < 5; ++i) c.rate_next("r" + std::to_string(4 - i));
    return c.service.export_ratings();
  };
  const auto a = run();
  EXPECT_EQ(a.size(), 5u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) {
    return std::tie(x.sample_id, x.timestamp, x.rater_id) <
           std::tie(y.sample_id, y.timestamp, y.rater_id);
  }));
  EXPECT_EQ(export_jsonl(a), export_jsonl(run()));
  Campaign empty(2);
  EXPECT_EQ(export_jsonl(empty.service.export_ratings()), "");
}

TEST(RatingService, ConcurrentRatersNeverOvershoot) {
  Campaign c(8);
  constexpr int kRaters = 64;
  std::atomic<int> submitted{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < kRaters; ++t) {
    threads.emplace_back([&, t] {
      const std::string r = "r" + std::to_string(t);
      c.service.register_rater(r);
      while (auto a = c.service.next_assignment(r)) {
        c.service.submit_rating(rating(r, a->sample_id));
        ++submitted;
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto records = c.service.export_ratings();
  EXPECT_EQ(submitted.load(), 8 * 12);
  EXPECT_EQ(records.size(), 8u * 12u);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : records) EXPECT_TRUE(pairs.emplace(r.rater_id, r.sample_id).second);
  for (int i = 0; i < 8; ++i) {
    const SampleStatus s = c.service.status(c.id(i));
    EXPECT_EQ(s.ratings, 12);
    EXPECT_EQ(s.open_assignments, 0);
  }
}

TEST(RatingStorage, SqliteSurvivesRestart) {
  oracle::TempDir dir("sqlite");
  const auto db = dir.path() / "campaign.db";
  std::string pending;
  std::string exported;
  {
    Campaign c(3, {}, std::make_shared<SqliteStore>(db));
    c.rate_next("a");
    c.rate_next("b");
    c.service.register_rater("c");
    const auto open = c.service.next_assignment("c");
    pending = open->sample_id;
    c.service.register_rater("d");
    const auto d = c.service.next_assignment("d");
    c.service.flag_exclusion("d", d->sample_id, ExclusionReason::UngrammaticalPrompt);
    exported = export_jsonl(c.service.export_ratings());
  }
  Campaign c(3, {}, std::make_shared<SqliteStore>(db));
  EXPECT_EQ(export_jsonl(c.service.export_ratings()), exported);
  EXPECT_EQ(c.service.next_assignment("c")->sample_id, pending);
  EXPECT_EQ(error_kind([&] { c.service.next_assignment("nobody"); }), Kind::UnknownRater);
  const auto a = c.service.export_ratings().front();
  EXPECT_EQ(error_kind([&] { c.service.submit_rating(rating(a.rater_id, a.sample_id)); }),
            Kind::DuplicateSubmission);
}

class RatingHttp : public ::testing::Test {
 protected:
  void SetUp() override {
    pipeline::SynthOptions opt;
    opt.n_samples = 3;
    corpus_ = pipeline::synth_corpus(opt, dir_.path());
    pipeline::write_synth_corpus(corpus_, opt, dir_.path());
    service_ = std::make_unique<RatingService>(corpus_.samples, RatingConfig{},
                                               std::make_shared<MemoryStore>(),
                                               [this] { return ++now_; });
    server_ = std::make_unique<RatingServer>(*service_, dir_.path());
    port_ = server_->bind_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->serve(); });
    server_->wait_until_ready();
  }
  void TearDown() override {
    server_->stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  oracle::TempDir dir_{"http"};
  pipeline::SynthCorpus corpus_;
  std::int64_t now_ = 0;
  std::unique_ptr<RatingService> service_;
  std::unique_ptr<RatingServer> server_;
  int port_ = -1;
  std::thread thread_;
};

TEST_F(RatingHttp, StatusCodes) {
  httplib::Client cli(url());
  const std::string sid = corpus_.samples[0].sample_id;
  EXPECT_EQ(cli.Post("/raters", R"({"rater_id":"a"})", "application/json")->status, 201);
  EXPECT_EQ(cli.Post("/raters", R"({"nope":1})", "application/json")->status, 400);
  EXPECT_EQ(cli.Post("/raters", "not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Get("/assignments/next")->status, 400);
  EXPECT_EQ(cli.Get("/assignments/next?rater_id=ghost")->status, 404);
  auto next = cli.Get("/assignments/next?rater_id=a");
  ASSERT_EQ(next->status, 200);
  EXPECT_EQ(json::parse(next->body).at("sample_id"), sid);

  json bad = rating("a", sid, 4, 1);
  auto res = cli.Post("/ratings", bad.dump(), "application/json");
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(json::parse(res->body).at("error"), "ProtocolViolation");
  EXPECT_EQ(cli.Post("/ratings", json(rating("a", corpus_.samples[1].sample_id)).dump(),
                     "application/json")
                ->status,
            409);
  EXPECT_EQ(cli.Post("/ratings", json(rating("a", sid)).dump(), "application/json")->status, 201);
  EXPECT_EQ(cli.Post("/ratings", json(rating("a", sid)).dump(), "application/json")->status, 409);
  EXPECT_EQ(cli.Post("/exclusions", R"({"rater_id":"a","sample_id":"x","reason":"EthicsViolation"})",
                     "application/json")
                ->status,
            404);
  EXPECT_EQ(cli.Post("/exclusions", json{{"rater_id", "a"}, {"sample_id", sid}, {"reason", "Meh"}}
                                        .dump(),
                     "application/json")
                ->status,
            400);
  EXPECT_EQ(cli.Get("/samples/nope")->status, 404);
  EXPECT_EQ(cli.Get("/samples/" + sid)->status, 200);
  EXPECT_EQ(cli.Get("/samples/" + sid + "/images/source")->status, 200);
}

TEST_F(RatingHttp, NoContentWhenExhausted) {
  HttpRatingClient client(url());
  client.register_rater("a");
  for (std::size_t i = 0; i < corpus_.samples.size(); ++i) {
    const auto a = client.next_assignment("a");
    ASSERT_TRUE(a);
    client.submit_rating(rating("a", a->sample_id));
  }
  EXPECT_FALSE(client.next_assignment("a").has_value());
  httplib::Client cli(url());
  EXPECT_EQ(cli.Get("/assignments/next?rater_id=a")->status, 204);
}

TEST_F(RatingHttp, ClientMirrorsService) {
  HttpRatingClient client(url());
  client.register_rater("a");
  client.register_rater("b");
  const auto a = client.next_assignment("a");
  ASSERT_TRUE(a);
  EXPECT_EQ(error_kind([&] { client.submit_rating(rating("a", a->sample_id, 5, 2)); }),
            Kind::ProtocolViolation);
  const RatingRecord stored = client.submit_rating(rating("a", a->sample_id, 5, 3));
  EXPECT_GT(stored.timestamp, 0);
  const auto b = client.next_assignment("b");
  const RatingRecord flag = client.flag_exclusion("b", b->sample_id, ExclusionReason::NoEffectiveEdit);
  EXPECT_TRUE(flag.excluded);
  EXPECT_EQ(client.status(b->sample_id).exclusions, 1);
  EXPECT_EQ(error_kind([&] { client.status("nope"); }), Kind::UnknownSample);
  EXPECT_EQ(client.export_ratings_jsonl(), export_jsonl(service_->export_ratings()));
  const std::string lines = client.export_ratings_jsonl();
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

TEST_F(RatingHttp, ServesImages) {
  HttpRatingClient client(url());
  const EditSample& s = corpus_.samples[0];
  EXPECT_EQ(client.image(s.sample_id, "source"), read_file(dir_.path() / s.source.uri));
  const std::string edited = client.image(s.sample_id, "edited");
  EXPECT_EQ(edited, read_file(dir_.path() / s.edited_uri));
  const auto boxed_path = dir_.path() / "boxed.png";
  write_file(boxed_path, client.image(s.sample_id, "boxed"));
  Image expect = read_png(dir_.path() / s.edited_uri);
  expect.draw_outline(s.bbox, Rgb{255, 0, 0});
  EXPECT_EQ(read_png(boxed_path), expect);
  EXPECT_EQ(error_kind([&] { client.image("nope", "source"); }), Kind::UnknownSample);
}

TEST(RatingReplay, CampaignReachesAcceptance) {
  pipeline::SynthOptions opt;
  opt.n_samples = 40;
  opt.n_raters = 14;
  const auto corpus = pipeline::synth_corpus(opt, "corpus");
  std::int64_t now = 0;
  RatingService service(corpus.samples, {}, std::make_shared<MemoryStore>(), [&] { return now; });
  LocalRatingApi api(service);
  const ReplayReport rep = replay_campaign(api, corpus.ratings, [&] { now += 7; });
  EXPECT_EQ(rep.actions, rep.submitted + rep.flagged);
  EXPECT_GT(rep.corrected, 0);
  for (const EditSample& s : corpus.samples) {
    const SampleStatus st = service.status(s.sample_id);
    EXPECT_TRUE(st.withdrawn || st.ratings >= 10) << s.sample_id;
    EXPECT_LE(st.ratings, 12);
    EXPECT_EQ(st.open_assignments, 0);
  }
  for (const RatingRecord& r : service.export_ratings()) EXPECT_FALSE(violates_protocol(r));
}

TEST(RatingReplay, UnscriptedAssignmentIsDataError) {
  const auto items = samples(2);
  RatingService service(items, {}, std::make_shared<MemoryStore>());
  LocalRatingApi api(service);
  EXPECT_THROW(replay_campaign(api, {rating("a", items[1].sample_id)}), DataError);
}

}  // namespace
}  // namespace paiqa::rating
