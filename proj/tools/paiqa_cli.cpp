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


// Command-line front end over the C API.

#include <pthread.h>
#include <signal.h>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "paiqa/paiqa.h"

namespace {

const char* opt_c(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Globals {
  std::string config;
  std::string transcript;
  int verbosity = 0;
};

int fail(paiqa_context* ctx, paiqa_status st) {
  const char* msg = ctx ? paiqa_context_last_error(ctx) : paiqa_thread_last_error();
  std::fprintf(stderr, "error: %s\n", msg && *msg ? msg : "unknown failure");
  return static_cast<int>(st);
}

int serve(paiqa_context* ctx, const paiqa_server_args& args) {
  // Signals are taken by a dedicated thread so stop runs outside a handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  paiqa_rating_server* server = nullptr;
  if (paiqa_status st = paiqa_rating_server_create(ctx, &args, &server); st != PAIQA_OK) {
    return fail(ctx, st);
  }
  std::printf("listening on %s:%d\n", args.host ? args.host : "127.0.0.1",
              paiqa_rating_server_port(server));
  std::fflush(stdout);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    paiqa_rating_server_stop(server);
  });
  const paiqa_status st = paiqa_rating_server_serve(server);
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  paiqa_rating_server_destroy(server);
  return st == PAIQA_OK ? 0 : fail(nullptr, st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-edit image quality assessment toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline configuration (JSON)");
  app.add_option("--transcript", g.transcript, "Write the gateway transcript here");
  app.add_flag("-v,--verbose", g.verbosity, "More logging (repeatable)");
  app.set_version_flag("--version", std::string(paiqa_version()));

  paiqa_synth_args synth{40, 10, 7, nullptr};
  std::string synth_out = ".";
  auto* c_synth = app.add_subcommand("synth-corpus", "Generate a seeded synthetic corpus");
  c_synth->add_option("--samples", synth.n_samples)->check(CLI::PositiveNumber);
  c_synth->add_option("--raters", synth.n_raters)->check(CLI::Range(10, 1000000));
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--outdir", synth_out);

  std::string images, detections, edited, cur_out, workdir;
  auto* c_curate = app.add_subcommand("curate", "Filter detections into edit samples");
  c_curate->add_option("--images", images)->required();
  c_curate->add_option("--detections", detections)->required();
  c_curate->add_option("--edited", edited)->required();
  c_curate->add_option("--out", cur_out)->required();
  c_curate->add_option("--workdir", workdir, "Boxed renderings (default: output directory)");

  std::string srv_samples, srv_db, srv_host = "127.0.0.1", srv_assets;
  int srv_port = 8080;
  auto* c_serve = app.add_subcommand("serve-ratings", "Run the rating campaign server");
  c_serve->add_option("--samples", srv_samples)->required();
  c_serve->add_option("--db", srv_db, "SQLite file (default: in memory)");
  c_serve->add_option("--host", srv_host);
  c_serve->add_option("--port", srv_port, "0 picks a free port");
  c_serve->add_option("--asset-root", srv_assets, "Base for relative image paths");

  std::string rp_samples, rp_script, rp_out, rp_db, rp_url;
  auto* c_replay = app.add_subcommand("replay-campaign", "Drive scripted raters through a campaign");
  c_replay->add_option("--samples", rp_samples)->required();
  c_replay->add_option("--script", rp_script, "Rating records to replay")->required();
  c_replay->add_option("--out", rp_out, "Exported ratings")->required();
  c_replay->add_option("--db", rp_db);
  c_replay->add_option("--url", rp_url, "Use a running server instead of an in-process one");

  std::string cl_ratings, cl_out, cl_report;
  auto* c_clean = app.add_subcommand("clean-ratings", "Clean ratings into consensus scores");
  c_clean->add_option("--ratings", cl_ratings)->required();
  c_clean->add_option("--out", cl_out)->required();
  c_clean->add_option("--report", cl_report)->required();

  std::string pl_consensus, pl_samples, pl_outdir;
  auto* c_plot = app.add_subcommand("plot-stats", "Export rating statistics for plotting");
  c_plot->add_option("--consensus", pl_consensus)->required();
  c_plot->add_option("--samples", pl_samples)->required();
  c_plot->add_option("--outdir", pl_outdir)->required();

  std::string bs_consensus, bs_samples, bs_out;
  std::optional<std::uint64_t> bs_seed;
  std::optional<double> bs_ratio;
  auto* c_subsets = app.add_subcommand("build-subsets", "Assign subsets and the train/test split");
  c_subsets->add_option("--consensus", bs_consensus)->required();
  c_subsets->add_option("--samples", bs_samples)->required();
  c_subsets->add_option("--seed", bs_seed);
  c_subsets->add_option("--test-ratio", bs_ratio)->check(CLI::Range(0.0, 1.0));
  c_subsets->add_option("--out", bs_out)->required();

  int bi_stage = 1;
  std::string bi_splits, bi_consensus, bi_samples, bi_split = "train", bi_out, bi_gold;
  std::optional<std::uint64_t> bi_seed;
  auto* c_instr = app.add_subcommand("build-instructions", "Build instruction records");
  c_instr->add_option("--stage", bi_stage)->required()->check(CLI::Range(1, 3));
  c_instr->add_option("--splits", bi_splits)->required();
  c_instr->add_option("--consensus", bi_consensus, "Cross-check the splits' consensus");
  c_instr->add_option("--samples", bi_samples)->required();
  c_instr->add_option("--seed", bi_seed);
  c_instr->add_option("--split", bi_split, "Stage 3: train or test")
      ->check(CLI::IsMember({"train", "test"}));
  c_instr->add_option("--out", bi_out)->required();
  c_instr->add_option("--gold-out", bi_gold, "Stage 3: also write judge gold records");

  std::string es_task, es_splits, es_samples, es_endpoint, es_regressor = "ols", es_out;
  std::optional<std::uint64_t> es_seed;
  auto* c_score = app.add_subcommand("evaluate-scoring", "Score a model and tabulate SRCC/PLCC");
  c_score->add_option("--task", es_task)
      ->required()
      ->check(CLI::IsMember({"harmony", "naturalness", "overall"}));
  c_score->add_option("--splits", es_splits)->required();
  c_score->add_option("--samples", es_samples)->required();
  c_score->add_option("--endpoint", es_endpoint);
  c_score->add_option("--seed", es_seed);
  c_score->add_option("--regressor", es_regressor)->check(CLI::IsMember({"ols", "mean"}));
  c_score->add_option("--out", es_out)->required();

  std::string ej_gold, ej_responses, ej_judge, ej_out;
  std::optional<std::uint64_t> ej_seed;
  auto* c_judge = app.add_subcommand("evaluate-explanations", "Judge explanations against gold");
  c_judge->add_option("--gold", ej_gold)->required();
  c_judge->add_option("--responses", ej_responses)->required();
  c_judge->add_option("--judge", ej_judge);
  c_judge->add_option("--seed", ej_seed);
  c_judge->add_option("--out", ej_out)->required();

  auto* c_check = app.add_subcommand("validate-config", "Validate --config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PAIQA_ERR_VALIDATION;
  }

  paiqa_set_verbosity(g.verbosity);
  paiqa_context* ctx = nullptr;
  if (paiqa_status st = paiqa_context_create(opt_c(g.config), &ctx); st != PAIQA_OK) {
    return fail(nullptr, st);
  }
  if (!g.transcript.empty()) paiqa_context_set_transcript(ctx, g.transcript.c_str());

  paiqa_status st = PAIQA_OK;
  if (c_synth->parsed()) {
    synth.outdir = synth_out.c_str();
    st = paiqa_synth_corpus(ctx, &synth);
  } else if (c_curate->parsed()) {
    const paiqa_curate_args a{images.c_str(), detections.c_str(), edited.c_str(), cur_out.c_str(),
                              opt_c(workdir)};
    st = paiqa_curate(ctx, &a);
  } else if (c_serve->parsed()) {
    const paiqa_server_args a{srv_samples.c_str(), opt_c(srv_db), srv_host.c_str(), srv_port,
                              opt_c(srv_assets)};
    const int rc = serve(ctx, a);
    paiqa_context_destroy(ctx);
    return rc;
  } else if (c_replay->parsed()) {
    const paiqa_replay_args a{rp_samples.c_str(), rp_script.c_str(), rp_out.c_str(), opt_c(rp_db),
                              opt_c(rp_url)};
    st = paiqa_replay_campaign(ctx, &a);
  } else if (c_clean->parsed()) {
    const paiqa_clean_args a{cl_ratings.c_str(), cl_out.c_str(), cl_report.c_str()};
    st = paiqa_clean_ratings(ctx, &a);
  } else if (c_plot->parsed()) {
    const paiqa_plot_args a{pl_consensus.c_str(), pl_samples.c_str(), pl_outdir.c_str()};
    st = paiqa_plot_stats(ctx, &a);
  } else if (c_subsets->parsed()) {
    const paiqa_subset_args a{bs_consensus.c_str(), bs_samples.c_str(), bs_seed.has_value(),
                              bs_seed.value_or(0),  bs_ratio.has_value(), bs_ratio.value_or(0.0),
                              bs_out.c_str()};
    st = paiqa_build_subsets(ctx, &a);
  } else if (c_instr->parsed()) {
    const paiqa_instruction_args a{bi_stage,           bi_splits.c_str(),   opt_c(bi_consensus),
                                   bi_samples.c_str(), bi_seed.has_value(), bi_seed.value_or(0),
                                   bi_split.c_str(),   bi_out.c_str(),      opt_c(bi_gold)};
    st = paiqa_build_instructions(ctx, &a);
  } else if (c_score->parsed()) {
    const paiqa_scoring_args a{es_task.c_str(),     es_splits.c_str(),   es_samples.c_str(),
                               opt_c(es_endpoint),  es_seed.has_value(), es_seed.value_or(0),
                               es_regressor.c_str(), es_out.c_str()};
    st = paiqa_evaluate_scoring(ctx, &a);
  } else if (c_judge->parsed()) {
    const paiqa_judge_args a{ej_gold.c_str(),   ej_responses.c_str(), opt_c(ej_judge),
                             ej_seed.has_value(), ej_seed.value_or(0),  ej_out.c_str()};
    st = paiqa_evaluate_explanations(ctx, &a);
  } else if (c_check->parsed()) {
    std::printf("configuration ok\n");
  }

  const int rc = st == PAIQA_OK ? 0 : fail(ctx, st);
  paiqa_context_destroy(ctx);
  return rc;
}
