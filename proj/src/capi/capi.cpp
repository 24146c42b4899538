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


#include "paiqa/paiqa.h"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <memory>
#include <string>

#include "core/json_io.hpp"
#include "eval/metrics.hpp"
#include "gateway/gateway.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"
#include "rating/http.hpp"
#include "rating/service.hpp"
#include "rating/storage.hpp"

struct paiqa_context {
  std::unique_ptr<paiqa::pipeline::Session> session;
  std::string last_error;
};

struct paiqa_rating_server {
  std::shared_ptr<paiqa::rating::Storage> store;
  std::unique_ptr<paiqa::rating::RatingService> service;
  std::unique_ptr<paiqa::rating::RatingServer> server;
  int port = -1;
};

namespace {

namespace fs = std::filesystem;
namespace pl = paiqa::pipeline;

thread_local std::string g_thread_error;

void ensure_logger() {
  static const bool done = [] {
    auto logger = std::make_shared<spdlog::logger>(
        "paiqa", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::warn);
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)done;
}

paiqa_status classify() {
  try {
    throw;
  } catch (const paiqa::ValidationError& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_VALIDATION;
  } catch (const paiqa::rating::RatingError& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_VALIDATION;
  } catch (const paiqa::gateway::GatewayError& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_EXTERNAL;
  } catch (const paiqa::DataError& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_DATA;
  } catch (const nlohmann::json::exception& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_DATA;
  } catch (const fs::filesystem_error& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_DATA;
  } catch (const std::exception& e) {
    g_thread_error = e.what();
    return PAIQA_ERR_INTERNAL;
  } catch (...) {
    g_thread_error = "unknown error";
    return PAIQA_ERR_INTERNAL;
  }
}

// Runs fn, translating exceptions into a status and recording the message.
template <typename Fn>
paiqa_status guarded(paiqa_context* ctx, Fn&& fn) {
  ensure_logger();
  paiqa_status st = PAIQA_OK;
  g_thread_error.clear();
  try {
    fn();
  } catch (...) {
    st = classify();
  }
  if (ctx) ctx->last_error = g_thread_error;
  return st;
}

fs::path path_or_empty(const char* s) { return s ? fs::path(s) : fs::path(); }
std::string str_or(const char* s, const char* fallback = "") { return s ? s : fallback; }

void need(const void* p, const char* what) {
  if (!p) throw paiqa::ValidationError(std::string(what) + " must not be NULL");
}

pl::Session& session(paiqa_context* ctx) {
  need(ctx, "context");
  return *ctx->session;
}

}  // namespace

extern "C" {

const char* paiqa_version(void) { return pl::kVersion.data(); }

const char* paiqa_thread_last_error(void) { return g_thread_error.c_str(); }

void paiqa_set_verbosity(int level) {
  ensure_logger();
  spdlog::set_level(level <= 0 ? spdlog::level::warn
                    : level == 1 ? spdlog::level::info
                                 : spdlog::level::debug);
}

paiqa_status paiqa_context_create(const char* config_path, paiqa_context** out) {
  return guarded(nullptr, [&] {
    need(out, "out");
    *out = nullptr;
    auto ctx = std::make_unique<paiqa_context>();
    pl::PipelineConfig cfg = config_path ? pl::load_config(config_path) : pl::PipelineConfig{};
    ctx->session = std::make_unique<pl::Session>(std::move(cfg));
    *out = ctx.release();
  });
}

void paiqa_context_destroy(paiqa_context* ctx) { delete ctx; }

const char* paiqa_context_last_error(const paiqa_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "";
}

paiqa_status paiqa_context_set_transcript(paiqa_context* ctx, const char* path) {
  return guarded(ctx, [&] {
    session(ctx).set_transcript(path ? std::optional<fs::path>(path) : std::nullopt);
  });
}

paiqa_status paiqa_synth_corpus(paiqa_context* ctx, const paiqa_synth_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::synth_corpus_cmd({a->n_samples, a->n_raters, a->seed, path_or_empty(a->outdir)});
  });
}

paiqa_status paiqa_curate(paiqa_context* ctx, const paiqa_curate_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::curate_cmd(session(ctx), {path_or_empty(a->images), path_or_empty(a->detections),
                                  path_or_empty(a->edited), path_or_empty(a->out),
                                  path_or_empty(a->workdir)});
  });
}

paiqa_status paiqa_replay_campaign(paiqa_context* ctx, const paiqa_replay_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::replay_cmd(session(ctx), {path_or_empty(a->samples), path_or_empty(a->script),
                                  path_or_empty(a->out), path_or_empty(a->db), str_or(a->url)});
  });
}

paiqa_status paiqa_clean_ratings(paiqa_context* ctx, const paiqa_clean_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::clean_ratings_cmd(
        {path_or_empty(a->ratings), path_or_empty(a->out), path_or_empty(a->report)});
  });
}

paiqa_status paiqa_plot_stats(paiqa_context* ctx, const paiqa_plot_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::plot_stats_cmd(
        {path_or_empty(a->consensus), path_or_empty(a->samples), path_or_empty(a->outdir)});
  });
}

paiqa_status paiqa_build_subsets(paiqa_context* ctx, const paiqa_subset_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::SubsetArgs args;
    args.consensus = path_or_empty(a->consensus);
    args.samples = path_or_empty(a->samples);
    if (a->has_seed) args.seed = a->seed;
    if (a->has_test_ratio) args.test_ratio = a->test_ratio;
    args.out = path_or_empty(a->out);
    pl::build_subsets_cmd(session(ctx), args);
  });
}

paiqa_status paiqa_build_instructions(paiqa_context* ctx, const paiqa_instruction_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::InstructionArgs args;
    args.stage = a->stage;
    args.splits = path_or_empty(a->splits);
    args.consensus = path_or_empty(a->consensus);
    args.samples = path_or_empty(a->samples);
    if (a->has_seed) args.seed = a->seed;
    args.split = str_or(a->split, "train");
    args.out = path_or_empty(a->out);
    args.gold_out = path_or_empty(a->gold_out);
    pl::build_instructions_cmd(session(ctx), args);
  });
}

paiqa_status paiqa_evaluate_scoring(paiqa_context* ctx, const paiqa_scoring_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::ScoringArgs args;
    args.task = str_or(a->task);
    args.splits = path_or_empty(a->splits);
    args.samples = path_or_empty(a->samples);
    args.endpoint = str_or(a->endpoint);
    if (a->has_seed) args.seed = a->seed;
    args.regressor = str_or(a->regressor, "ols");
    args.out = path_or_empty(a->out);
    pl::evaluate_scoring_cmd(session(ctx), args);
  });
}

paiqa_status paiqa_evaluate_explanations(paiqa_context* ctx, const paiqa_judge_args* a) {
  return guarded(ctx, [&] {
    need(a, "args");
    pl::JudgeArgs args;
    args.gold = path_or_empty(a->gold);
    args.responses = path_or_empty(a->responses);
    args.judge = str_or(a->judge);
    if (a->has_seed) args.seed = a->seed;
    args.out = path_or_empty(a->out);
    pl::evaluate_explanations_cmd(session(ctx), args);
  });
}

paiqa_status paiqa_rating_server_create(paiqa_context* ctx, const paiqa_server_args* a,
                                        paiqa_rating_server** out) {
  return guarded(ctx, [&] {
    need(a, "args");
    need(out, "out");
    need(a->samples, "samples");
    *out = nullptr;
    auto srv = std::make_unique<paiqa_rating_server>();
    if (a->db) {
      srv->store = std::make_shared<paiqa::rating::SqliteStore>(a->db);
    } else {
      srv->store = std::make_shared<paiqa::rating::MemoryStore>();
    }
    srv->service = std::make_unique<paiqa::rating::RatingService>(
        paiqa::load_manifest<paiqa::EditSample>(a->samples), session(ctx).config().rating,
        srv->store);
    srv->server = std::make_unique<paiqa::rating::RatingServer>(
        *srv->service, a->asset_root ? fs::path(a->asset_root) : fs::current_path());
    const std::string host = str_or(a->host, "127.0.0.1");
    srv->port = a->port == 0 ? srv->server->bind_any_port(host) : srv->server->bind(host, a->port);
    if (srv->port < 0) {
      throw paiqa::DataError("cannot bind " + host + ":" + std::to_string(a->port));
    }
    *out = srv.release();
  });
}

int paiqa_rating_server_port(const paiqa_rating_server* server) {
  return server ? server->port : -1;
}

paiqa_status paiqa_rating_server_serve(paiqa_rating_server* server) {
  return guarded(nullptr, [&] {
    need(server, "server");
    if (!server->server->serve()) throw paiqa::DataError("rating server stopped with an error");
  });
}

void paiqa_rating_server_stop(paiqa_rating_server* server) {
  if (server) server->server->stop();
}

void paiqa_rating_server_destroy(paiqa_rating_server* server) { delete server; }

paiqa_status paiqa_fuse(const double logits[5], double* out) {
  return guarded(nullptr, [&] {
    need(logits, "logits");
    need(out, "out");
    *out = paiqa::eval::fuse_level_logits({logits[0], logits[1], logits[2], logits[3], logits[4]});
  });
}

paiqa_status paiqa_srcc(const double* x, const double* y, size_t n, double* out) {
  return guarded(nullptr, [&] {
    need(x, "x");
    need(y, "y");
    need(out, "out");
    *out = paiqa::eval::srcc({x, x + n}, {y, y + n});
  });
}

paiqa_status paiqa_plcc(const double* x, const double* y, size_t n, double* out) {
  return guarded(nullptr, [&] {
    need(x, "x");
    need(y, "y");
    need(out, "out");
    *out = paiqa::eval::plcc({x, x + n}, {y, y + n});
  });
}

}  // extern "C"
