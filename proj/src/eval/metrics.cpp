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


#include "eval/metrics.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace paiqa::eval {

LevelLogits softmax(const LevelLogits& logits) {
  for (double l : logits) {
    if (!std::isfinite(l)) throw ValidationError("non-finite level logit");
  }
  const double max = *std::max_element(logits.begin(), logits.end());
  LevelLogits p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    p[i] = std::exp(logits[i] - max);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double fuse_level_logits(const LevelLogits& logits) {
  const LevelLogits p = softmax(logits);
  double score = 0.0;
  for (std::size_t i = 0; i < 5; ++i) score += static_cast<double>(i + 1) * p[i];
  return std::clamp(score, 1.0, 5.0);
}

std::vector<double> fractional_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
  if (x.size() < static_cast<std::size_t>(kMinMetricSamples)) {
    throw ValidationError("correlation needs at least 3 samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw ValidationError("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double srcc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
  return pearson(fractional_ranks(x), fractional_ranks(y));
}

double plcc(const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); }

std::vector<MetricRow> evaluate_scoring(const std::map<std::string, double>& predictions,
                                        const std::map<std::string, double>& truth,
                                        const std::map<std::string, EditingTask>& task_of) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (EditingTask t : kAllEditingTasks) groups[std::string(to_string(t))];
  groups["all"];
  for (const auto& [id, pred] : predictions) {
    auto t = truth.find(id);
    if (t == truth.end()) throw DataError("prediction for " + id + " has no ground truth");
    auto task = task_of.find(id);
    if (task == task_of.end()) throw DataError("prediction for " + id + " has no editing task");
    for (const std::string& key : {std::string(to_string(task->second)), std::string("all")}) {
      groups[key].first.push_back(pred);
      groups[key].second.push_back(t->second);
    }
  }

  std::vector<MetricRow> rows;
  std::vector<std::string> keys;
  for (EditingTask t : kAllEditingTasks) keys.emplace_back(to_string(t));
  keys.emplace_back("all");
  for (const std::string& key : keys) {
    const auto& [pred, gt] = groups[key];
    MetricRow row{key, static_cast<int>(pred.size()), std::nullopt, std::nullopt};
    if (row.n >= kMinMetricSamples) {
      try {
        row.srcc = srcc(pred, gt);
        row.plcc = plcc(pred, gt);
      } catch (const ValidationError& e) {
        spdlog::warn("row {}: {}", key, e.what());
        row.srcc.reset();
        row.plcc.reset();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string metric_table_csv(const std::vector<MetricRow>& rows, std::string_view method) {
  std::string out = "task,n,srcc,plcc,method\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.6f}", *v) : std::string();
  };
  for (const MetricRow& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.task, r.n, cell(r.srcc), cell(r.plcc), method);
  }
  return out;
}

namespace {

void check_training(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("regressor inputs differ in length");
  if (x.size() < kMinRegressorPairs) {
    throw ValidationError("regressor needs at least 10 training pairs, got " +
                          std::to_string(x.size()));
  }
}

}  // namespace

void MeanRegressor::fit(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) {
  check_training(x, y);
  mean_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

double MeanRegressor::predict(const std::array<double, 2>&) const {
  return std::clamp(mean_, 1.0, 5.0);
}

void OlsRegressor::fit(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) {
  check_training(x, y);
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [h, nat] = x[static_cast<std::size_t>(i)];
    design.row(i) << 1.0, h, nat, h * nat;
    target(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  fallback_ = qr.rank() < 4;
  if (fallback_) {
    spdlog::warn("regressor design is rank deficient (rank {}); using the mean", qr.rank());
    mean_.fit(x, y);
    return;
  }
  const Eigen::VectorXd beta = qr.solve(target);
  for (int i = 0; i < 4; ++i) beta_[i] = beta(i);
}

double OlsRegressor::predict(const std::array<double, 2>& x) const {
  if (fallback_) return mean_.predict(x);
  const double v = beta_[0] + beta_[1] * x[0] + beta_[2] * x[1] + beta_[3] * x[0] * x[1];
  return std::clamp(v, 1.0, 5.0);
}

std::unique_ptr<Regressor> make_regressor(std::string_view name) {
  if (name == "ols") return std::make_unique<OlsRegressor>();
  if (name == "mean") return std::make_unique<MeanRegressor>();
  throw ValidationError("unknown regressor: " + std::string(name));
}

}  // namespace paiqa::eval
