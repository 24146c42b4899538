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


#ifndef PAIQA_EVAL_METRICS_HPP_
#define PAIQA_EVAL_METRICS_HPP_

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace paiqa::eval {

using LevelLogits = std::array<double, 5>;  // bad .. excellent

LevelLogits softmax(const LevelLogits& logits);
// Expected level under softmax(logits), in [1, 5].
double fuse_level_logits(const LevelLogits& logits);

// 1-based ranks; tied values share their average rank.
std::vector<double> fractional_ranks(const std::vector<double>& x);
// Throw ValidationError for n < 3, unequal lengths or a constant input.
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double srcc(const std::vector<double>& x, const std::vector<double>& y);
double plcc(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr int kMinMetricSamples = 3;

struct MetricRow {
  std::string task;  // editing task name, or "all"
  int n = 0;
  std::optional<double> srcc;
  std::optional<double> plcc;
};

// One row per editing task plus the pooled "all" row. Rows with fewer than
// three samples, or with a constant side, carry no values.
std::vector<MetricRow> evaluate_scoring(const std::map<std::string, double>& predictions,
                                        const std::map<std::string, double>& truth,
                                        const std::map<std::string, EditingTask>& task_of);

std::string metric_table_csv(const std::vector<MetricRow>& rows, std::string_view method);

// Maps (harmony, naturalness) predictions onto an overall score.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual void fit(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) = 0;
  virtual double predict(const std::array<double, 2>& x) const = 0;
  virtual std::string name() const = 0;
};

inline constexpr std::size_t kMinRegressorPairs = 10;

class MeanRegressor : public Regressor {
 public:
  void fit(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) override;
  double predict(const std::array<double, 2>& x) const override;
  std::string name() const override { return "mean"; }

 private:
  double mean_ = 3.0;
};

// Least squares on (1, h, n, h*n); falls back to the mean when the design
// is rank deficient. Predictions are clamped to [1, 5].
class OlsRegressor : public Regressor {
 public:
  void fit(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) override;
  double predict(const std::array<double, 2>& x) const override;
  std::string name() const override { return fallback_ ? "ols(mean-fallback)" : "ols"; }
  bool fell_back() const { return fallback_; }

 private:
  std::array<double, 4> beta_{};
  bool fallback_ = false;
  MeanRegressor mean_;
};

std::unique_ptr<Regressor> make_regressor(std::string_view name);

}  // namespace paiqa::eval

#endif  // PAIQA_EVAL_METRICS_HPP_
