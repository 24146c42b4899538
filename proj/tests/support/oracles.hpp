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

// Brute-force reference implementations shared by the unit and acceptance
// tests. Written from the definitions, without calling into the library.
#ifndef PAIQA_TESTS_SUPPORT_ORACLES_HPP_
#define PAIQA_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Order statistic interpolation at h = p(n-1), from a fresh sorted copy.
inline long double quantile(std::vector<int> v, long double p) {
  std::sort(v.begin(), v.end());
  const long double h = p * static_cast<long double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<long double>(lo)) * (v[hi] - v[lo]);
}

// keep[i] is whether v[i] lies within the Tukey fences. Fewer than four
// values are all kept.
inline std::vector<bool> tukey_keep(const std::vector<int>& v) {
  std::vector<bool> keep(v.size(), true);
  if (v.size() < 4) return keep;
  const long double q1 = quantile(v, 0.25L);
  const long double q3 = quantile(v, 0.75L);
  const long double lo = q1 - 1.5L * (q3 - q1);
  const long double hi = q3 + 1.5L * (q3 - q1);
  for (std::size_t i = 0; i < v.size(); ++i) keep[i] = v[i] >= lo && v[i] <= hi;
  return keep;
}

// Average rank by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<long double> ranks(const std::vector<double>& x) {
  std::vector<long double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double less = 0, equal = 0;
    for (double y : x) {
      if (y < x[i]) ++less;
      if (y == x[i]) ++equal;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

template <typename T>
long double pearson(const std::vector<T>& x, const std::vector<T>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline long double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// Mode over {0,1,2}; a tie resolves to the larger value.
inline int mode_high(const std::vector<int>& v) {
  std::vector<int> s = v;
  std::sort(s.begin(), s.end());
  int best = s.front(), best_count = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const int count = static_cast<int>(j - i);
    if (count >= best_count) {
      best = s[i];
      best_count = count;
    }
    i = j;
  }
  return best;
}

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("paiqa-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle

#endif  // PAIQA_TESTS_SUPPORT_ORACLES_HPP_
