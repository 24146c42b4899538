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


#include "core/text.hpp"

#include <regex>

namespace paiqa {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"'");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"'");
  return std::string(s.substr(first, last - first + 1));
}

int sentence_count(std::string_view s) {
  static const std::regex kBoundary(R"([.!?]+(\s+|$))");
  int n = 0;
  std::string text(s);
  std::sregex_token_iterator it(text.begin(), text.end(), kBoundary, -1), end;
  for (; it != end; ++it) {
    if (!trim(it->str()).empty()) ++n;
  }
  return n;
}

std::string strip_terminal(std::string_view s) {
  std::string out = trim(s);
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' ||
                          out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

}  // namespace paiqa
