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


#ifndef PAIQA_CORE_TEXT_HPP_
#define PAIQA_CORE_TEXT_HPP_

#include <string>
#include <string_view>

namespace paiqa {

// Strips whitespace and quote characters from both ends.
std::string trim(std::string_view s);
// Non-empty pieces between sentence terminators.
int sentence_count(std::string_view s);
// Drops trailing whitespace and sentence terminators.
std::string strip_terminal(std::string_view s);

}  // namespace paiqa

#endif  // PAIQA_CORE_TEXT_HPP_
