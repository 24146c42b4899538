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

#ifndef PAIQA_CORE_HASH_HPP_
#define PAIQA_CORE_HASH_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

namespace paiqa {

std::string sha256_hex(std::string_view data);
std::string file_sha256_hex(const std::filesystem::path& path);

// Stable 64-bit seed derived from (seed, key, index). Used wherever a
// per-item generator must not depend on processing order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key, std::uint64_t index = 0);

// Unbiased draw in [0, n) by rejection; independent of the standard
// library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace paiqa

#endif  // PAIQA_CORE_HASH_HPP_
