// Copyright 2026 The cfpower Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace cfpower {

// Every random stream in the library is derived from a (seed, stream, index)
// triple; results do not depend on call order or thread scheduling.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// 64-bit seed derived from a parent seed; used to give each sample its own
// replayable seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  auto rng = make_rng(seed, stream, index);
  return rng();
}

// Named streams.
namespace stream {
inline constexpr std::uint64_t kPlacement = 1;
inline constexpr std::uint64_t kShadowing = 2;
inline constexpr std::uint64_t kMonteCarlo = 3;
inline constexpr std::uint64_t kSampleSeed = 4;
inline constexpr std::uint64_t kSplit = 5;
inline constexpr std::uint64_t kInit = 6;
inline constexpr std::uint64_t kShuffle = 7;
inline constexpr std::uint64_t kDropout = 8;
inline constexpr std::uint64_t kResample = 9;
inline constexpr std::uint64_t kSweep = 10;
}  // namespace stream

}  // namespace cfpower
