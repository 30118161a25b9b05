// Copyright 2026 The NSM Authors.
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

#ifndef NSM_RNG_HPP_
#define NSM_RNG_HPP_

#include <cstdint>

namespace nsm {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), built from the SplitMix64 finalizer. Draws can be
// taken in any order or in parallel without changing results, and the output
// does not depend on the platform's standard library.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^
                 (stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ ^ mix(counter + 0x632be59bd9b4e019ULL));
  }

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

// Stream ids used across the library, so that no two consumers of the same
// seed ever see correlated draws.
namespace streams {
inline constexpr std::uint64_t kSplitEdges = 1;
inline constexpr std::uint64_t kSplitRows = 2;
inline constexpr std::uint64_t kSplitCols = 3;
inline constexpr std::uint64_t kSplitInner = 4;
inline constexpr std::uint64_t kMcar = 5;
inline constexpr std::uint64_t kNoise = 6;
inline constexpr std::uint64_t kPsiRows = 7;
inline constexpr std::uint64_t kPsiCols = 8;
inline constexpr std::uint64_t kFolds = 9;
inline constexpr std::uint64_t kUniformityX = 10;
inline constexpr std::uint64_t kUniformityY = 11;
}  // namespace streams

}  // namespace nsm

#endif  // NSM_RNG_HPP_
