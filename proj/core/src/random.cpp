// Copyright 2026 The urnlab Authors
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

#include "urnlab/random.hpp"

#include <limits>

namespace urnlab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replica,
                          StreamTag tag) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replica);
  return mix64(h ^ static_cast<std::uint64_t>(tag));
}

Rng derive_stream(std::uint64_t seed, std::uint64_t replica, StreamTag tag) {
  return Rng(derive_seed(seed, replica, tag));
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // Reject the incomplete top block of [0, 2^64).
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace urnlab
