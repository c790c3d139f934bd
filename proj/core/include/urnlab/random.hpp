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

// Seeded random streams.
//
// Every stochastic operation takes a `Rng&` it owns for the duration of the
// call. Independent streams are derived from a user seed with a
// counter-based scheme: the stream for (seed, replica, purpose) is an
// mt19937_64 seeded with a SplitMix64 hash of the three values, so adding
// replicas or new purposes never perturbs existing streams.

#ifndef URNLAB_RANDOM_HPP_
#define URNLAB_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace urnlab {

using Rng = std::mt19937_64;

// Purpose tags keep streams for different roles of the same replica apart.
enum class StreamTag : std::uint64_t {
  kGrow = 1,
  kUniformBall = 2,
  kRecord = 3,
  kAuxWalk = 4,
  kResample = 5,
  kCoupling = 6,
  kMonteCarlo = 7,
  kBernstein = 8,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replica,
                          StreamTag tag);

Rng derive_stream(std::uint64_t seed, std::uint64_t replica, StreamTag tag);

// Uniform on the open interval (0, 1) with 53 random bits.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform on {0, ..., n-1}; rejection sampling, no modulo bias. n >= 1.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

inline bool bernoulli(Rng& rng, double p) { return uniform_open01(rng) < p; }

}  // namespace urnlab

#endif  // URNLAB_RANDOM_HPP_
