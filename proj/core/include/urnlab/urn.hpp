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

// Single-ball-addition random-walk urns.
//
// Ball 1 has colour Delta_1. Ball i >= 2 picks a parent U_i uniformly among
// balls 1..i-1 and takes colour X_{U_i} + Delta_i. Ball indices are 1-based
// throughout the public API, matching the parent values stored on disk.

#ifndef URNLAB_URN_HPP_
#define URNLAB_URN_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "urnlab/displacement.hpp"
#include "urnlab/random.hpp"

namespace urnlab {

// Default ball-count guard; roughly 160 MB of colours and parents at d = 1.
inline constexpr std::uint64_t kDefaultMaxBalls = 10'000'000;

class UrnState {
 public:
  UrnState() = default;
  UrnState(DisplacementModel model, std::uint64_t seed);

  const DisplacementModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }
  int dim() const { return model_.dim; }
  std::uint64_t size() const {
    return parents_.size() + (colors_.empty() ? 0 : 1);
  }
  bool empty() const { return colors_.empty(); }

  // Colour of ball i, 1 <= i <= size().
  std::span<const double> color(std::uint64_t i) const {
    return {colors_.data() + (i - 1) * static_cast<std::uint64_t>(dim()),
            static_cast<std::size_t>(dim())};
  }
  // U_i for 2 <= i <= size().
  std::uint64_t parent(std::uint64_t i) const { return parents_[i - 2]; }

  // Flat row-major colours X_1..X_n and parents U_2..U_n.
  std::span<const double> colors() const { return colors_; }
  std::span<const std::uint64_t> parents() const { return parents_; }
  // Colours of balls 1..count as a flat span.
  std::span<const double> color_prefix(std::uint64_t count) const {
    return {colors_.data(), static_cast<std::size_t>(count * dim())};
  }

  // Appends balls until size() == target_n. Throws std::invalid_argument if
  // target_n < size() or target_n == 0.
  void grow(std::uint64_t target_n, Rng& rng);

  // Builds a state from stored data, checking every invariant. Throws
  // std::invalid_argument on a violation.
  static UrnState from_parts(DisplacementModel model, std::uint64_t seed,
                             std::vector<std::uint64_t> parents,
                             std::vector<double> colors);

  friend bool operator==(const UrnState&, const UrnState&) = default;

 private:
  DisplacementModel model_;
  std::uint64_t seed_ = 0;
  std::vector<double> colors_;
  std::vector<std::uint64_t> parents_;
};

// Grows a fresh urn to n balls from the stream derived for (seed, replica).
// Throws std::invalid_argument if n exceeds max_balls.
UrnState grow_urn(const DisplacementModel& model, std::uint64_t seed,
                  std::uint64_t n, std::uint64_t replica = 0,
                  std::uint64_t max_balls = kDefaultMaxBalls);

// k independent draws of X_I, I uniform on {1..n}; flat k*d output.
std::vector<double> uniform_ball_samples(const UrnState& state, std::int64_t k,
                                         Rng& rng);

struct RecordSample {
  std::vector<double> value;
  std::uint64_t count = 0;
};

// Sum of B_i Delta_i over i <= n with B_i ~ Bernoulli(1/i).
RecordSample record_rep_sample(const DisplacementModel& model, std::uint64_t n,
                               Rng& rng);

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind {
    kIo,
    kVersionMismatch,
    kMalformed,
    kTruncated,
    kInvariantViolation
  };
  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const UrnState& state, const std::filesystem::path& path);
UrnState load_checkpoint(const std::filesystem::path& path);

}  // namespace urnlab

#endif  // URNLAB_URN_HPP_
