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

// Flat `key = value` experiment configuration.
//
//   # comments and blank lines are ignored
//   model    = cauchy(scale=1);d=1
//   seed     = 7
//   n_values = 1000, 1000000
//
// Parsing is strict: unknown keys, duplicate keys and malformed values are
// errors carrying the line number.

#ifndef URNLAB_CONFIG_HPP_
#define URNLAB_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/coupling.hpp"
#include "urnlab/displacement.hpp"

namespace urnlab {

enum class Experiment {
  kGrow,
  kTheoremCheck,
  kCouplingCheck,
  kRecordIdentity,
  kTvIdentity,
  kScheduleTable,
  kAuxWalkCheck,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct ExperimentConfig {
  std::optional<Experiment> experiment;
  std::string model_spec;
  DisplacementModel model;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> n_values;
  std::optional<std::uint64_t> n_from;  // expands to n_values on finalize
  std::optional<std::uint64_t> n_to;
  std::uint64_t m = 0;  // tv-identity: larger snapshot
  std::uint64_t replicas = 1;
  double h = 0.05;
  double gamma = 0.0;  // 0 selects 3 beta + 1
  LawMode mode = LawMode::kExactCdf;
  std::string out;
  std::string checkpoint;
  std::string boxes_out;
  std::uint64_t samples = 10'000;
  std::uint64_t mc_samples = 100'000;
  std::uint64_t pairs = 0;
  unsigned workers = 1;
  double ks_level = 1e-3;
  std::optional<double> ks_threshold;
  double min_decreasing_fraction = 0.8;
  bool check_trend = false;
  double slope_min = -2.0;
  double slope_max = -0.7;
  bool allow_large_n = false;
  std::uint64_t max_balls = 10'000'000;
};

// Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);

// Applies one setting (CLI overrides use this with line 0). Later calls for
// the same key replace earlier values.
void apply_setting(ExperimentConfig& config, std::string_view key,
                   std::string_view value, int line = 0);

// Cross-field checks once every setting is in.
void finalize_config(ExperimentConfig& config);

}  // namespace urnlab

#endif  // URNLAB_CONFIG_HPP_
