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

#include "urnlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace urnlab {
namespace {

struct ExperimentName {
  Experiment experiment;
  std::string_view name;
};

constexpr ExperimentName kExperimentNames[] = {
    {Experiment::kGrow, "grow"},
    {Experiment::kTheoremCheck, "theorem-check"},
    {Experiment::kCouplingCheck, "coupling-check"},
    {Experiment::kRecordIdentity, "record-identity"},
    {Experiment::kTvIdentity, "tv-identity"},
    {Experiment::kScheduleTable, "schedule-table"},
    {Experiment::kAuxWalkCheck, "aux-walk-check"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t to_u64(std::string_view v, std::string_view key, int line) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size() && !v.empty()) {
    return out;
  }
  // Accept exact integers written as reals, e.g. 1e6.
  double d = 0.0;
  auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (e2 == std::errc() && p2 == v.data() + v.size() && !v.empty() &&
      d >= 0.0 && d < 1.8e19 && d == std::floor(d)) {
    return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(
      line, std::string(key),
      "expected a nonnegative integer, got '" + std::string(v) + "'");
}

std::uint64_t to_positive_u64(std::string_view v, std::string_view key,
                              int line) {
  const std::uint64_t out = to_u64(v, key, line);
  if (out == 0) throw ConfigError(line, std::string(key), "must be positive");
  return out;
}

double to_real(std::string_view v, std::string_view key, int line) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() ||
      !std::isfinite(out)) {
    throw ConfigError(line, std::string(key),
                      "expected a real number, got '" + std::string(v) + "'");
  }
  return out;
}

double to_positive_real(std::string_view v, std::string_view key, int line) {
  const double out = to_real(v, key, line);
  if (!(out > 0.0))
    throw ConfigError(line, std::string(key), "must be positive");
  return out;
}

bool to_bool(std::string_view v, std::string_view key, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(line, std::string(key),
                    "expected true or false, got '" + std::string(v) + "'");
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& en : kExperimentNames) {
    if (en.experiment == e) return en.name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& en : kExperimentNames) {
    if (en.name == name) return en.experiment;
  }
  return std::nullopt;
}

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
          (key.empty() ? std::string() : "key '" + key + "': ") + message),
      line_(line),
      key_(std::move(key)) {}

void apply_setting(ExperimentConfig& c, std::string_view key,
                   std::string_view value, int line) {
  key = trim(key);
  value = trim(value);
  const std::string k(key);
  if (value.empty()) throw ConfigError(line, k, "empty value");

  if (key == "experiment") {
    auto e = parse_experiment(value);
    if (!e) {
      throw ConfigError(line, k,
                        "unknown experiment '" + std::string(value) + "'");
    }
    c.experiment = *e;
  } else if (key == "model") {
    try {
      c.model = parse_model(value);
    } catch (const std::exception& e) {
      throw ConfigError(line, k, e.what());
    }
    c.model_spec = format_model(c.model);
  } else if (key == "seed") {
    c.seed = to_u64(value, key, line);
  } else if (key == "n" || key == "n_values") {
    c.n_values.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      c.n_values.push_back(to_positive_u64(item, key, line));
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
    }
  } else if (key == "n_from") {
    c.n_from = to_positive_u64(value, key, line);
  } else if (key == "n_to") {
    c.n_to = to_positive_u64(value, key, line);
  } else if (key == "m") {
    c.m = to_positive_u64(value, key, line);
  } else if (key == "replicas") {
    c.replicas = to_positive_u64(value, key, line);
  } else if (key == "h") {
    c.h = to_positive_real(value, key, line);
  } else if (key == "gamma") {
    c.gamma = to_positive_real(value, key, line);
  } else if (key == "mode") {
    try {
      c.mode = parse_law_mode(value);
    } catch (const std::exception& e) {
      throw ConfigError(line, k, e.what());
    }
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "checkpoint") {
    c.checkpoint = std::string(value);
  } else if (key == "boxes_out") {
    c.boxes_out = std::string(value);
  } else if (key == "samples") {
    c.samples = to_positive_u64(value, key, line);
  } else if (key == "mc_samples") {
    c.mc_samples = to_positive_u64(value, key, line);
  } else if (key == "pairs") {
    c.pairs = to_positive_u64(value, key, line);
  } else if (key == "workers") {
    const std::uint64_t w = to_positive_u64(value, key, line);
    if (w > 1024) throw ConfigError(line, k, "at most 1024 workers");
    c.workers = static_cast<unsigned>(w);
  } else if (key == "ks_level") {
    c.ks_level = to_positive_real(value, key, line);
    if (c.ks_level >= 1.0) throw ConfigError(line, k, "must be below 1");
  } else if (key == "ks_threshold") {
    c.ks_threshold = to_positive_real(value, key, line);
  } else if (key == "min_decreasing_fraction") {
    c.min_decreasing_fraction = to_positive_real(value, key, line);
    if (c.min_decreasing_fraction > 1.0) {
      throw ConfigError(line, k, "must be at most 1");
    }
  } else if (key == "check_trend") {
    c.check_trend = to_bool(value, key, line);
  } else if (key == "slope_min") {
    c.slope_min = to_real(value, key, line);
  } else if (key == "slope_max") {
    c.slope_max = to_real(value, key, line);
  } else if (key == "allow_large_n") {
    c.allow_large_n = to_bool(value, key, line);
  } else {
    throw ConfigError(line, k, "unknown key");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::string_view rest = text;
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest =
        nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "", "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    if (!seen.emplace(key).second) {
      throw ConfigError(line_no, std::string(key), "duplicate key");
    }
    apply_setting(c, key, line.substr(eq + 1), line_no);
  }
  if (seen.empty()) throw ConfigError(0, "", "configuration is empty");
  return c;
}

void finalize_config(ExperimentConfig& c) {
  if (!c.experiment) throw ConfigError(0, "experiment", "no experiment given");
  if (c.n_from || c.n_to) {
    if (!c.n_from || !c.n_to) {
      throw ConfigError(0, "n_from", "n_from and n_to must be given together");
    }
    if (*c.n_from > *c.n_to) {
      throw ConfigError(0, "n_from", "n_from exceeds n_to");
    }
    if (*c.n_to - *c.n_from > 1'000'000) {
      throw ConfigError(0, "n_to", "range too long");
    }
    c.n_values.clear();
    for (std::uint64_t n = *c.n_from; n <= *c.n_to; ++n)
      c.n_values.push_back(n);
    c.n_from.reset();
    c.n_to.reset();
  }
  if (c.model_spec.empty()) {
    if (*c.experiment != Experiment::kScheduleTable) {
      throw ConfigError(0, "model", "missing required key");
    }
    c.model = DisplacementModel::point_mass(0.0);
    c.model_spec = format_model(c.model);
  }
  if (c.n_values.empty()) throw ConfigError(0, "n", "missing required key");
  std::sort(c.n_values.begin(), c.n_values.end());
  c.n_values.erase(std::unique(c.n_values.begin(), c.n_values.end()),
                   c.n_values.end());
  if (c.slope_min > c.slope_max) {
    throw ConfigError(0, "slope_min", "exceeds slope_max");
  }
  c.max_balls = c.allow_large_n ? ~std::uint64_t{0} : kDefaultMaxBalls;
  const bool balls = *c.experiment == Experiment::kGrow ||
                     *c.experiment == Experiment::kTheoremCheck ||
                     *c.experiment == Experiment::kRecordIdentity ||
                     *c.experiment == Experiment::kTvIdentity;
  if (balls && std::max(c.n_values.back(), c.m) > c.max_balls) {
    throw ConfigError(0, "n",
                      "ball count above 10^7 needs allow_large_n = true");
  }
}

}  // namespace urnlab
