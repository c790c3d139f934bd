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

#include "urnlab/urn.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace urnlab {

UrnState::UrnState(DisplacementModel model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed) {
  model_.validate();
}

void UrnState::grow(std::uint64_t target_n, Rng& rng) {
  const std::uint64_t n = size();
  if (target_n == 0) throw std::invalid_argument("target ball count is 0");
  if (target_n < n) {
    throw std::invalid_argument("target ball count below current size");
  }
  const auto d = static_cast<std::size_t>(dim());
  colors_.resize(target_n * d);
  parents_.reserve(target_n - 1);
  std::uint64_t i = n;  // balls already present
  if (i == 0) {
    sample_displacement_into(model_, rng, std::span(colors_.data(), d));
    i = 1;
  }
  if (d == 1) {
    for (; i < target_n; ++i) {
      const std::uint64_t u = uniform_below(rng, i);  // 0-based parent
      parents_.push_back(u + 1);
      colors_[i] = colors_[u] + sample_scalar(model_, rng);
    }
    return;
  }
  for (; i < target_n; ++i) {
    const std::uint64_t u = uniform_below(rng, i);
    parents_.push_back(u + 1);
    for (std::size_t k = 0; k < d; ++k) {
      colors_[i * d + k] = colors_[u * d + k] + sample_scalar(model_, rng);
    }
  }
}

UrnState UrnState::from_parts(DisplacementModel model, std::uint64_t seed,
                              std::vector<std::uint64_t> parents,
                              std::vector<double> colors) {
  UrnState s(std::move(model), seed);
  const auto d = static_cast<std::uint64_t>(s.dim());
  if (colors.size() % d != 0) {
    throw std::invalid_argument("colour data is not a multiple of d");
  }
  const std::uint64_t n = colors.size() / d;
  if (n == 0 ? !parents.empty() : parents.size() != n - 1) {
    throw std::invalid_argument("parent count must equal ball count - 1");
  }
  for (std::uint64_t k = 0; k < parents.size(); ++k) {
    const std::uint64_t i = k + 2;
    if (parents[k] < 1 || parents[k] > i - 1) {
      throw std::invalid_argument("parent U_" + std::to_string(i) + " = " +
                                  std::to_string(parents[k]) + " outside 1.." +
                                  std::to_string(i - 1));
    }
  }
  s.parents_ = std::move(parents);
  s.colors_ = std::move(colors);
  return s;
}

UrnState grow_urn(const DisplacementModel& model, std::uint64_t seed,
                  std::uint64_t n, std::uint64_t replica,
                  std::uint64_t max_balls) {
  if (n > max_balls) {
    throw std::invalid_argument("ball count " + std::to_string(n) +
                                " exceeds the memory guard of " +
                                std::to_string(max_balls));
  }
  UrnState state(model, seed);
  Rng rng = derive_stream(seed, replica, StreamTag::kGrow);
  state.grow(n, rng);
  return state;
}

std::vector<double> uniform_ball_samples(const UrnState& state, std::int64_t k,
                                         Rng& rng) {
  if (k <= 0) throw std::invalid_argument("sample count must be positive");
  if (state.empty()) throw std::invalid_argument("urn is empty");
  const auto d = static_cast<std::size_t>(state.dim());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k) * d);
  for (std::int64_t j = 0; j < k; ++j) {
    const auto c = state.color(uniform_below(rng, state.size()) + 1);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

RecordSample record_rep_sample(const DisplacementModel& model, std::uint64_t n,
                               Rng& rng) {
  if (n == 0) throw std::invalid_argument("record representation needs n >= 1");
  RecordSample s;
  s.value.assign(static_cast<std::size_t>(model.dim), 0.0);
  std::vector<double> delta(s.value.size());
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (i > 1 && !bernoulli(rng, 1.0 / static_cast<double>(i))) continue;
    sample_displacement_into(model, rng, delta);
    for (std::size_t k = 0; k < delta.size(); ++k) s.value[k] += delta[k];
    ++s.count;
  }
  return s;
}

namespace {

std::string hex_double(double v) {
  char buf[64];
  char* p = buf;
  if (std::signbit(v)) *p++ = '-';
  *p++ = '0';
  *p++ = 'x';
  auto [end, ec] =
      std::to_chars(p, buf + sizeof(buf), std::abs(v), std::chars_format::hex);
  return std::string(buf, end);
}

using Kind = CheckpointError::Kind;

double parse_hex_double(std::string_view tok, std::uint64_t line_no) {
  const bool negative = !tok.empty() && tok.front() == '-';
  if (negative || (!tok.empty() && tok.front() == '+')) tok.remove_prefix(1);
  if (tok.size() < 3 || tok[0] != '0' || (tok[1] != 'x' && tok[1] != 'X')) {
    throw CheckpointError(
        Kind::kMalformed,
        "line " + std::to_string(line_no) + ": expected a hexadecimal float");
  }
  tok.remove_prefix(2);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v,
                                   std::chars_format::hex);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw CheckpointError(Kind::kMalformed, "line " + std::to_string(line_no) +
                                                ": bad hexadecimal float");
  }
  return negative ? -v : v;
}

std::uint64_t parse_u64(std::string_view tok, std::uint64_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw CheckpointError(Kind::kMalformed, "line " + std::to_string(line_no) +
                                                ": expected an integer");
  }
  return v;
}

std::string_view header_value(const std::vector<std::string>& lines,
                              std::size_t idx, std::string_view key) {
  if (idx >= lines.size()) {
    throw CheckpointError(Kind::kTruncated,
                          "missing header line '" + std::string(key) + "'");
  }
  std::string_view line = lines[idx];
  if (line.size() <= key.size() || line.substr(0, key.size()) != key ||
      line[key.size()] != '=') {
    throw CheckpointError(Kind::kMalformed, "line " + std::to_string(idx + 1) +
                                                ": expected '" +
                                                std::string(key) + "='");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

void save_checkpoint(const UrnState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CheckpointError(Kind::kIo,
                          "cannot open '" + path.string() + "' for writing");
  }
  out << "version=" << kCheckpointVersion << '\n'
      << "d=" << state.dim() << '\n'
      << "model=" << format_model(state.model()) << '\n'
      << "seed=" << state.seed() << '\n'
      << "n=" << state.size() << '\n';
  for (std::uint64_t p : state.parents()) out << p << '\n';
  const auto d = static_cast<std::size_t>(state.dim());
  const auto colors = state.colors();
  for (std::size_t i = 0; i < colors.size(); i += d) {
    for (std::size_t k = 0; k < d; ++k) {
      if (k) out << ' ';
      out << hex_double(colors[i + k]);
    }
    out << '\n';
  }
  if (!out) {
    throw CheckpointError(Kind::kIo, "write to '" + path.string() + "' failed");
  }
}

UrnState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError(Kind::kIo, "cannot open '" + path.string() + "'");
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (lines.empty()) {
    throw CheckpointError(Kind::kMalformed, "checkpoint file is empty");
  }

  const std::string_view version = header_value(lines, 0, "version");
  if (version != std::to_string(kCheckpointVersion)) {
    throw CheckpointError(Kind::kVersionMismatch,
                          "checkpoint version " + std::string(version) +
                              ", expected " +
                              std::to_string(kCheckpointVersion));
  }
  const std::uint64_t d = parse_u64(header_value(lines, 1, "d"), 2);
  DisplacementModel model;
  try {
    model = parse_model(header_value(lines, 2, "model"));
  } catch (const ModelSpecError& e) {
    throw CheckpointError(Kind::kMalformed, std::string("line 3: ") + e.what());
  }
  if (static_cast<std::uint64_t>(model.dim) != d) {
    throw CheckpointError(Kind::kMalformed,
                          "header d does not match the model dimension");
  }
  const std::uint64_t seed = parse_u64(header_value(lines, 3, "seed"), 4);
  const std::uint64_t n = parse_u64(header_value(lines, 4, "n"), 5);

  constexpr std::size_t kHeader = 5;
  const std::uint64_t n_parents = n == 0 ? 0 : n - 1;
  const std::uint64_t expected = kHeader + n_parents + n;
  if (lines.size() < expected) {
    throw CheckpointError(Kind::kTruncated,
                          "expected " + std::to_string(expected) +
                              " lines, found " + std::to_string(lines.size()));
  }
  if (lines.size() > expected) {
    throw CheckpointError(Kind::kMalformed, "trailing data after colours");
  }

  std::vector<std::uint64_t> parents;
  parents.reserve(n_parents);
  for (std::uint64_t k = 0; k < n_parents; ++k) {
    const std::uint64_t line_no = kHeader + k + 1;
    const std::uint64_t u = parse_u64(lines[kHeader + k], line_no);
    const std::uint64_t i = k + 2;
    if (u < 1 || u > i - 1) {
      throw CheckpointError(Kind::kInvariantViolation,
                            "line " + std::to_string(line_no) + ": U_" +
                                std::to_string(i) + " = " + std::to_string(u) +
                                " outside 1.." + std::to_string(i - 1));
    }
    parents.push_back(u);
  }

  std::vector<double> colors;
  colors.reserve(n * d);
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t idx = kHeader + n_parents + k;
    std::istringstream row(lines[idx]);
    std::uint64_t read = 0;
    for (std::string tok; row >> tok; ++read) {
      if (read < d) colors.push_back(parse_hex_double(tok, idx + 1));
    }
    if (read != d) {
      throw CheckpointError(Kind::kMalformed,
                            "line " + std::to_string(idx + 1) + ": expected " +
                                std::to_string(d) + " coordinates");
    }
  }
  return UrnState::from_parts(std::move(model), seed, std::move(parents),
                              std::move(colors));
}

}  // namespace urnlab
