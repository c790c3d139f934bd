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

#include "urnlab/schedule.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace urnlab {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Big big_exponent(std::uint64_t n, const ScheduleParams& params) {
  const Big kappa = params.kappa == 1.0 / 3.0 ? Big(1) / 3 : Big(params.kappa);
  return Big(params.c) * pow(Big(n), kappa);
}

// exp(c n^kappa) < 2^63
bool representable(std::uint64_t n, const ScheduleParams& params) {
  return big_exponent(n, params) < 63 * log(Big(2));
}

void validate(const ScheduleParams& params) {
  if (!(params.c > 0.0) || !(params.kappa > 0.0) || !(params.kappa < 1.0)) {
    throw std::invalid_argument("schedule needs c > 0 and 0 < kappa < 1");
  }
}

}  // namespace

std::uint64_t representable_cutoff(const ScheduleParams& params) {
  validate(params);
  const double ln_max = 63.0 * std::numbers::ln2;
  auto n = static_cast<std::uint64_t>(
      std::floor(std::pow(ln_max / params.c, 1.0 / params.kappa)));
  n = std::max<std::uint64_t>(n, 1);
  while (n > 1 && !representable(n, params)) --n;
  while (representable(n + 1, params)) ++n;
  return representable(n, params) ? n : 0;
}

std::uint64_t big_time(std::uint64_t n, const ScheduleParams& params) {
  validate(params);
  if (n == 0 || !representable(n, params)) {
    throw std::out_of_range("T_" + std::to_string(n) +
                            " is not representable; use log_big_time");
  }
  const Big t = floor(exp(big_exponent(n, params)));
  return t.convert_to<std::uint64_t>();
}

double log_big_time(std::uint64_t n, const ScheduleParams& params) {
  const double x = static_cast<double>(n);
  if (params.kappa == 1.0 / 3.0) return params.c * std::cbrt(x);
  return params.c * std::pow(x, params.kappa);
}

double step_prob(std::uint64_t n, const ScheduleParams& params) {
  if (n == 0) throw std::out_of_range("step_prob needs n >= 1");
  if (representable(n + 1, params)) {
    const std::uint64_t t0 = big_time(n, params);
    const std::uint64_t t1 = big_time(n + 1, params);
    return static_cast<double>(t1 - t0) / static_cast<double>(t1);
  }
  return -std::expm1(log_big_time(n, params) - log_big_time(n + 1, params));
}

Schedule::Schedule(std::uint64_t n_max, ScheduleParams params)
    : n_max_(n_max), params_(params), cutoff_(representable_cutoff(params)) {
  if (n_max == 0) throw std::invalid_argument("schedule needs n_max >= 1");
  const std::uint64_t exact_upto = std::min(n_max + 1, cutoff_);
  t_.reserve(exact_upto);
  for (std::uint64_t n = 1; n <= exact_upto; ++n) {
    t_.push_back(
        floor(exp(big_exponent(n, params_))).convert_to<std::uint64_t>());
  }
  log_t_.resize(n_max);
  p_.resize(n_max);
  sum_before_.resize(n_max);
  double sum = 0.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    log_t_[n - 1] = log_big_time(n, params_);
    if (n + 1 <= exact_upto) {
      p_[n - 1] =
          static_cast<double>(t_[n] - t_[n - 1]) / static_cast<double>(t_[n]);
    } else {
      p_[n - 1] =
          -std::expm1(log_big_time(n, params_) - log_big_time(n + 1, params_));
    }
    sum_before_[n - 1] = sum;
    sum += p_[n - 1];
  }
}

std::optional<std::uint64_t> Schedule::time(std::uint64_t n) const {
  if (n == 0 || n > t_.size()) return std::nullopt;
  return t_[n - 1];
}

AuxWalk sample_aux_walk(const DisplacementModel& model, std::uint64_t n,
                        const Schedule& schedule, Rng& rng) {
  if (n < 2) throw std::invalid_argument("aux walk needs n >= 2");
  if (schedule.n_max() < n - 1) {
    throw std::invalid_argument("schedule too short for aux walk");
  }
  const auto d = static_cast<std::size_t>(model.dim);
  AuxWalk walk;
  walk.dim = model.dim;
  walk.increments.assign((n - 1) * d, 0.0);
  walk.sum.assign(d, 0.0);
  for (std::uint64_t i = 1; i < n; ++i) {
    if (!bernoulli(rng, schedule.p(i))) continue;
    ++walk.jumps;
    std::span<double> y(walk.increments.data() + (i - 1) * d, d);
    sample_displacement_into(model, rng, y);
    for (std::size_t k = 0; k < d; ++k) walk.sum[k] += y[k];
  }
  return walk;
}

std::vector<double> sample_aux_sum(const DisplacementModel& model,
                                   std::uint64_t n, const Schedule& schedule,
                                   Rng& rng) {
  if (n < 2) throw std::invalid_argument("aux walk needs n >= 2");
  if (schedule.n_max() < n - 1) {
    throw std::invalid_argument("schedule too short for aux walk");
  }
  const auto d = static_cast<std::size_t>(model.dim);
  std::vector<double> sum(d, 0.0);
  std::vector<double> y(d);
  for (std::uint64_t i = 1; i < n; ++i) {
    if (!bernoulli(rng, schedule.p(i))) continue;
    sample_displacement_into(model, rng, y);
    for (std::size_t k = 0; k < d; ++k) sum[k] += y[k];
  }
  return sum;
}

double bernstein_threshold(double v, double t) {
  if (v < 0.0 || t < 0.0) {
    throw std::invalid_argument("Bernstein inputs must be nonnegative");
  }
  return std::sqrt(2.0 * v * t) + t;
}

double bernstein_bound(double t) {
  if (t < 0.0) throw std::invalid_argument("Bernstein t must be nonnegative");
  return std::exp(-t);
}

std::vector<BernsteinTrial> bernstein_monte_carlo(std::span<const double> p,
                                                  double v,
                                                  std::span<const double> ts,
                                                  std::uint64_t trials,
                                                  Rng& rng) {
  double mean = 0.0;
  for (double q : p) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::invalid_argument("Bernoulli parameter outside [0, 1]");
    }
    mean += q;
  }
  if (v < mean) throw std::invalid_argument("v must be at least sum p_i");
  if (trials == 0) throw std::invalid_argument("need at least one trial");

  std::vector<BernsteinTrial> out;
  for (double t : ts) {
    BernsteinTrial r;
    r.t = t;
    r.threshold = bernstein_threshold(v, t);
    r.bound = bernstein_bound(t);
    r.allowance =
        r.bound * 1.05 + 4.0 * std::sqrt(r.bound / static_cast<double>(trials));
    out.push_back(r);
  }
  std::vector<std::uint64_t> hits(out.size(), 0);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    double s = 0.0;
    for (double q : p) s += bernoulli(rng, q) ? 1.0 : 0.0;
    const double dev = std::abs(s - mean);
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (dev >= out[k].threshold) ++hits[k];
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].frequency =
        static_cast<double>(hits[k]) / static_cast<double>(trials);
    out[k].ok = out[k].frequency <= out[k].allowance;
  }
  return out;
}

}  // namespace urnlab
