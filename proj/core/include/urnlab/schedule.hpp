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

// The subdivision times T_n = floor(exp(c n^kappa)) (c = 3, kappa = 1/3 by
// default), their step probabilities p_n = (T_{n+1} - T_n) / T_{n+1}, the
// auxiliary walk S_n = Y_1 + ... + Y_{n-1} with Y_i = R_i Delta_i,
// R_i ~ Bernoulli(p_i), and the Bernstein bound for Bernoulli sums.
//
// T_n is kept as an exact integer while exp(c n^kappa) < 2^63. Past that
// cutoff every quantity comes from log T_n = c n^kappa with the floor
// dropped.

#ifndef URNLAB_SCHEDULE_HPP_
#define URNLAB_SCHEDULE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "urnlab/displacement.hpp"
#include "urnlab/random.hpp"

namespace urnlab {

struct ScheduleParams {
  double c = 3.0;
  double kappa = 1.0 / 3.0;
};

// Largest n with exp(c n^kappa) < 2^63.
std::uint64_t representable_cutoff(const ScheduleParams& params = {});

// Exact floor(exp(c n^kappa)) from 50-digit arithmetic. Throws
// std::out_of_range for n == 0 or n beyond the cutoff.
std::uint64_t big_time(std::uint64_t n, const ScheduleParams& params = {});

// c n^kappa.
double log_big_time(std::uint64_t n, const ScheduleParams& params = {});

double step_prob(std::uint64_t n, const ScheduleParams& params = {});

// Precomputed schedule for 1 <= n <= n_max.
class Schedule {
 public:
  explicit Schedule(std::uint64_t n_max, ScheduleParams params = {});

  std::uint64_t n_max() const { return n_max_; }
  const ScheduleParams& params() const { return params_; }
  std::uint64_t cutoff() const { return cutoff_; }

  double log_time(std::uint64_t n) const { return log_t_[n - 1]; }
  // Empty beyond the representability cutoff.
  std::optional<std::uint64_t> time(std::uint64_t n) const;
  double p(std::uint64_t n) const { return p_[n - 1]; }
  // sum_{i < n} p_i.
  double sum_p_before(std::uint64_t n) const { return sum_before_[n - 1]; }

 private:
  std::uint64_t n_max_;
  ScheduleParams params_;
  std::uint64_t cutoff_;
  std::vector<double> log_t_;
  std::vector<std::uint64_t> t_;  // entries up to min(n_max + 1, cutoff)
  std::vector<double> p_;
  std::vector<double> sum_before_;
};

struct AuxWalk {
  int dim = 1;
  std::vector<double> increments;  // Y_1..Y_{n-1}, row-major
  std::vector<double> sum;         // S_n
  std::uint64_t jumps = 0;         // sum of R_i
};

// Requires n >= 2 and schedule.n_max() >= n - 1.
AuxWalk sample_aux_walk(const DisplacementModel& model, std::uint64_t n,
                        const Schedule& schedule, Rng& rng);
// S_n only, without storing increments.
std::vector<double> sample_aux_sum(const DisplacementModel& model,
                                   std::uint64_t n, const Schedule& schedule,
                                   Rng& rng);

// sqrt(2 v t) + t. Throws std::invalid_argument on negative input.
double bernstein_threshold(double v, double t);
// exp(-t).
double bernstein_bound(double t);

struct BernsteinTrial {
  double t = 0.0;
  double threshold = 0.0;
  double bound = 0.0;
  double frequency = 0.0;  // empirical P(|S - E S| >= threshold)
  double allowance = 0.0;  // bound * 1.05 + 4 sqrt(bound / trials)
  bool ok = false;
};

// Monte Carlo check of the Bernstein bound for independent Bernoulli(p_i),
// with v >= sum p_i. One pass of `trials` sums serves every t.
std::vector<BernsteinTrial> bernstein_monte_carlo(std::span<const double> p,
                                                  double v,
                                                  std::span<const double> ts,
                                                  std::uint64_t trials,
                                                  Rng& rng);

}  // namespace urnlab

#endif  // URNLAB_SCHEDULE_HPP_
