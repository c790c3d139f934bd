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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "urnlab/displacement.hpp"
#include "urnlab/measure.hpp"
#include "urnlab/random.hpp"

namespace urnlab {
namespace {

TEST(ScheduleTest, BigTimeExamples) {
  EXPECT_EQ(big_time(1), 20u);
  EXPECT_EQ(big_time(2), 43u);
  EXPECT_EQ(big_time(8), 403u);
  EXPECT_EQ(big_time(9), 512u);
  EXPECT_EQ(big_time(27), 8103u);
}

TEST(ScheduleTest, LogBigTimeExamples) {
  EXPECT_DOUBLE_EQ(log_big_time(1), 3.0);
  EXPECT_DOUBLE_EQ(log_big_time(8), 6.0);
  EXPECT_DOUBLE_EQ(log_big_time(1000), 30.0);
}

TEST(ScheduleTest, StepProbExamples) {
  EXPECT_DOUBLE_EQ(step_prob(8), 109.0 / 512.0);
  EXPECT_DOUBLE_EQ(step_prob(1), 23.0 / 43.0);
  const double n = 1e5;
  EXPECT_NEAR(step_prob(100000) * std::pow(n, 2.0 / 3.0), 1.0, 0.02);
}

TEST(ScheduleTest, TimesIncreaseAndAgreeWithLogs) {
  const std::uint64_t cutoff = representable_cutoff();
  EXPECT_EQ(cutoff, 3084u);
  std::uint64_t prev = 0;
  for (std::uint64_t n = 1; n <= cutoff; ++n) {
    const std::uint64_t t = big_time(n);
    ASSERT_GT(t, prev) << n;
    const double td = static_cast<double>(t);
    // The floor loses less than one unit; allow double rounding of log.
    ASSERT_LT(std::abs(std::log(td) - log_big_time(n)),
              2.0 / td + 4e-16 * log_big_time(n))
        << n;
    prev = t;
  }
  EXPECT_THROW(big_time(cutoff + 1), std::out_of_range);
  EXPECT_THROW(big_time(0), std::out_of_range);
}

TEST(ScheduleTest, StepProbabilitiesAcrossCutoff) {
  const Schedule s(100000);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    ASSERT_GT(s.p(n), 0.0);
    ASSERT_LT(s.p(n), 1.0);
  }
  for (std::uint64_t n = 1000; n <= 100000; n += 997) {
    const double scaled = s.p(n) * std::pow(static_cast<double>(n), 2.0 / 3.0);
    EXPECT_GE(scaled, 0.85) << n;
    EXPECT_LE(scaled, 1.15) << n;
  }
  const std::uint64_t c = s.cutoff();
  ASSERT_TRUE(s.time(c).has_value());
  EXPECT_FALSE(s.time(c + 1).has_value());
  EXPECT_NEAR(s.p(c), s.p(c - 1), 1e-3 * s.p(c));
  EXPECT_NEAR(s.p(c + 1), s.p(c), 1e-3 * s.p(c));
  EXPECT_DOUBLE_EQ(s.p(8), step_prob(8));
}

TEST(ScheduleTest, SumOfStepProbabilitiesTracksLogTime) {
  const Schedule s(100000);
  const double ratio = s.sum_p_before(100000) / s.log_time(100000);
  EXPECT_GE(ratio, 0.93);
  EXPECT_LE(ratio, 1.00);
  EXPECT_EQ(s.sum_p_before(1), 0.0);
  EXPECT_DOUBLE_EQ(s.sum_p_before(3), s.p(1) + s.p(2));
}

TEST(ScheduleTest, AuxWalkExamples) {
  const Schedule s(200);
  Rng rng(1);
  const auto zero = DisplacementModel::point_mass(0.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_aux_sum(zero, 200, s, rng)[0], 0.0);
  }
  const auto unit = DisplacementModel::point_mass(1.0);
  const int draws = 100000;
  double total = 0.0;
  for (int i = 0; i < draws; ++i) {
    const AuxWalk w = sample_aux_walk(unit, 200, s, rng);
    ASSERT_EQ(w.sum[0], static_cast<double>(w.jumps));
    total += w.sum[0];
  }
  double mean = 0.0;
  double var = 0.0;
  for (std::uint64_t i = 1; i < 200; ++i) {
    mean += s.p(i);
    var += s.p(i) * (1.0 - s.p(i));
  }
  EXPECT_NEAR(total / draws, mean, 4.0 * std::sqrt(var / draws));
}

TEST(ScheduleTest, AuxWalkNormalizedSumApproachesCauchy) {
  const auto c = DisplacementModel::cauchy(1.0);
  const Schedule s(3000);
  Rng rng(2);
  auto ks_at = [&](std::uint64_t n) {
    std::vector<double> v(10000);
    for (double& x : v) x = sample_aux_sum(c, n, s, rng)[0] / s.log_time(n);
    return ks_distance(v, [&](double x) { return cdf_displacement(c, x); });
  };
  const double early = ks_at(300);
  const double late = ks_at(3000);
  EXPECT_LT(late, 0.08);
  EXPECT_LT(late, early);
}

TEST(ScheduleTest, BernsteinExamples) {
  EXPECT_EQ(bernstein_threshold(0.0, 5.0), 5.0);
  EXPECT_NEAR(bernstein_bound(5.0), 0.006738, 1e-6);
  EXPECT_NEAR(bernstein_threshold(2.0, 2.0), 4.82843, 1e-5);
  EXPECT_EQ(bernstein_threshold(3.0, 0.0), 0.0);
  EXPECT_EQ(bernstein_bound(0.0), 1.0);
}

TEST(ScheduleTest, BernsteinHoldsEmpirically) {
  const Schedule s(400);
  std::vector<double> p;
  double v = 0.0;
  for (std::uint64_t i = 1; i < 400; ++i) {
    p.push_back(s.p(i));
    v += s.p(i);
  }
  Rng rng(3);
  const std::vector<double> ts = {0.5, 1.0, 2.0, 4.0};
  const auto trials = bernstein_monte_carlo(p, v, ts, 100000, rng);
  ASSERT_EQ(trials.size(), ts.size());
  for (const auto& t : trials) {
    EXPECT_TRUE(t.ok) << "t=" << t.t << " freq=" << t.frequency;
    EXPECT_LE(t.frequency, t.allowance);
  }
}

}  // namespace
}  // namespace urnlab
