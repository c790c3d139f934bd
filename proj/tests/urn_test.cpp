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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "urnlab/measure.hpp"
#include "urnlab/random.hpp"

namespace urnlab {
namespace {

using testing::TempDir;

double harmonic(std::uint64_t n) {
  double h = 0.0;
  for (std::uint64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

TEST(UrnTest, FirstBallIsFirstDisplacement) {
  const auto m = DisplacementModel::cauchy(1.0);
  UrnState state(m, 5);
  Rng rng(9);
  state.grow(1, rng);
  Rng replay(9);
  EXPECT_EQ(state.size(), 1u);
  EXPECT_TRUE(state.parents().empty());
  EXPECT_EQ(state.color(1)[0], sample_scalar(m, replay));
}

TEST(UrnTest, ParentsAreValidAndColorsFollowTheRecursion) {
  const auto m = DisplacementModel::gaussian(1.0, 2);
  const UrnState s = grow_urn(m, 3, 5000);
  ASSERT_EQ(s.size(), 5000u);
  ASSERT_EQ(s.parents().size(), 4999u);
  ASSERT_EQ(s.colors().size(), 10000u);
  for (std::uint64_t i = 2; i <= s.size(); ++i) {
    ASSERT_GE(s.parent(i), 1u);
    ASSERT_LE(s.parent(i), i - 1);
  }
}

TEST(UrnTest, PointMassZeroStaysAtOrigin) {
  const UrnState s = grow_urn(DisplacementModel::point_mass(0.0, 3), 1, 1000);
  for (double x : s.colors()) EXPECT_EQ(x, 0.0);
}

TEST(UrnTest, UnitPointMassColorIsDepth) {
  const std::uint64_t n = 10000;
  const UrnState s = grow_urn(DisplacementModel::point_mass(1.0), 17, n);
  EXPECT_EQ(s.color(1)[0], 1.0);
  std::vector<double> depth(n + 1, 0.0);
  depth[1] = 1.0;
  double sum = 1.0;
  for (std::uint64_t i = 2; i <= n; ++i) {
    depth[i] = depth[s.parent(i)] + 1.0;
    ASSERT_EQ(s.color(i)[0], depth[i]);
    sum += depth[i];
  }
  // E[depth_1] = 1 and E[depth_i] = 1 + mean of E[depth_j] over j < i.
  double running = 0.0;
  double expected_sum = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double e = i == 1 ? 1.0 : 1.0 + running / static_cast<double>(i - 1);
    running += e;
    expected_sum += e;
  }
  const double expected = expected_sum / static_cast<double>(n);
  EXPECT_NEAR(expected, harmonic(n), 1e-9);
  EXPECT_NEAR(expected, 9.7876, 1e-4);
  EXPECT_NEAR(sum / static_cast<double>(n), expected, 0.3);
}

TEST(UrnTest, GrowthIsDeterministicAndIncremental) {
  const auto m = DisplacementModel::cauchy(1.0);
  const UrnState a = grow_urn(m, 99, 3000);
  const UrnState b = grow_urn(m, 99, 3000);
  EXPECT_EQ(a, b);
  const UrnState c = grow_urn(m, 99, 3000, 1);
  EXPECT_NE(a, c);
  const UrnState small = grow_urn(m, 99, 1000);
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    EXPECT_EQ(small.color(i)[0], a.color(i)[0]);
  }
}

TEST(UrnTest, GrowRejectsShrinkingAndMemoryGuard) {
  UrnState s(DisplacementModel::cauchy(1.0), 1);
  Rng rng(1);
  EXPECT_THROW(s.grow(0, rng), std::invalid_argument);
  s.grow(10, rng);
  EXPECT_THROW(s.grow(5, rng), std::invalid_argument);
  EXPECT_THROW(grow_urn(DisplacementModel::cauchy(1.0), 1, 101, 0, 100),
               std::invalid_argument);
}

TEST(UrnTest, UniformBallSamplesExamples) {
  Rng rng(4);
  const UrnState one = grow_urn(DisplacementModel::cauchy(1.0), 2, 1);
  for (double x : uniform_ball_samples(one, 50, rng)) {
    EXPECT_EQ(x, one.color(1)[0]);
  }
  const UrnState zero = grow_urn(DisplacementModel::point_mass(0.0), 2, 100);
  for (double x : uniform_ball_samples(zero, 50, rng)) EXPECT_EQ(x, 0.0);
}

TEST(UrnTest, UniformBallSamplesMatchRecordRepresentation) {
  const auto m = DisplacementModel::cauchy(1.0);
  const std::uint64_t n = 10000;
  const int k = 10000;
  const UrnState s = grow_urn(m, 8, n);
  Rng rng(12);
  const auto balls = uniform_ball_samples(s, k, rng);
  std::vector<double> records(k);
  Rng rrng(13);
  for (double& x : records) x = record_rep_sample(m, n, rrng).value[0];
  // The identity holds for the law averaged over urns; a single urn carries
  // an extra random shift, so this only guards against gross errors.
  const double ks = ks_two_sample(balls, records);
  EXPECT_LT(ks, 0.25);
}

TEST(UrnTest, LastBallMatchesRecordRepresentationAcrossUrns) {
  const auto m = DisplacementModel::cauchy(1.0);
  const std::uint64_t n = 2000;
  const int reps = 2000;
  std::vector<double> last(reps);
  for (int r = 0; r < reps; ++r) {
    last[r] = grow_urn(m, 77, n, r).color(n)[0];
  }
  Rng rng(78);
  std::vector<double> records(reps);
  for (double& x : records) x = record_rep_sample(m, n, rng).value[0];
  EXPECT_LT(ks_two_sample(last, records), ks_critical_value(1e-3, reps, reps));
}

TEST(UrnTest, PathLengthOfLastBall) {
  // Ball n sums the displacements on its ancestral path: itself plus each
  // j < n independently with probability 1/j, so the mean is 1 + H_{n-1}.
  const std::uint64_t n = 50;
  const int reps = 20000;
  double sum = 0.0;
  double sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double x =
        grow_urn(DisplacementModel::point_mass(1.0), 3, n, r).color(n)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sq / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, 1.0 + harmonic(n - 1), 4.0 * se);
}

TEST(UrnTest, RecordSampleExamples) {
  Rng rng(5);
  const auto c = DisplacementModel::cauchy(1.0);
  Rng replay(5);
  const RecordSample first = record_rep_sample(c, 1, rng);
  EXPECT_EQ(first.count, 1u);
  EXPECT_EQ(first.value[0], sample_scalar(c, replay));

  const auto unit = DisplacementModel::point_mass(1.0);
  for (int i = 0; i < 100; ++i) {
    const RecordSample r = record_rep_sample(unit, 50, rng);
    EXPECT_EQ(r.value[0], static_cast<double>(r.count));
  }

  const int draws = 1000000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    sum += static_cast<double>(record_rep_sample(unit, 4, rng).count);
  }
  EXPECT_NEAR(sum / draws, 25.0 / 12.0, 0.01);
}

TEST(UrnTest, RecordCountMoments) {
  Rng rng(6);
  const auto m = DisplacementModel::point_mass(0.0);
  for (std::uint64_t n : {10u, 1000u}) {
    double mean = 0.0;
    double var = 0.0;
    for (std::uint64_t i = 1; i <= n; ++i) {
      const double q = 1.0 / static_cast<double>(i);
      mean += q;
      var += q * (1.0 - q);
    }
    const int draws = 100000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double c = static_cast<double>(record_rep_sample(m, n, rng).count);
      s1 += c;
      s2 += c * c;
    }
    const double emp_mean = s1 / draws;
    const double emp_var = s2 / draws - emp_mean * emp_mean;
    EXPECT_NEAR(emp_mean, mean, 4.0 * std::sqrt(var / draws)) << n;
    // Var of the sample variance is about 2 var^2 / draws plus a fourth
    // cumulant term that is small for sums of Bernoullis.
    EXPECT_NEAR(emp_var, var, 4.0 * var * std::sqrt(3.0 / draws)) << n;
  }
}

TEST(CheckpointTest, RoundTripPreservesEverything) {
  TempDir dir;
  for (const auto& m : {DisplacementModel::cauchy(0.5, 2),
                        DisplacementModel::symmetric_pareto(1.5, 2.0),
                        DisplacementModel::point_mass(0.1)}) {
    const UrnState s = grow_urn(m, 1234, 777);
    const auto path = dir.file("urn.ckpt");
    save_checkpoint(s, path);
    EXPECT_EQ(load_checkpoint(path), s);
  }
}

void expect_checkpoint_error(const std::filesystem::path& path,
                             CheckpointError::Kind kind) {
  try {
    load_checkpoint(path);
    ADD_FAILURE() << "expected a checkpoint error";
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST(CheckpointTest, ReportsTypedErrors) {
  TempDir dir;
  expect_checkpoint_error(dir.file("missing"), CheckpointError::Kind::kIo);

  write_all(dir.file("empty"), "");
  expect_checkpoint_error(dir.file("empty"), CheckpointError::Kind::kMalformed);

  const UrnState s = grow_urn(DisplacementModel::cauchy(1.0), 1, 6);
  const auto good = dir.file("good");
  save_checkpoint(s, good);
  const std::string text = read_all(good);

  // Parent lines follow the header in order U_2..U_n; rewrite U_5.
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  std::size_t first_parent = 0;
  while (first_parent < lines.size() &&
         lines[first_parent].rfind("n=", 0) != 0) {
    ++first_parent;
  }
  ++first_parent;
  ASSERT_LT(first_parent + 3, lines.size());
  ASSERT_EQ(lines[first_parent + 3], std::to_string(s.parent(5)));
  auto bad = lines;
  bad[first_parent + 3] = "7";
  std::string joined;
  for (const auto& l : bad) joined += l + "\n";
  write_all(dir.file("u5"), joined);
  expect_checkpoint_error(dir.file("u5"),
                          CheckpointError::Kind::kInvariantViolation);

  write_all(dir.file("truncated"), text.substr(0, text.size() / 2));
  expect_checkpoint_error(dir.file("truncated"),
                          CheckpointError::Kind::kTruncated);

  std::string future = text;
  future.replace(future.find("version=1"), 9, "version=9");
  write_all(dir.file("future"), future);
  expect_checkpoint_error(dir.file("future"),
                          CheckpointError::Kind::kVersionMismatch);
}

}  // namespace
}  // namespace urnlab
