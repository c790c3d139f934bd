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

#include "urnlab/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"
#include "urnlab/config.hpp"
#include "urnlab/version.hpp"

namespace urnlab {
namespace {

ExperimentConfig make_config(const std::string& text) {
  ExperimentConfig c = parse_config(text);
  finalize_config(c);
  return c;
}

std::string csv_of(const Report& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

std::size_t column(const Report& r, const std::string& name) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (r.columns[i] == name) return i;
  }
  ADD_FAILURE() << "no column " << name;
  return 0;
}

double cell(const Report& r, std::size_t row, const std::string& name) {
  return std::stod(r.rows.at(row).at(column(r, name)));
}

TEST(ExperimentsTest, EveryRowCarriesProvenance) {
  const Report r = run_experiment(make_config(
      "experiment = grow\nmodel = cauchy(scale=1)\nn = 20\nseed = 7\n"));
  ASSERT_EQ(r.rows.size(), 20u);
  EXPECT_EQ(r.columns[0], "experiment");
  EXPECT_EQ(r.columns[1], "version");
  EXPECT_EQ(r.columns[2], "seed");
  EXPECT_EQ(r.columns[3], "model");
  for (const auto& row : r.rows) {
    EXPECT_EQ(row[0], "grow");
    EXPECT_EQ(row[1], artifact_version());
    EXPECT_EQ(row[2], "7");
    EXPECT_EQ(row[3], "cauchy(scale=1);d=1");
  }
  EXPECT_EQ(r.row_seconds.size(), r.rows.size());
}

TEST(ExperimentsTest, ReportsAreByteIdenticalAcrossRunsAndWorkers) {
  const std::vector<std::string> configs = {
      "experiment = grow\nmodel = gaussian(sigma=1);d=2\nn = 300\n",
      "experiment = theorem-check\nmodel = cauchy(scale=1)\nn = 100, 2000\n"
      "replicas = 3\n",
      "experiment = coupling-check\nmodel = cauchy(scale=1)\nn = 4, 8\n"
      "replicas = 2\n",
      "experiment = coupling-check\nmodel = cauchy(scale=1)\nn = 4\n"
      "mode = monte-carlo\nmc_samples = 1000\npairs = 500\n",
      "experiment = record-identity\nmodel = cauchy(scale=1)\nn = 100\n"
      "replicas = 200\n",
      "experiment = tv-identity\nmodel = cauchy(scale=1)\nn = 10, 50\n"
      "m = 100\n",
      "experiment = schedule-table\nn = 1, 8, 5000\n",
      "experiment = aux-walk-check\nmodel = cauchy(scale=1)\nn = 30, 300\n"
      "samples = 500\n",
  };
  for (const auto& text : configs) {
    ExperimentConfig c = make_config(text);
    const std::string first = csv_of(run_experiment(c));
    EXPECT_EQ(first, csv_of(run_experiment(c))) << text;
    c.workers = 3;
    EXPECT_EQ(first, csv_of(run_experiment(c))) << text;
  }
}

TEST(ExperimentsTest, AddingReplicasKeepsExistingOnes) {
  const std::string base =
      "experiment = theorem-check\nmodel = cauchy(scale=1)\nn = 50, 500\n";
  const Report two = run_experiment(make_config(base + "replicas = 2\n"));
  const Report four = run_experiment(make_config(base + "replicas = 4\n"));
  for (std::size_t i = 0; i < two.rows.size(); ++i) {
    EXPECT_EQ(cell(two, i, "ks"), cell(four, i, "ks"));
  }
}

TEST(ExperimentsTest, PointMassExamplesGiveZeroKs) {
  const Report theorem = run_experiment(make_config(
      "experiment = theorem-check\nmodel = point-mass(c=0)\nn = 10, 1000\n"
      "replicas = 2\n"));
  for (std::size_t i = 0; i < theorem.rows.size(); ++i) {
    EXPECT_EQ(cell(theorem, i, "ks"), 0.0);
  }
  const Report record = run_experiment(make_config(
      "experiment = record-identity\nmodel = point-mass(c=0)\nn = 100\n"
      "replicas = 50\n"));
  EXPECT_EQ(cell(record, 0, "ks"), 0.0);
  EXPECT_TRUE(record.passed);
  const Report aux = run_experiment(make_config(
      "experiment = aux-walk-check\nmodel = point-mass(c=0)\nn = 10, 100\n"
      "samples = 100\n"));
  EXPECT_EQ(cell(aux, 1, "ks"), 0.0);
}

TEST(ExperimentsTest, TvIdentityExamples) {
  const Report r = run_experiment(make_config(
      "experiment = tv-identity\nmodel = gaussian(sigma=1)\nn = 500, 1000\n"
      "m = 1000\n"));
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(cell(r, 0, "tv"), 0.5, 1e-12);
  EXPECT_EQ(cell(r, 1, "tv"), 0.0);
  const Report rad = run_experiment(make_config(
      "experiment = tv-identity\nmodel = rademacher\nn = 500\nm = 1000\n"));
  EXPECT_TRUE(rad.passed);
  EXPECT_LE(cell(rad, 0, "tv"), 0.5 + 1e-12);
  EXPECT_EQ(rad.rows[0][column(rad, "check")], "bound");
}

TEST(ExperimentsTest, ScheduleTableValues) {
  const Report r = run_experiment(
      make_config("experiment = schedule-table\nn = 1, 8, 27\n"));
  EXPECT_EQ(r.rows[0][column(r, "T_n")], "20");
  EXPECT_EQ(r.rows[1][column(r, "T_n")], "403");
  EXPECT_EQ(r.rows[2][column(r, "T_n")], "8103");
  EXPECT_DOUBLE_EQ(cell(r, 1, "p_n"), 109.0 / 512.0);
}

TEST(ExperimentsTest, ThresholdsDecideThePassFlag) {
  const std::string base =
      "experiment = aux-walk-check\nmodel = cauchy(scale=1)\nn = 30, 300\n"
      "samples = 2000\n";
  EXPECT_FALSE(
      run_experiment(make_config(base + "ks_threshold = 1e-9\n")).passed);
  EXPECT_TRUE(
      run_experiment(make_config(base + "ks_threshold = 0.9\n")).passed);
}

TEST(ExperimentsTest, DomainErrorsAreReported) {
  EXPECT_THROW(run_experiment(make_config(
                   "experiment = theorem-check\n"
                   "model = symmetric-stable(index=1.5,scale=1)\nn = 10\n")),
               std::exception);
  EXPECT_THROW(run_experiment(make_config(
                   "experiment = tv-identity\nmodel = rademacher\nn = 10\n"
                   "m = 5\n")),
               std::domain_error);
}

TEST(ExperimentsTest, MetaJsonHoldsTimings) {
  const ExperimentConfig c =
      make_config("experiment = schedule-table\nn = 1, 2\n");
  const Report r = run_experiment(c);
  std::ostringstream out;
  write_report_meta_json(out, r, c);
  const auto meta = nlohmann::json::parse(out.str());
  EXPECT_EQ(meta["experiment"], "schedule-table");
  EXPECT_EQ(meta["row_wall_seconds"].size(), 2u);
  EXPECT_TRUE(meta["passed"].get<bool>());
}

TEST(ExperimentsTest, CsvQuotesFieldsWithCommas) {
  Report r;
  r.columns = {"a", "b"};
  r.rows = {{"x,y", "say \"hi\""}};
  EXPECT_EQ(csv_of(r), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(ExperimentsTest, Helpers) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(5.0 * std::pow(v, -4.0 / 3.0));
  EXPECT_NEAR(log_log_slope(x, y), -4.0 / 3.0, 1e-12);
}

}  // namespace
}  // namespace urnlab
