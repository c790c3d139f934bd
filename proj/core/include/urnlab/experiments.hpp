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

// Seeded experiment pipelines behind the `urnlab` command line.
//
// Every pipeline is a pure function of its configuration: replica r of seed
// s always draws from derive_stream(s, r, <purpose>), and rows come out
// ordered by (seed, n) whatever the worker count. Each row starts with the
// columns experiment, version, seed, model.

#ifndef URNLAB_EXPERIMENTS_HPP_
#define URNLAB_EXPERIMENTS_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "urnlab/config.hpp"

namespace urnlab {

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<double> row_seconds;  // wall clock spent producing each row
  std::vector<std::string> notes;   // verdict lines for humans
  bool passed = true;
};

Report run_experiment(const ExperimentConfig& config);

Report run_grow(const ExperimentConfig& config);
Report run_theorem_check(const ExperimentConfig& config);
Report run_coupling_check(const ExperimentConfig& config);
Report run_record_identity(const ExperimentConfig& config);
Report run_tv_identity(const ExperimentConfig& config);
Report run_schedule_table(const ExperimentConfig& config);
Report run_aux_walk_check(const ExperimentConfig& config);

// Header line then one line per row.
void write_report_csv(std::ostream& out, const Report& report);

// Wall-clock metadata kept out of the CSV so reruns stay byte-identical.
void write_report_meta_json(std::ostream& out, const Report& report,
                            const ExperimentConfig& config);

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y);

double median(std::vector<double> values);

}  // namespace urnlab

#endif  // URNLAB_EXPERIMENTS_HPP_
