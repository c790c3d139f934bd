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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "urnlab/csv.hpp"
#include "urnlab/measure.hpp"
#include "urnlab/schedule.hpp"
#include "urnlab/urn.hpp"
#include "urnlab/version.hpp"

namespace urnlab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stream for (seed, replica, tag), optionally salted by a second index such
// as the schedule index or ball count of a sub-experiment.
Rng stream(std::uint64_t seed, std::uint64_t replica, StreamTag tag,
           std::uint64_t salt = 0) {
  const std::uint64_t base = salt == 0 ? seed : mix64(seed ^ mix64(salt));
  return derive_stream(base, replica, tag);
}

// Runs fn(0..count-1) on up to `workers` threads. The first exception is
// rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> threads;
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(workers, count));
  for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(work);
  threads.clear();
  if (error) std::rethrow_exception(error);
}

Report make_report(std::initializer_list<std::string> extra) {
  Report r;
  r.columns = {"experiment", "version", "seed", "model"};
  r.columns.insert(r.columns.end(), extra);
  return r;
}

std::vector<std::string> row_prefix(const ExperimentConfig& c) {
  return {std::string(to_string(*c.experiment)),
          std::string(artifact_version()), std::to_string(c.seed),
          c.model_spec};
}

void require_scalar(const DisplacementModel& model, const char* what) {
  if (model.dim != 1) {
    throw std::domain_error(std::string(what) + " needs a d = 1 model");
  }
}

// Limit law with a CDF, or a domain_error naming the experiment.
StableLimit limit_with_cdf(const DisplacementModel& model, const char* what) {
  require_scalar(model, what);
  StableLimit limit = stable_limit(model);
  if (!limit.limit_law.has_cdf()) {
    throw std::domain_error(std::string(what) +
                            ": the limit law of this model has no CDF");
  }
  return limit;
}

double ks_to_law(std::span<const double> samples,
                 const DisplacementModel& law) {
  return ks_distance(
      samples, [&](double x) { return cdf_displacement(law, x); },
      [&](double x) { return cdf_left_displacement(law, x); });
}

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope needs two or more paired points");
  }
  const double k = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

Report run_grow(const ExperimentConfig& c) {
  const auto start = Clock::now();
  const std::uint64_t n = c.n_values.back();
  const UrnState urn = grow_urn(c.model, c.seed, n, 0, c.max_balls);

  Report r = make_report({"index", "parent"});
  for (int j = 1; j <= c.model.dim; ++j) {
    r.columns.push_back("x_" + std::to_string(j));
  }
  r.columns.push_back("weight");
  const std::string weight = format_real(1.0 / static_cast<double>(n));
  const auto prefix = row_prefix(c);
  for (std::uint64_t i = 1; i <= n; ++i) {
    auto row = prefix;
    row.push_back(std::to_string(i));
    row.push_back(i == 1 ? "" : std::to_string(urn.parent(i)));
    for (double x : urn.color(i)) row.push_back(format_real(x));
    row.push_back(weight);
    r.rows.push_back(std::move(row));
  }
  if (!c.checkpoint.empty()) save_checkpoint(urn, c.checkpoint);
  if (!c.boxes_out.empty()) {
    std::ofstream out(c.boxes_out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + c.boxes_out);
    write_boxed_csv(out, boxify_points(urn.colors(), urn.dim(), c.h));
  }
  const double per_row = seconds_since(start) / static_cast<double>(n);
  r.row_seconds.assign(r.rows.size(), per_row);
  r.notes.push_back("grew " + std::to_string(n) + " balls");
  return r;
}

Report run_theorem_check(const ExperimentConfig& c) {
  const StableLimit limit = limit_with_cdf(c.model, "theorem-check");
  if (c.n_values.front() < 2) {
    throw std::domain_error("theorem-check needs n >= 2 (log n > 0)");
  }
  const std::uint64_t n_max = c.n_values.back();
  const std::size_t k = c.n_values.size();

  std::vector<std::vector<double>> ks(c.replicas, std::vector<double>(k));
  std::vector<double> secs(c.replicas);
  parallel_for(c.replicas, c.workers, [&](std::size_t rep) {
    const auto start = Clock::now();
    const UrnState urn = grow_urn(c.model, c.seed, n_max, rep, c.max_balls);
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t n = c.n_values[j];
      const double a = std::pow(std::log(static_cast<double>(n)), limit.alpha);
      std::vector<double> scaled(urn.color_prefix(n).begin(),
                                 urn.color_prefix(n).end());
      for (double& x : scaled) x /= a;
      ks[rep][j] = ks_to_law(scaled, limit.limit_law);
    }
    secs[rep] = seconds_since(start);
  });

  Report r = make_report(
      {"replica", "n", "alpha", "log_scale", "ks", "seed_decreasing"});
  const auto prefix = row_prefix(c);
  std::size_t decreasing = 0;
  bool under_threshold = true;
  for (std::uint64_t rep = 0; rep < c.replicas; ++rep) {
    const bool dec = k < 2 || ks[rep][k - 1] < ks[rep][0];
    decreasing += dec ? 1 : 0;
    if (c.ks_threshold && ks[rep][k - 1] > *c.ks_threshold) {
      under_threshold = false;
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double n = static_cast<double>(c.n_values[j]);
      auto row = prefix;
      row.push_back(std::to_string(rep));
      row.push_back(std::to_string(c.n_values[j]));
      row.push_back(format_real(limit.alpha));
      row.push_back(format_real(std::pow(std::log(n), limit.alpha)));
      row.push_back(format_real(ks[rep][j]));
      row.push_back(dec ? "true" : "false");
      r.rows.push_back(std::move(row));
      r.row_seconds.push_back(secs[rep] / static_cast<double>(k));
    }
  }
  const double fraction =
      static_cast<double>(decreasing) / static_cast<double>(c.replicas);
  const bool trend_ok = k < 2 || fraction >= c.min_decreasing_fraction;
  r.passed = trend_ok && under_threshold;
  r.notes.push_back("KS decreased for " + std::to_string(decreasing) + "/" +
                    std::to_string(c.replicas) +
                    " replicas: " + verdict(trend_ok));
  if (c.ks_threshold) {
    r.notes.push_back("KS at n = " + std::to_string(n_max) +
                      " <= " + format_real(*c.ks_threshold) + ": " +
                      verdict(under_threshold));
  }
  return r;
}

Report run_coupling_check(const ExperimentConfig& c) {
  const std::uint64_t n_max = c.n_values.back();
  const std::uint64_t needed = big_time(n_max + 1);
  if (needed > c.max_balls) {
    throw std::domain_error("coupling-check at n = " + std::to_string(n_max) +
                            " needs " + std::to_string(needed) +
                            " balls; set allow_large_n = true");
  }
  const std::size_t k = c.n_values.size();
  const double gamma = c.gamma > 0.0 ? c.gamma : default_gamma(c.model);

  struct Cell {
    CouplingReport report;
    double mismatch_freq = 0.0;
    double mismatch_tol = 0.0;
    bool matched_within_h = true;
    bool ok = true;
    double seconds = 0.0;
  };
  std::vector<std::vector<Cell>> cells(c.replicas, std::vector<Cell>(k));
  parallel_for(c.replicas, c.workers, [&](std::size_t rep) {
    const UrnState urn = grow_urn(c.model, c.seed, needed, rep, c.max_balls);
    for (std::size_t j = 0; j < k; ++j) {
      const auto start = Clock::now();
      const std::uint64_t n = c.n_values[j];
      Cell& cell = cells[rep][j];
      Rng rng = stream(c.seed, rep, StreamTag::kCoupling, n);
      cell.report =
          main2_discrepancy(urn, n, c.h, c.mode, gamma, c.mc_samples, rng);
      const CouplingReport& rep_n = cell.report;
      cell.ok = rep_n.discrepancy >= 0.0 && rep_n.discrepancy <= 2.0 + 1e-9 &&
                rep_n.modif_prob >= 0.0 && rep_n.modif_prob <= 1.0 &&
                rep_n.tail_lhs >= 0.0 && rep_n.tail_lhs <= 1.0 &&
                rep_n.tail_rhs >= 0.0 && rep_n.tail_rhs <= 1.0;
      if (c.pairs > 0) {
        Rng pair_rng = stream(c.seed, rep, StreamTag::kMonteCarlo, n);
        const CoupledSamples s = couple_samples(urn, n, c.h, c.pairs, c.mode,
                                                c.mc_samples, pair_rng);
        const double q = 0.5 * s.discrepancy;
        const double kk = static_cast<double>(c.pairs);
        cell.mismatch_freq = static_cast<double>(s.mismatches) / kk;
        cell.mismatch_tol = 4.0 * std::sqrt(q * (1.0 - q) / kk);
        for (std::uint64_t i = 0; i < c.pairs; ++i) {
          if (!s.matched[i]) continue;
          for (int dd = 0; dd < s.dim; ++dd) {
            const std::size_t at = i * static_cast<std::size_t>(s.dim) +
                                   static_cast<std::size_t>(dd);
            if (!(std::abs(s.a[at] - s.b[at]) < c.h)) {
              cell.matched_within_h = false;
            }
          }
        }
        cell.ok = cell.ok && cell.matched_within_h &&
                  std::abs(cell.mismatch_freq - q) <= cell.mismatch_tol;
      }
      cell.seconds = seconds_since(start);
    }
  });

  Report r =
      make_report({"replica", "n", "T_n", "T_n1", "h", "gamma", "mode",
                   "discrepancy", "benchmark", "modif_prob", "modif_benchmark",
                   "tail_lhs", "tail_rhs", "occupied_boxes", "rhs_overflow",
                   "pairs", "mismatch_freq", "mismatch_expected", "ok"});
  const auto prefix = row_prefix(c);
  bool all_ok = true;
  for (std::uint64_t rep = 0; rep < c.replicas; ++rep) {
    for (std::size_t j = 0; j < k; ++j) {
      const Cell& cell = cells[rep][j];
      const CouplingReport& cr = cell.report;
      all_ok = all_ok && cell.ok;
      auto row = prefix;
      row.push_back(std::to_string(rep));
      row.push_back(std::to_string(cr.n));
      row.push_back(std::to_string(cr.t_n));
      row.push_back(std::to_string(cr.t_next));
      row.push_back(format_real(cr.h));
      row.push_back(format_real(cr.gamma));
      row.push_back(std::string(to_string(cr.mode)));
      row.push_back(format_real(cr.discrepancy));
      row.push_back(format_real(cr.benchmark));
      row.push_back(format_real(cr.modif_prob));
      row.push_back(format_real(cr.modif_benchmark));
      row.push_back(format_real(cr.tail_lhs));
      row.push_back(format_real(cr.tail_rhs));
      row.push_back(std::to_string(cr.occupied_boxes));
      row.push_back(format_real(cr.rhs_overflow));
      row.push_back(std::to_string(c.pairs));
      row.push_back(c.pairs ? format_real(cell.mismatch_freq) : "");
      row.push_back(c.pairs ? format_real(0.5 * cr.discrepancy) : "");
      row.push_back(cell.ok ? "true" : "false");
      r.rows.push_back(std::move(row));
      r.row_seconds.push_back(cell.seconds);
    }
  }
  r.passed = all_ok;
  r.notes.push_back(std::string("per-row checks: ") + verdict(all_ok));

  if (c.check_trend && k >= 2) {
    std::vector<double> xs;
    std::vector<double> medians;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> d;
      for (std::uint64_t rep = 0; rep < c.replicas; ++rep) {
        d.push_back(cells[rep][j].report.discrepancy);
      }
      xs.push_back(static_cast<double>(c.n_values[j]));
      medians.push_back(median(d));
    }
    bool decreasing = true;
    for (std::size_t j = 1; j < k; ++j) {
      decreasing = decreasing && medians[j] < medians[j - 1];
    }
    const double slope = log_log_slope(xs, medians);
    const bool slope_ok = slope >= c.slope_min && slope <= c.slope_max;
    r.passed = r.passed && decreasing && slope_ok;
    std::string line = "median discrepancy:";
    for (std::size_t j = 0; j < k; ++j) {
      line +=
          " n=" + std::to_string(c.n_values[j]) + ":" + format_real(medians[j]);
    }
    r.notes.push_back(line);
    r.notes.push_back(std::string("strictly decreasing: ") +
                      verdict(decreasing));
    r.notes.push_back("log-log slope " + format_real(slope) + " in [" +
                      format_real(c.slope_min) + ", " +
                      format_real(c.slope_max) + "]: " + verdict(slope_ok));
  }
  return r;
}

Report run_record_identity(const ExperimentConfig& c) {
  require_scalar(c.model, "record-identity");
  Report r = make_report({"n", "replicas", "ks", "critical", "pass"});
  const auto prefix = row_prefix(c);
  for (std::uint64_t n : c.n_values) {
    const auto start = Clock::now();
    std::vector<double> urn_draws(c.replicas);
    std::vector<double> record_draws(c.replicas);
    parallel_for(c.replicas, c.workers, [&](std::size_t rep) {
      Rng grow_rng = stream(c.seed, rep, StreamTag::kGrow, n);
      UrnState urn(c.model, c.seed);
      urn.grow(n, grow_rng);
      urn_draws[rep] = urn.color(n)[0];
      Rng rec_rng = stream(c.seed, rep, StreamTag::kRecord, n);
      record_draws[rep] = record_rep_sample(c.model, n, rec_rng).value[0];
    });
    const double ks = ks_two_sample(urn_draws, record_draws);
    const double crit = ks_critical_value(c.ks_level, c.replicas, c.replicas);
    const bool ok = ks < crit;
    r.passed = r.passed && ok;
    auto row = prefix;
    row.push_back(std::to_string(n));
    row.push_back(std::to_string(c.replicas));
    row.push_back(format_real(ks));
    row.push_back(format_real(crit));
    row.push_back(ok ? "true" : "false");
    r.rows.push_back(std::move(row));
    r.row_seconds.push_back(seconds_since(start));
    r.notes.push_back("n = " + std::to_string(n) + ": KS " + format_real(ks) +
                      " vs critical " + format_real(crit) + ": " + verdict(ok));
  }
  return r;
}

Report run_tv_identity(const ExperimentConfig& c) {
  if (c.m == 0) throw std::domain_error("tv-identity needs m");
  if (c.n_values.back() > c.m) {
    throw std::domain_error("tv-identity needs n <= m");
  }
  const auto start = Clock::now();
  const UrnState urn = grow_urn(c.model, c.seed, c.m, 0, c.max_balls);
  const AtomicMeasure big = AtomicMeasure::uniform(urn.colors(), urn.dim());
  const bool equality = c.model.is_continuous();
  constexpr double kTol = 1e-12;

  Report r = make_report({"n", "m", "tv", "one_minus_ratio", "check", "pass"});
  const auto prefix = row_prefix(c);
  const double grow_secs = seconds_since(start);
  for (std::uint64_t n : c.n_values) {
    const auto row_start = Clock::now();
    const AtomicMeasure small =
        AtomicMeasure::uniform(urn.color_prefix(n), urn.dim());
    const double tv = tv_atomic(small, big);
    const double bound =
        1.0 - static_cast<double>(n) / static_cast<double>(c.m);
    const bool ok =
        equality ? std::abs(tv - bound) <= kTol : tv <= bound + kTol;
    r.passed = r.passed && ok;
    auto row = prefix;
    row.push_back(std::to_string(n));
    row.push_back(std::to_string(c.m));
    row.push_back(format_real(tv));
    row.push_back(format_real(bound));
    row.push_back(equality ? "equality" : "bound");
    row.push_back(ok ? "true" : "false");
    r.rows.push_back(std::move(row));
    r.row_seconds.push_back(seconds_since(row_start) +
                            grow_secs / static_cast<double>(c.n_values.size()));
    r.notes.push_back("n = " + std::to_string(n) + ": tv " + format_real(tv) +
                      (equality ? " == " : " <= ") + format_real(bound) + ": " +
                      verdict(ok));
  }
  return r;
}

Report run_schedule_table(const ExperimentConfig& c) {
  const auto start = Clock::now();
  const std::uint64_t n_max = c.n_values.back();
  const Schedule sched(n_max);
  Report r = make_report({"n", "T_n", "log_T_n", "p_n", "sum_p", "log_ratio"});
  const auto prefix = row_prefix(c);
  bool ok = true;
  std::optional<std::uint64_t> prev;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const auto t = sched.time(n);
    if (t && prev && *t <= *prev) ok = false;
    prev = t;
    const double p = sched.p(n);
    if (!(p > 0.0 && p < 1.0)) ok = false;
    if (!std::binary_search(c.n_values.begin(), c.n_values.end(), n)) continue;
    auto row = prefix;
    row.push_back(std::to_string(n));
    row.push_back(t ? std::to_string(*t) : "");
    row.push_back(format_real(sched.log_time(n)));
    row.push_back(format_real(p));
    row.push_back(format_real(sched.sum_p_before(n)));
    row.push_back(format_real(sched.sum_p_before(n) / sched.log_time(n)));
    r.rows.push_back(std::move(row));
  }
  r.row_seconds.assign(
      r.rows.size(), seconds_since(start) / static_cast<double>(r.rows.size()));
  r.passed = ok;
  r.notes.push_back("representability cutoff n = " +
                    std::to_string(sched.cutoff()));
  r.notes.push_back(std::string("T increasing and p in (0, 1): ") +
                    verdict(ok));
  return r;
}

Report run_aux_walk_check(const ExperimentConfig& c) {
  const StableLimit limit = limit_with_cdf(c.model, "aux-walk-check");
  if (c.n_values.front() < 2) throw std::domain_error("aux walk needs n >= 2");
  const std::size_t k = c.n_values.size();
  const Schedule sched(c.n_values.back());
  std::vector<double> ks(k);
  std::vector<double> secs(k);
  parallel_for(k, c.workers, [&](std::size_t j) {
    const auto start = Clock::now();
    const std::uint64_t n = c.n_values[j];
    Rng rng = stream(c.seed, 0, StreamTag::kAuxWalk, n);
    const double a = std::pow(sched.log_time(n), limit.alpha);
    std::vector<double> draws(c.samples);
    for (double& x : draws) x = sample_aux_sum(c.model, n, sched, rng)[0] / a;
    ks[j] = ks_to_law(draws, limit.limit_law);
    secs[j] = seconds_since(start);
  });

  Report r = make_report({"n", "samples", "log_T_n", "alpha", "ks"});
  const auto prefix = row_prefix(c);
  for (std::size_t j = 0; j < k; ++j) {
    auto row = prefix;
    row.push_back(std::to_string(c.n_values[j]));
    row.push_back(std::to_string(c.samples));
    row.push_back(format_real(sched.log_time(c.n_values[j])));
    row.push_back(format_real(limit.alpha));
    row.push_back(format_real(ks[j]));
    r.rows.push_back(std::move(row));
    r.row_seconds.push_back(secs[j]);
  }
  if (k >= 2) {
    const bool dec = ks[k - 1] < ks[0] || ks[k - 1] == 0.0;
    r.passed = r.passed && dec;
    r.notes.push_back(std::string("KS decreasing from first to last n: ") +
                      verdict(dec));
  }
  if (c.ks_threshold) {
    const bool ok = ks[k - 1] < *c.ks_threshold;
    r.passed = r.passed && ok;
    r.notes.push_back("KS at n = " + std::to_string(c.n_values.back()) +
                      " below " + format_real(*c.ks_threshold) + ": " +
                      verdict(ok));
  }
  return r;
}

Report run_experiment(const ExperimentConfig& config) {
  if (!config.experiment) throw std::invalid_argument("no experiment set");
  switch (*config.experiment) {
    case Experiment::kGrow:
      return run_grow(config);
    case Experiment::kTheoremCheck:
      return run_theorem_check(config);
    case Experiment::kCouplingCheck:
      return run_coupling_check(config);
    case Experiment::kRecordIdentity:
      return run_record_identity(config);
    case Experiment::kTvIdentity:
      return run_tv_identity(config);
    case Experiment::kScheduleTable:
      return run_schedule_table(config);
    case Experiment::kAuxWalkCheck:
      return run_aux_walk_check(config);
  }
  throw std::invalid_argument("unknown experiment");
}

void write_report_csv(std::ostream& out, const Report& report) {
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out << ',';
    out << csv_field(report.columns[i]);
  }
  out << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_field(row[i]);
    }
    out << '\n';
  }
}

void write_report_meta_json(std::ostream& out, const Report& report,
                            const ExperimentConfig& config) {
  nlohmann::json meta;
  meta["experiment"] = std::string(to_string(*config.experiment));
  meta["version"] = std::string(artifact_version());
  meta["seed"] = config.seed;
  meta["model"] = config.model_spec;
  meta["passed"] = report.passed;
  meta["notes"] = report.notes;
  meta["row_wall_seconds"] = report.row_seconds;
  meta["total_wall_seconds"] = std::accumulate(report.row_seconds.begin(),
                                               report.row_seconds.end(), 0.0);
  out << meta.dump(2) << '\n';
}

}  // namespace urnlab
