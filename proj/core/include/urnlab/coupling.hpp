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

// Conditional box laws of consecutive urn snapshots and their coupling.
//
// For schedule index n with times T = T_n and T' = T_{n+1}, and a realized
// urn X:
//
//   lhs = law of X_V given X, V uniform on {1..T'}
//       = empirical measure of X_1..X_{T'}
//   rhs = law of X_W + R Delta given X, W uniform on {1..T}, R ~ Bern(p_n)
//       = (1 - p_n) emp(X_1..X_T) + p_n (1/T) sum_{j <= T} law(X_j + Delta)
//
// Both are discretized on boxes of width h. The L1 distance between them is
// what the schedule argument needs to be small; half of it is the mismatch
// probability of a maximal coupling.
//
// Exact mode evaluates the convolution term on every box occupied by
// X_1..X_{T'} (the support of lhs) using the displacement CDF; rhs mass
// landing anywhere else goes to the overflow cell. Since lhs has no mass
// outside its support, the L1 distance computed this way is exact.

#ifndef URNLAB_COUPLING_HPP_
#define URNLAB_COUPLING_HPP_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "urnlab/measure.hpp"
#include "urnlab/random.hpp"
#include "urnlab/schedule.hpp"
#include "urnlab/urn.hpp"

namespace urnlab {

enum class LawMode { kExactCdf, kMonteCarlo };

std::string_view to_string(LawMode mode);
// "exact-cdf" or "monte-carlo"; throws std::invalid_argument otherwise.
LawMode parse_law_mode(std::string_view text);

// Times and step probability around schedule index n.
struct CouplingWindow {
  std::uint64_t n = 0;
  std::uint64_t t_n = 0;     // T_n
  std::uint64_t t_next = 0;  // T_{n+1}
  double p = 0.0;            // (T_{n+1} - T_n) / T_{n+1}
};

// Throws std::out_of_range if T_{n+1} is not representable.
CouplingWindow coupling_window(std::uint64_t n,
                               const ScheduleParams& params = {});

class UrnTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (1/T_{n+1}) #{T_n < i <= T_{n+1} : U_i > T_n}.
double modif_probability_exact(const UrnState& state, std::uint64_t n,
                               const ScheduleParams& params = {});

struct ResampledWindow {
  std::vector<double> colors;  // balls T_n + 1 .. T_{n+1}, row-major
  std::uint64_t resampled = 0;
};

// Parents above T_n are redrawn uniformly on {1..T_n} with a fresh
// displacement; the other window balls keep their colours.
ResampledWindow resampled_colors(const UrnState& state, std::uint64_t n,
                                 Rng& rng, const ScheduleParams& params = {});

BoxedMeasure lhs_box_law(const UrnState& state, std::uint64_t n, double h,
                         const ScheduleParams& params = {});

// Exact mode needs d = 1 and a CDF-bearing model (CdfUnavailable otherwise)
// and ignores rng. Monte Carlo mode boxes `mc_samples` draws.
BoxedMeasure rhs_box_law(const UrnState& state, std::uint64_t n, double h,
                         LawMode mode, std::uint64_t mc_samples, Rng& rng,
                         const ScheduleParams& params = {});

// (P(||lhs|| > n^gamma), P(||rhs|| > n^gamma)) in the sup norm.
std::pair<double, double> tail_mass(const UrnState& state, std::uint64_t n,
                                    double gamma, LawMode mode,
                                    std::uint64_t mc_samples, Rng& rng,
                                    const ScheduleParams& params = {});

struct TailEstimate {
  double probability = 0.0;  // frequency of sup-norm > log(n)^gamma
  double radius95 = 0.0;     // normal-approximation 95% half-width
  std::uint64_t exceedances = 0;
  std::uint64_t samples = 0;
};

// Monte Carlo estimate of P(|X_n| > log(n)^gamma) via record_rep_sample.
TailEstimate tail_record_estimate(const DisplacementModel& model,
                                  std::uint64_t n, double gamma,
                                  std::uint64_t samples, Rng& rng);

struct CouplingReport {
  std::uint64_t n = 0;
  std::uint64_t t_n = 0;
  std::uint64_t t_next = 0;
  double h = 0.0;
  double discrepancy = 0.0;
  double benchmark = 0.0;  // 3 n^(-4/3)
  double modif_prob = 0.0;
  double modif_benchmark = 0.0;  // p_n^2
  double tail_lhs = 0.0;
  double tail_rhs = 0.0;
  double gamma = 0.0;
  LawMode mode = LawMode::kExactCdf;
  std::uint64_t occupied_boxes = 0;
  double rhs_overflow = 0.0;
};

// gamma <= 0 selects the default 3 beta + 1.
double default_gamma(const DisplacementModel& model);

CouplingReport main2_discrepancy(const UrnState& state, std::uint64_t n,
                                 double h, LawMode mode, double gamma,
                                 std::uint64_t mc_samples, Rng& rng,
                                 const ScheduleParams& params = {});

struct CoupledSamples {
  int dim = 1;
  std::vector<double> a;  // rhs draws, row-major
  std::vector<double> b;  // lhs draws, row-major
  std::vector<bool> matched;
  std::uint64_t mismatches = 0;
  double discrepancy = 0.0;  // L1 between the two boxed laws
};

// k pairs (A, B) from a maximal coupling of the boxed rhs and lhs laws.
// Matched pairs share a box; unmatched pairs come from the positive and
// negative parts of rhs - lhs. Within a box, positions follow the exact
// conditional law of the corresponding side.
CoupledSamples couple_samples(const UrnState& state, std::uint64_t n, double h,
                              std::uint64_t k, LawMode mode,
                              std::uint64_t mc_samples, Rng& rng,
                              const ScheduleParams& params = {});

}  // namespace urnlab

#endif  // URNLAB_COUPLING_HPP_
