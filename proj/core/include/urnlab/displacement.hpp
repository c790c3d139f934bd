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

// Displacement laws in the stable regime.
//
// A `DisplacementModel` is a one-dimensional symmetric law applied
// independently to each of `dim` coordinates. Every model knows its stable
// normalization (`StableLimit`): the exponent alpha with n^-alpha * sum of
// n draws converging to a limit law, and a tail exponent beta with
// P(|Delta| > n^beta) = o(1/n).

#ifndef URNLAB_DISPLACEMENT_HPP_
#define URNLAB_DISPLACEMENT_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/random.hpp"

namespace urnlab {

enum class DisplacementKind {
  kPointMass,
  kGaussian,
  kCauchy,
  kSymmetricStable,
  kSymmetricPareto,
  kRademacher,
};

class CdfUnavailable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ModelSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DisplacementModel {
  DisplacementKind kind = DisplacementKind::kPointMass;
  // point-mass: atom location. Unused otherwise.
  double location = 0.0;
  // gaussian: standard deviation. cauchy, stable, pareto: scale.
  double scale = 1.0;
  // symmetric-stable: index s in (0, 2]. symmetric-pareto: tail index a.
  double index = 2.0;
  int dim = 1;
  double beta = 1.0;

  static DisplacementModel point_mass(double c, int dim = 1);
  static DisplacementModel gaussian(double sigma, int dim = 1);
  static DisplacementModel cauchy(double scale, int dim = 1);
  static DisplacementModel symmetric_stable(double index, double scale,
                                            int dim = 1);
  static DisplacementModel symmetric_pareto(double tail, double scale,
                                            int dim = 1);
  static DisplacementModel rademacher(int dim = 1);

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  bool has_cdf() const;
  // Continuous laws put zero mass on every point.
  bool is_continuous() const;

  friend bool operator==(const DisplacementModel&,
                         const DisplacementModel&) = default;
};

// Smallest beta for which P(|Delta| > n^beta) = o(1/n) is guaranteed.
double minimal_beta(const DisplacementModel& model);

// `kind(param=value,...);d=<int>[;beta=<real>]`, e.g. `cauchy(scale=1);d=1`.
DisplacementModel parse_model(std::string_view spec);
// Canonical spec string; parse_model(format_model(m)) == m.
std::string format_model(const DisplacementModel& model);

struct StableLimit {
  double alpha = 1.0;
  DisplacementModel limit_law;
  double beta = 1.0;
};

// Throws std::domain_error for symmetric-pareto with a == 2 (the sum needs a
// logarithmic correction and has no pure power normalization).
StableLimit stable_limit(const DisplacementModel& model);

// One coordinate draw.
double sample_scalar(const DisplacementModel& model, Rng& rng);
void sample_displacement_into(const DisplacementModel& model, Rng& rng,
                              std::span<double> out);
std::vector<double> sample_displacement(const DisplacementModel& model,
                                        Rng& rng);
std::vector<double> sample_limit(const StableLimit& limit, Rng& rng);

// Symmetric stable law with characteristic function exp(-|scale t|^index),
// via the Chambers-Mallows-Stuck transform of a uniform angle and an
// exponential variate. Throws std::invalid_argument unless index in (0, 2].
double stable_sampler(double index, double scale, Rng& rng);

// P(Delta <= x) for d = 1. Throws CdfUnavailable otherwise.
double cdf_displacement(const DisplacementModel& model, double x);
// P(Delta < x); differs from the CDF only at atoms.
double cdf_left_displacement(const DisplacementModel& model, double x);

// P(lo <= Delta < hi) for one coordinate, evaluated without cancellation in
// the tails. Requires has_cdf().
double interval_probability(const DisplacementModel& model, double lo,
                            double hi);

// Draw one coordinate conditioned on [lo, hi). Requires a continuous
// CDF-bearing kind and interval_probability(lo, hi) > 0.
double sample_in_interval(const DisplacementModel& model, double lo, double hi,
                          Rng& rng);

// P(||Delta||_inf > r) in closed form where available.
std::optional<double> tail_probability(const DisplacementModel& model,
                                       double r);

}  // namespace urnlab

#endif  // URNLAB_DISPLACEMENT_HPP_
