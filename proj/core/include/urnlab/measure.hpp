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

// Empirical measures, box discretization and distances.

#ifndef URNLAB_MEASURE_HPP_
#define URNLAB_MEASURE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <vector>

namespace urnlab {

// (i_1, ..., i_d) names the half-open box prod_j [i_j h, (i_j + 1) h).
using BoxIndex = std::vector<std::int64_t>;

// Sparse nonnegative measure on the width-h grid. Only occupied boxes are
// stored. `overflow` holds mass that lives outside every stored box and is
// not resolved further; distances treat it as one extra cell.
struct BoxedMeasure {
  double h = 1.0;
  int dim = 1;
  std::map<BoxIndex, double> masses;
  double overflow = 0.0;

  double total_mass() const;
  double mass_at(const BoxIndex& box) const;
};

// Finitely many weighted atoms; weights positive and summing to 1.
struct AtomicMeasure {
  int dim = 1;
  std::vector<double> coords;  // row-major, size() * dim
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  // Equal weight 1/N on each of the N points in `coords`.
  static AtomicMeasure uniform(std::span<const double> coords, int dim);
};

// Throws std::invalid_argument on non-finite coordinates or h <= 0.
BoxIndex box_index(std::span<const double> x, double h);

BoxedMeasure boxify(const AtomicMeasure& measure, double h);

// Uniform measure on the given points, boxed. Masses are count / N.
BoxedMeasure boxify_points(std::span<const double> coords, int dim, double h);

// Pushes each atom x to x / a.
AtomicMeasure rescale_theta(const AtomicMeasure& measure, double a);

// Sum over boxes of |P(box) - Q(box)|, plus |P.overflow - Q.overflow|.
// Throws std::invalid_argument if the widths or dimensions differ.
double l1_box_discrepancy(const BoxedMeasure& p, const BoxedMeasure& q);

// Keeps the boxes in `support`; every other box's mass moves to overflow.
BoxedMeasure restrict_to(const BoxedMeasure& measure,
                         const std::map<BoxIndex, double>& support);

// Merges boxes pairwise along every axis: width 2h, index floor(i / 2).
BoxedMeasure coarsen(const BoxedMeasure& measure);

// Exact total variation; atoms match by exact coordinate equality.
double tv_atomic(const AtomicMeasure& p, const AtomicMeasure& q);

// sup_x |F_N(x) - F(x)|. `cdf_left` gives F(x-) for references with atoms;
// when omitted the reference is taken to be continuous.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left = {});

double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Asymptotic Kolmogorov critical value sqrt(-ln(level / 2) / 2) scaled by
// 1/sqrt(n) (one sample, m == 0) or sqrt((n + m) / (n m)).
double ks_critical_value(double level, std::size_t n, std::size_t m = 0);

// Mean absolute difference of sorted samples; sizes must match.
double wasserstein1(std::span<const double> a, std::span<const double> b);

// `h=<value>` then `i_1,...,i_d,mass` rows in box order.
void write_boxed_csv(std::ostream& out, const BoxedMeasure& measure);
// `x_1,...,x_d,weight` rows.
void write_atomic_csv(std::ostream& out, const AtomicMeasure& measure);

}  // namespace urnlab

#endif  // URNLAB_MEASURE_HPP_
