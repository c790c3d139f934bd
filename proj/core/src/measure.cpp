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

#include "urnlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "urnlab/csv.hpp"

namespace urnlab {

double BoxedMeasure::total_mass() const {
  double total = overflow;
  for (const auto& [box, mass] : masses) total += mass;
  return total;
}

double BoxedMeasure::mass_at(const BoxIndex& box) const {
  auto it = masses.find(box);
  return it == masses.end() ? 0.0 : it->second;
}

AtomicMeasure AtomicMeasure::uniform(std::span<const double> coords, int dim) {
  AtomicMeasure m;
  m.dim = dim;
  m.coords.assign(coords.begin(), coords.end());
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
  m.weights.assign(n, 1.0 / static_cast<double>(n));
  return m;
}

BoxIndex box_index(std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("box width must be positive");
  BoxIndex idx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) {
      throw std::invalid_argument("non-finite coordinate in box_index");
    }
    idx[j] = static_cast<std::int64_t>(std::floor(x[j] / h));
  }
  return idx;
}

BoxedMeasure boxify(const AtomicMeasure& measure, double h) {
  BoxedMeasure out;
  out.h = h;
  out.dim = measure.dim;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    out.masses[box_index(measure.point(i), h)] += measure.weights[i];
  }
  return out;
}

BoxedMeasure boxify_points(std::span<const double> coords, int dim, double h) {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t n = coords.size() / d;
  std::map<BoxIndex, std::uint64_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[box_index(coords.subspan(i * d, d), h)];
  }
  BoxedMeasure out;
  out.h = h;
  out.dim = dim;
  for (const auto& [box, c] : counts) {
    out.masses.emplace_hint(out.masses.end(), box,
                            static_cast<double>(c) / static_cast<double>(n));
  }
  return out;
}

AtomicMeasure rescale_theta(const AtomicMeasure& measure, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("rescaling factor must be > 0");
  AtomicMeasure out = measure;
  for (double& x : out.coords) x /= a;
  return out;
}

double l1_box_discrepancy(const BoxedMeasure& p, const BoxedMeasure& q) {
  if (p.h != q.h) throw std::invalid_argument("box widths differ");
  if (p.dim != q.dim) throw std::invalid_argument("dimensions differ");
  double sum = std::abs(p.overflow - q.overflow);
  auto ip = p.masses.begin();
  auto iq = q.masses.begin();
  while (ip != p.masses.end() || iq != q.masses.end()) {
    if (iq == q.masses.end() ||
        (ip != p.masses.end() && ip->first < iq->first)) {
      sum += ip->second;
      ++ip;
    } else if (ip == p.masses.end() || iq->first < ip->first) {
      sum += iq->second;
      ++iq;
    } else {
      sum += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return sum;
}

BoxedMeasure restrict_to(const BoxedMeasure& measure,
                         const std::map<BoxIndex, double>& support) {
  BoxedMeasure out;
  out.h = measure.h;
  out.dim = measure.dim;
  out.overflow = measure.overflow;
  for (const auto& [box, mass] : measure.masses) {
    if (support.count(box)) {
      out.masses.emplace_hint(out.masses.end(), box, mass);
    } else {
      out.overflow += mass;
    }
  }
  return out;
}

BoxedMeasure coarsen(const BoxedMeasure& measure) {
  BoxedMeasure out;
  out.h = measure.h * 2.0;
  out.dim = measure.dim;
  out.overflow = measure.overflow;
  for (const auto& [box, mass] : measure.masses) {
    BoxIndex merged(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
      // Floor division keeps [2k, 2k+1] together on both sides of 0.
      merged[j] = box[j] >= 0 ? box[j] / 2 : -((-box[j] + 1) / 2);
    }
    out.masses[merged] += mass;
  }
  return out;
}

namespace {

// Atoms sorted lexicographically with duplicate locations merged.
std::vector<std::pair<std::vector<double>, double>> canonical_atoms(
    const AtomicMeasure& m) {
  std::vector<std::pair<std::vector<double>, double>> atoms;
  atoms.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto pt = m.point(i);
    atoms.emplace_back(std::vector<double>(pt.begin(), pt.end()), m.weights[i]);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::vector<double>, double>> merged;
  for (auto& atom : atoms) {
    if (!merged.empty() && merged.back().first == atom.first) {
      merged.back().second += atom.second;
    } else {
      merged.push_back(std::move(atom));
    }
  }
  return merged;
}

}  // namespace

double tv_atomic(const AtomicMeasure& p, const AtomicMeasure& q) {
  if (p.dim != q.dim) throw std::invalid_argument("dimensions differ");
  const auto a = canonical_atoms(p);
  const auto b = canonical_atoms(q);
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      sum += a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      sum += b[j++].second;
    } else {
      sum += std::abs(a[i++].second - b[j++].second);
    }
  }
  return std::min(1.0, 0.5 * sum);
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    const double f = cdf(x[i]);
    const double f_left = cdf_left ? cdf_left(x[i]) : f;
    d = std::max({d, std::abs(upto - f), std::abs(below - f_left)});
    i = j;
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(
        d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // One side exhausted: the other CDF only climbs towards 1 from here.
  if (i < x.size()) d = std::max(d, 1.0 - static_cast<double>(i) / n);
  if (j < y.size()) d = std::max(d, 1.0 - static_cast<double>(j) / m);
  return d;
}

double ks_critical_value(double level, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
  const double nn = static_cast<double>(n);
  if (m == 0) return c / std::sqrt(nn);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    if (a.size() == b.size()) return 0.0;
    throw std::invalid_argument("wasserstein1 needs two nonempty samples");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // Integral of |F_a - F_b| over the merged breakpoints.
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sum = 0.0;
  double prev = std::min(x.front(), y.front());
  while (i < x.size() || j < y.size()) {
    const double next =
        j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    sum += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) *
           (next - prev);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    prev = next;
  }
  return sum;
}

void write_boxed_csv(std::ostream& out, const BoxedMeasure& measure) {
  out << "h=" << format_real(measure.h) << '\n';
  if (measure.overflow != 0.0) {
    out << "overflow=" << format_real(measure.overflow) << '\n';
  }
  for (int j = 1; j <= measure.dim; ++j) out << "i_" << j << ',';
  out << "mass\n";
  for (const auto& [box, mass] : measure.masses) {
    for (std::int64_t i : box) out << i << ',';
    out << format_real(mass) << '\n';
  }
}

void write_atomic_csv(std::ostream& out, const AtomicMeasure& measure) {
  for (int j = 1; j <= measure.dim; ++j) out << "x_" << j << ',';
  out << "weight\n";
  for (std::size_t i = 0; i < measure.size(); ++i) {
    for (double x : measure.point(i)) out << format_real(x) << ',';
    out << format_real(measure.weights[i]) << '\n';
  }
}

}  // namespace urnlab
