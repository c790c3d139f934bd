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

#include "urnlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace urnlab {
namespace {

using Members = std::map<BoxIndex, std::vector<std::uint64_t>>;

void require_urn(const UrnState& state, std::uint64_t needed) {
  if (state.size() < needed) {
    throw UrnTooSmall("urn has " + std::to_string(state.size()) +
                      " balls, need " + std::to_string(needed));
  }
}

void require_width(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("box width must be positive");
  }
}

void require_exact(const UrnState& state) {
  if (!state.model().has_cdf()) {
    throw CdfUnavailable(
        "exact-cdf mode needs d = 1 and a displacement law with a CDF");
  }
}

// 0-based ball indices of balls 1..count grouped by box, ascending.
Members group_by_box(const UrnState& state, std::uint64_t count, double h) {
  Members members;
  for (std::uint64_t i = 0; i < count; ++i) {
    members[box_index(state.color(i + 1), h)].push_back(i);
  }
  return members;
}

double sup_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// P(|x + Delta| > r) for one coordinate.
double shifted_tail(const DisplacementModel& model, double x, double r) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double upper =
      interval_probability(model, std::nextafter(r - x, kInf), kInf);
  const double lower = interval_probability(model, -kInf, -r - x);
  return upper + lower;
}

// Moves x into box index i of width h if rounding put it next door.
double snap_into_box(double x, std::int64_t i, double h) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int guard = 0; guard < 64; ++guard) {
    const auto j = static_cast<std::int64_t>(std::floor(x / h));
    if (j == i) return x;
    x = std::nextafter(x, j < i ? kInf : -kInf);
  }
  return x;
}

// Exact rhs pieces on the evaluation set.
struct ExactRhs {
  std::vector<BoxIndex> boxes;
  std::vector<double> emp;   // (1 - p) * emp(X_1..X_T)(box)
  std::vector<double> conv;  // p * (1/T) sum_j P(X_j + Delta in box)
  double overflow = 0.0;
};

ExactRhs exact_rhs(const UrnState& state, const CouplingWindow& w, double h,
                   const Members& support) {
  const DisplacementModel& model = state.model();
  const double t = static_cast<double>(w.t_n);
  const double t_next = static_cast<double>(w.t_next);
  const double p = static_cast<double>(w.t_next - w.t_n) / t_next;
  const auto prefix = state.color_prefix(w.t_n);

  ExactRhs out;
  out.boxes.reserve(support.size());
  double conv_total = 0.0;  // in units of T
  for (const auto& [box, idx] : support) {
    const auto below = static_cast<std::uint64_t>(
        std::lower_bound(idx.begin(), idx.end(), w.t_n) - idx.begin());
    const double lo = static_cast<double>(box[0]) * h;
    const double hi = static_cast<double>(box[0] + 1) * h;
    double s = 0.0;
    for (double x : prefix) s += interval_probability(model, lo - x, hi - x);
    conv_total += s;
    out.boxes.push_back(box);
    out.emp.push_back(static_cast<double>(below) / t_next);
    out.conv.push_back(p * s / t);
  }
  out.overflow = std::max(0.0, p * (1.0 - conv_total / t));
  return out;
}

struct MonteCarloRhs {
  std::vector<double> points;
  BoxedMeasure law;
  Members members;
};

MonteCarloRhs monte_carlo_rhs(const UrnState& state, const CouplingWindow& w,
                              double h, std::uint64_t samples, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("mc_samples must be positive");
  const auto d = static_cast<std::size_t>(state.dim());
  MonteCarloRhs out;
  out.points.resize(samples * d);
  std::vector<double> delta(d);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto base = state.color(uniform_below(rng, w.t_n) + 1);
    std::span<double> pt(out.points.data() + s * d, d);
    std::copy(base.begin(), base.end(), pt.begin());
    if (bernoulli(rng, w.p)) {
      sample_displacement_into(state.model(), rng, delta);
      for (std::size_t k = 0; k < d; ++k) pt[k] += delta[k];
    }
  }
  out.law = boxify_points(out.points, state.dim(), h);
  for (std::uint64_t s = 0; s < samples; ++s) {
    out.members[box_index(std::span<const double>(out.points).subspan(s * d, d),
                          h)]
        .push_back(s);
  }
  return out;
}

std::size_t pick(const std::vector<double>& cumulative, double total,
                 Rng& rng) {
  const double target = uniform_open01(rng) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<double> prefix_sums(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (s += w[i]);
  return c;
}

}  // namespace

std::string_view to_string(LawMode mode) {
  return mode == LawMode::kExactCdf ? "exact-cdf" : "monte-carlo";
}

LawMode parse_law_mode(std::string_view text) {
  if (text == "exact-cdf") return LawMode::kExactCdf;
  if (text == "monte-carlo") return LawMode::kMonteCarlo;
  throw std::invalid_argument("mode must be exact-cdf or monte-carlo, got '" +
                              std::string(text) + "'");
}

CouplingWindow coupling_window(std::uint64_t n, const ScheduleParams& params) {
  CouplingWindow w;
  w.n = n;
  w.t_n = big_time(n, params);
  w.t_next = big_time(n + 1, params);
  w.p = static_cast<double>(w.t_next - w.t_n) / static_cast<double>(w.t_next);
  return w;
}

double modif_probability_exact(const UrnState& state, std::uint64_t n,
                               const ScheduleParams& params) {
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  std::uint64_t fired = 0;
  for (std::uint64_t i = w.t_n + 1; i <= w.t_next; ++i) {
    if (state.parent(i) > w.t_n) ++fired;
  }
  return static_cast<double>(fired) / static_cast<double>(w.t_next);
}

ResampledWindow resampled_colors(const UrnState& state, std::uint64_t n,
                                 Rng& rng, const ScheduleParams& params) {
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  const auto d = static_cast<std::size_t>(state.dim());
  ResampledWindow out;
  out.colors.reserve((w.t_next - w.t_n) * d);
  std::vector<double> delta(d);
  for (std::uint64_t i = w.t_n + 1; i <= w.t_next; ++i) {
    if (state.parent(i) <= w.t_n) {
      const auto c = state.color(i);
      out.colors.insert(out.colors.end(), c.begin(), c.end());
      continue;
    }
    ++out.resampled;
    const auto base = state.color(uniform_below(rng, w.t_n) + 1);
    sample_displacement_into(state.model(), rng, delta);
    for (std::size_t k = 0; k < d; ++k)
      out.colors.push_back(base[k] + delta[k]);
  }
  return out;
}

BoxedMeasure lhs_box_law(const UrnState& state, std::uint64_t n, double h,
                         const ScheduleParams& params) {
  require_width(h);
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  return boxify_points(state.color_prefix(w.t_next), state.dim(), h);
}

BoxedMeasure rhs_box_law(const UrnState& state, std::uint64_t n, double h,
                         LawMode mode, std::uint64_t mc_samples, Rng& rng,
                         const ScheduleParams& params) {
  require_width(h);
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_n);
  if (mode == LawMode::kMonteCarlo) {
    return monte_carlo_rhs(state, w, h, mc_samples, rng).law;
  }
  require_exact(state);
  const std::uint64_t visible = std::min(state.size(), w.t_next);
  const ExactRhs rhs = exact_rhs(state, w, h, group_by_box(state, visible, h));
  BoxedMeasure out;
  out.h = h;
  out.dim = 1;
  for (std::size_t b = 0; b < rhs.boxes.size(); ++b) {
    const double mass = rhs.emp[b] + rhs.conv[b];
    if (mass > 0.0)
      out.masses.emplace_hint(out.masses.end(), rhs.boxes[b], mass);
  }
  out.overflow = rhs.overflow;
  return out;
}

std::pair<double, double> tail_mass(const UrnState& state, std::uint64_t n,
                                    double gamma, LawMode mode,
                                    std::uint64_t mc_samples, Rng& rng,
                                    const ScheduleParams& params) {
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  const double r = std::pow(static_cast<double>(n), gamma);

  std::uint64_t beyond_next = 0;
  std::uint64_t beyond_t = 0;
  for (std::uint64_t i = 1; i <= w.t_next; ++i) {
    if (sup_norm(state.color(i)) > r) {
      ++beyond_next;
      if (i <= w.t_n) ++beyond_t;
    }
  }
  const double t = static_cast<double>(w.t_n);
  const double t_next = static_cast<double>(w.t_next);
  const double lhs = static_cast<double>(beyond_next) / t_next;

  if (mode == LawMode::kMonteCarlo) {
    if (mc_samples == 0) throw std::invalid_argument("mc_samples must be > 0");
    const auto d = static_cast<std::size_t>(state.dim());
    std::vector<double> pt(d);
    std::vector<double> delta(d);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < mc_samples; ++s) {
      const auto base = state.color(uniform_below(rng, w.t_n) + 1);
      std::copy(base.begin(), base.end(), pt.begin());
      if (bernoulli(rng, w.p)) {
        sample_displacement_into(state.model(), rng, delta);
        for (std::size_t k = 0; k < d; ++k) pt[k] += delta[k];
      }
      if (sup_norm(pt) > r) ++hits;
    }
    return {lhs, static_cast<double>(hits) / static_cast<double>(mc_samples)};
  }

  require_exact(state);
  double conv = 0.0;
  for (double x : state.color_prefix(w.t_n)) {
    conv += shifted_tail(state.model(), x, r);
  }
  const double p = static_cast<double>(w.t_next - w.t_n) / t_next;
  const double rhs = static_cast<double>(beyond_t) / t_next + p * conv / t;
  return {lhs, std::min(1.0, rhs)};
}

TailEstimate tail_record_estimate(const DisplacementModel& model,
                                  std::uint64_t n, double gamma,
                                  std::uint64_t samples, Rng& rng) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  const double r = std::pow(std::log(static_cast<double>(n)), gamma);
  TailEstimate est;
  est.samples = samples;
  for (std::uint64_t s = 0; s < samples; ++s) {
    if (sup_norm(record_rep_sample(model, n, rng).value) > r) {
      ++est.exceedances;
    }
  }
  const double k = static_cast<double>(samples);
  est.probability = static_cast<double>(est.exceedances) / k;
  est.radius95 =
      1.959964 * std::sqrt(est.probability * (1.0 - est.probability) / k);
  return est;
}

double default_gamma(const DisplacementModel& model) {
  return 3.0 * model.beta + 1.0;
}

CouplingReport main2_discrepancy(const UrnState& state, std::uint64_t n,
                                 double h, LawMode mode, double gamma,
                                 std::uint64_t mc_samples, Rng& rng,
                                 const ScheduleParams& params) {
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  if (gamma <= 0.0) gamma = default_gamma(state.model());

  CouplingReport report;
  report.n = n;
  report.t_n = w.t_n;
  report.t_next = w.t_next;
  report.h = h;
  report.mode = mode;
  report.gamma = gamma;

  const BoxedMeasure lhs = lhs_box_law(state, n, h, params);
  const BoxedMeasure rhs =
      rhs_box_law(state, n, h, mode, mc_samples, rng, params);
  report.discrepancy = l1_box_discrepancy(lhs, rhs);
  report.occupied_boxes = lhs.masses.size();
  report.rhs_overflow = rhs.overflow;
  report.benchmark = 3.0 * std::pow(static_cast<double>(n), -4.0 / 3.0);
  report.modif_prob = modif_probability_exact(state, n, params);
  report.modif_benchmark = w.p * w.p;
  std::tie(report.tail_lhs, report.tail_rhs) =
      tail_mass(state, n, gamma, mode, mc_samples, rng, params);
  return report;
}

CoupledSamples couple_samples(const UrnState& state, std::uint64_t n, double h,
                              std::uint64_t k, LawMode mode,
                              std::uint64_t mc_samples, Rng& rng,
                              const ScheduleParams& params) {
  require_width(h);
  const CouplingWindow w = coupling_window(n, params);
  require_urn(state, w.t_next);
  const auto d = static_cast<std::size_t>(state.dim());
  const DisplacementModel& model = state.model();

  const Members lhs_members = group_by_box(state, w.t_next, h);
  const double t_next = static_cast<double>(w.t_next);

  // Both laws on the lhs support, rhs overflow kept separately.
  std::vector<BoxIndex> boxes;
  std::vector<double> lhs_mass;
  std::vector<double> rhs_mass;
  std::vector<double> rhs_emp;  // exact mode: empirical part per box
  double overflow = 0.0;
  ExactRhs exact;
  MonteCarloRhs mc;
  if (mode == LawMode::kExactCdf) {
    require_exact(state);
    exact = exact_rhs(state, w, h, lhs_members);
    boxes = exact.boxes;
    rhs_emp = exact.emp;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      rhs_mass.push_back(exact.emp[b] + exact.conv[b]);
    }
    overflow = exact.overflow;
  } else {
    mc = monte_carlo_rhs(state, w, h, mc_samples, rng);
    for (const auto& [box, idx] : lhs_members) boxes.push_back(box);
    for (const auto& [box, mass] : mc.law.masses) {
      if (!lhs_members.count(box)) boxes.push_back(box);
    }
    std::sort(boxes.begin(), boxes.end());
    for (const auto& box : boxes) rhs_mass.push_back(mc.law.mass_at(box));
  }
  for (const auto& box : boxes) {
    auto it = lhs_members.find(box);
    lhs_mass.push_back(it == lhs_members.end()
                           ? 0.0
                           : static_cast<double>(it->second.size()) / t_next);
  }

  std::vector<double> match_w(boxes.size());
  std::vector<double> pos_w(boxes.size() + 1);  // last slot: overflow
  std::vector<double> neg_w(boxes.size());
  double discrepancy = overflow;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    match_w[b] = std::min(lhs_mass[b], rhs_mass[b]);
    pos_w[b] = std::max(rhs_mass[b] - lhs_mass[b], 0.0);
    neg_w[b] = std::max(lhs_mass[b] - rhs_mass[b], 0.0);
    discrepancy += std::abs(lhs_mass[b] - rhs_mass[b]);
  }
  pos_w.back() = overflow;
  const auto match_c = prefix_sums(match_w);
  const auto pos_c = prefix_sums(pos_w);
  const auto neg_c = prefix_sums(neg_w);
  const double match_total = match_c.empty() ? 0.0 : match_c.back();
  const double pos_total = pos_c.back();
  const double neg_total = neg_c.empty() ? 0.0 : neg_c.back();

  const auto prefix = state.color_prefix(w.t_n);
  // Per-box cumulative convolution weights over the prefix atoms.
  std::map<std::size_t, std::vector<double>> conv_cache;
  std::size_t cached_doubles = 0;
  constexpr std::size_t kCacheLimit = std::size_t{1} << 24;

  auto lhs_in_box = [&](std::size_t b, std::span<double> out) {
    const auto& idx = lhs_members.at(boxes[b]);
    const auto c = state.color(idx[uniform_below(rng, idx.size())] + 1);
    std::copy(c.begin(), c.end(), out.begin());
  };

  auto conv_draw_in_box = [&](std::size_t b, std::span<double> out) {
    const std::int64_t i = boxes[b][0];
    const double lo = static_cast<double>(i) * h;
    const double hi = static_cast<double>(i + 1) * h;
    std::vector<double> local;
    const std::vector<double>* weights = nullptr;
    if (auto it = conv_cache.find(b); it != conv_cache.end()) {
      weights = &it->second;
    } else {
      local.resize(prefix.size());
      double s = 0.0;
      for (std::size_t j = 0; j < prefix.size(); ++j) {
        local[j] =
            (s += interval_probability(model, lo - prefix[j], hi - prefix[j]));
      }
      if (cached_doubles + local.size() <= kCacheLimit) {
        cached_doubles += local.size();
        weights = &conv_cache.emplace(b, std::move(local)).first->second;
      } else {
        weights = &local;
      }
    }
    const std::size_t j = pick(*weights, weights->back(), rng);
    const double x = prefix[j];
    const double delta = model.kind == DisplacementKind::kPointMass
                             ? model.location
                             : sample_in_interval(model, lo - x, hi - x, rng);
    out[0] = snap_into_box(x + delta, i, h);
  };

  auto rhs_in_box = [&](std::size_t b, std::span<double> out) {
    if (mode == LawMode::kMonteCarlo) {
      const auto& idx = mc.members.at(boxes[b]);
      const std::size_t s = idx[uniform_below(rng, idx.size())];
      std::copy_n(mc.points.begin() + static_cast<std::ptrdiff_t>(s * d), d,
                  out.begin());
      return;
    }
    if (uniform_open01(rng) * rhs_mass[b] < rhs_emp[b]) {
      // Empirical part: uniform among balls 1..T_n in this box.
      const auto& idx = lhs_members.at(boxes[b]);
      const auto below = static_cast<std::uint64_t>(
          std::lower_bound(idx.begin(), idx.end(), w.t_n) - idx.begin());
      out[0] = state.color(idx[uniform_below(rng, below)] + 1)[0];
      return;
    }
    conv_draw_in_box(b, out);
  };

  auto rhs_outside = [&](std::span<double> out) {
    // Convolution part conditioned to leave the evaluated boxes.
    for (;;) {
      const double x = prefix[uniform_below(rng, w.t_n)];
      const double y = x + sample_scalar(model, rng);
      if (!lhs_members.count(box_index(std::span<const double>(&y, 1), h))) {
        out[0] = y;
        return;
      }
    }
  };

  CoupledSamples result;
  result.dim = state.dim();
  result.discrepancy = discrepancy;
  result.a.resize(k * d);
  result.b.resize(k * d);
  result.matched.resize(k);
  for (std::uint64_t s = 0; s < k; ++s) {
    std::span<double> a(result.a.data() + s * d, d);
    std::span<double> b(result.b.data() + s * d, d);
    if (uniform_open01(rng) * (match_total + pos_total) < match_total) {
      const std::size_t box = pick(match_c, match_total, rng);
      rhs_in_box(box, a);
      lhs_in_box(box, b);
      result.matched[s] = true;
      continue;
    }
    ++result.mismatches;
    const std::size_t pa = pick(pos_c, pos_total, rng);
    if (pa == boxes.size()) {
      rhs_outside(a);
    } else {
      rhs_in_box(pa, a);
    }
    lhs_in_box(pick(neg_c, neg_total, rng), b);
  }
  return result;
}

}  // namespace urnlab
