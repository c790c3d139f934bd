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

#include "urnlab/displacement.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace urnlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_cdf_kind(const DisplacementModel& m) {
  switch (m.kind) {
    case DisplacementKind::kPointMass:
    case DisplacementKind::kGaussian:
    case DisplacementKind::kCauchy:
      return true;
    case DisplacementKind::kSymmetricStable:
      return m.index == 1.0 || m.index == 2.0;
    default:
      return false;
  }
}

// Stable laws at index 1 and 2 reduce to Cauchy and Gaussian.
enum class Shape { kAtom, kNormal, kCauchy, kOther };

struct Reduced {
  Shape shape;
  double scale;  // standard deviation for kNormal, scale for kCauchy
};

Reduced reduce(const DisplacementModel& m) {
  switch (m.kind) {
    case DisplacementKind::kPointMass:
      return {Shape::kAtom, 0.0};
    case DisplacementKind::kGaussian:
      return {Shape::kNormal, m.scale};
    case DisplacementKind::kCauchy:
      return {Shape::kCauchy, m.scale};
    case DisplacementKind::kSymmetricStable:
      if (m.index == 1.0) return {Shape::kCauchy, m.scale};
      if (m.index == 2.0) return {Shape::kNormal, m.scale * kSqrt2};
      return {Shape::kOther, m.scale};
    default:
      return {Shape::kOther, m.scale};
  }
}

// Standard Cauchy F(z) and 1 - F(z), accurate in both tails.
double cauchy_lower(double z) { return std::atan2(1.0, -z) / kPi; }
double cauchy_upper(double z) { return std::atan2(1.0, z) / kPi; }

double normal_lower(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double normal_upper(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double coordinate_cdf(const DisplacementModel& m, double x) {
  const Reduced r = reduce(m);
  switch (r.shape) {
    case Shape::kAtom:
      return x >= m.location ? 1.0 : 0.0;
    case Shape::kNormal:
      return normal_lower(x / r.scale);
    case Shape::kCauchy:
      return cauchy_lower(x / r.scale);
    case Shape::kOther:
      break;
  }
  throw CdfUnavailable("no closed-form CDF for this displacement kind");
}

double standard_interval(Shape shape, double a, double b) {
  if (!(a < b)) return 0.0;
  if (shape == Shape::kCauchy) {
    if (std::isinf(b)) return cauchy_upper(a);
    if (std::isinf(a)) return cauchy_lower(b);
    const double ab = a * b;
    if (ab > -1.0) return std::atan((b - a) / (1.0 + ab)) / kPi;
    return (std::atan(b) - std::atan(a)) / kPi;
  }
  // Gaussian: subtract in whichever tail keeps both terms small.
  if (a >= 0.0) return normal_upper(a) - normal_upper(b);
  if (b <= 0.0) return normal_lower(b) - normal_lower(a);
  return 1.0 - normal_lower(a) - normal_upper(b);
}

double standard_quantile(Shape shape, double u) {
  if (shape == Shape::kCauchy) {
    if (u <= 0.5) return -1.0 / std::tan(kPi * u);
    return 1.0 / std::tan(kPi * (1.0 - u));
  }
  return -kSqrt2 * boost::math::erfc_inv(2.0 * u);
}

// C_a from the stable domain-of-attraction normalization of a symmetric
// power tail P(|X| > x) ~ c x^-a: sums scale like (c / C_a)^(1/a) n^(1/a).
double stable_tail_constant(double a) {
  if (a == 1.0) return 2.0 / kPi;
  return (1.0 - a) / (std::tgamma(2.0 - a) * std::cos(kPi * a / 2.0));
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view spec) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ModelSpecError("bad number '" + std::string(text) +
                         "' in model spec '" + std::string(spec) + "'");
  }
  return v;
}

struct KindName {
  DisplacementKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {DisplacementKind::kPointMass, "point-mass"},
    {DisplacementKind::kGaussian, "gaussian"},
    {DisplacementKind::kCauchy, "cauchy"},
    {DisplacementKind::kSymmetricStable, "symmetric-stable"},
    {DisplacementKind::kSymmetricPareto, "symmetric-pareto"},
    {DisplacementKind::kRademacher, "rademacher"},
};

}  // namespace

DisplacementModel DisplacementModel::point_mass(double c, int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kPointMass;
  m.location = c;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

DisplacementModel DisplacementModel::gaussian(double sigma, int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kGaussian;
  m.scale = sigma;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

DisplacementModel DisplacementModel::cauchy(double scale, int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kCauchy;
  m.scale = scale;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

DisplacementModel DisplacementModel::symmetric_stable(double index,
                                                      double scale, int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kSymmetricStable;
  m.index = index;
  m.scale = scale;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

DisplacementModel DisplacementModel::symmetric_pareto(double tail, double scale,
                                                      int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kSymmetricPareto;
  m.index = tail;
  m.scale = scale;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

DisplacementModel DisplacementModel::rademacher(int dim) {
  DisplacementModel m;
  m.kind = DisplacementKind::kRademacher;
  m.dim = dim;
  m.beta = minimal_beta(m) + 1.0;
  m.validate();
  return m;
}

void DisplacementModel::validate() const {
  require(dim >= 1, "dimension must be at least 1");
  require(std::isfinite(location), "point-mass location must be finite");
  switch (kind) {
    case DisplacementKind::kGaussian:
    case DisplacementKind::kCauchy:
      require(scale > 0.0 && std::isfinite(scale), "scale must be positive");
      break;
    case DisplacementKind::kSymmetricStable:
      require(index > 0.0 && index <= 2.0, "stable index must be in (0, 2]");
      require(scale > 0.0 && std::isfinite(scale), "scale must be positive");
      break;
    case DisplacementKind::kSymmetricPareto:
      require(index > 0.0 && std::isfinite(index),
              "pareto tail index must be positive");
      require(scale > 0.0 && std::isfinite(scale), "scale must be positive");
      break;
    default:
      break;
  }
  require(std::isfinite(beta) && beta > minimal_beta(*this),
          "beta must exceed the minimal admissible tail exponent");
}

bool DisplacementModel::has_cdf() const {
  return dim == 1 && is_cdf_kind(*this);
}

bool DisplacementModel::is_continuous() const {
  return kind != DisplacementKind::kPointMass &&
         kind != DisplacementKind::kRademacher;
}

double minimal_beta(const DisplacementModel& model) {
  switch (model.kind) {
    case DisplacementKind::kCauchy:
      return 1.0;
    case DisplacementKind::kSymmetricStable:
      return model.index < 2.0 ? 1.0 / model.index : 0.0;
    case DisplacementKind::kSymmetricPareto:
      return 1.0 / model.index;
    default:
      return 0.0;
  }
}

DisplacementModel parse_model(std::string_view spec) {
  const std::string_view full = spec;
  std::string_view head = spec;
  std::string_view rest;
  if (auto semi = spec.find(';'); semi != std::string_view::npos) {
    head = spec.substr(0, semi);
    rest = spec.substr(semi + 1);
  }
  head = trim(head);

  std::string_view name = head;
  std::map<std::string, double, std::less<>> params;
  if (auto open = head.find('('); open != std::string_view::npos) {
    if (head.back() != ')') {
      throw ModelSpecError("missing ')' in model spec '" + std::string(full) +
                           "'");
    }
    name = trim(head.substr(0, open));
    std::string_view body = head.substr(open + 1, head.size() - open - 2);
    while (!trim(body).empty()) {
      const auto comma = body.find(',');
      std::string_view item = body.substr(0, comma);
      body = comma == std::string_view::npos ? std::string_view{}
                                             : body.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw ModelSpecError("expected key=value in model spec '" +
                             std::string(full) + "'");
      }
      std::string key(trim(item.substr(0, eq)));
      const double value = parse_number(item.substr(eq + 1), full);
      if (!params.emplace(key, value).second) {
        throw ModelSpecError("duplicate parameter '" + key +
                             "' in model spec '" + std::string(full) + "'");
      }
    }
  }

  int dim = 1;
  std::optional<double> beta;
  while (!trim(rest).empty()) {
    const auto semi = rest.find(';');
    std::string_view item = rest.substr(0, semi);
    rest = semi == std::string_view::npos ? std::string_view{}
                                          : rest.substr(semi + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ModelSpecError("expected key=value after ';' in model spec '" +
                           std::string(full) + "'");
    }
    const std::string_view key = trim(item.substr(0, eq));
    const double value = parse_number(item.substr(eq + 1), full);
    if (key == "d") {
      if (value != std::floor(value) || value < 1 || value > 1e6) {
        throw ModelSpecError("d must be a positive integer in model spec '" +
                             std::string(full) + "'");
      }
      dim = static_cast<int>(value);
    } else if (key == "beta") {
      beta = value;
    } else {
      throw ModelSpecError("unknown option '" + std::string(key) +
                           "' in model spec '" + std::string(full) + "'");
    }
  }

  auto take = [&](std::string_view key, std::optional<double> fallback) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (!fallback) {
        throw ModelSpecError("missing parameter '" + std::string(key) +
                             "' in model spec '" + std::string(full) + "'");
      }
      return *fallback;
    }
    const double v = it->second;
    params.erase(it);
    return v;
  };

  DisplacementModel m;
  try {
    if (name == "point-mass") {
      m = DisplacementModel::point_mass(take("c", 0.0), dim);
    } else if (name == "gaussian") {
      m = DisplacementModel::gaussian(take("sigma", 1.0), dim);
    } else if (name == "cauchy") {
      m = DisplacementModel::cauchy(take("scale", 1.0), dim);
    } else if (name == "symmetric-stable") {
      const double index = take("index", std::nullopt);
      m = DisplacementModel::symmetric_stable(index, take("scale", 1.0), dim);
    } else if (name == "symmetric-pareto") {
      const double tail = take("tail", std::nullopt);
      m = DisplacementModel::symmetric_pareto(tail, take("scale", 1.0), dim);
    } else if (name == "rademacher") {
      m = DisplacementModel::rademacher(dim);
    } else {
      throw ModelSpecError("unknown displacement kind '" + std::string(name) +
                           "'");
    }
    if (!params.empty()) {
      throw ModelSpecError("unknown parameter '" + params.begin()->first +
                           "' for kind '" + std::string(name) + "'");
    }
    if (beta) {
      m.beta = *beta;
      m.validate();
    }
  } catch (const ModelSpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ModelSpecError(std::string(e.what()) + " in model spec '" +
                         std::string(full) + "'");
  }
  return m;
}

std::string format_model(const DisplacementModel& m) {
  std::string out;
  for (const auto& kn : kKindNames) {
    if (kn.kind == m.kind) out = std::string(kn.name);
  }
  switch (m.kind) {
    case DisplacementKind::kPointMass:
      out += "(c=" + format_double(m.location) + ")";
      break;
    case DisplacementKind::kGaussian:
      out += "(sigma=" + format_double(m.scale) + ")";
      break;
    case DisplacementKind::kCauchy:
      out += "(scale=" + format_double(m.scale) + ")";
      break;
    case DisplacementKind::kSymmetricStable:
      out += "(index=" + format_double(m.index) +
             ",scale=" + format_double(m.scale) + ")";
      break;
    case DisplacementKind::kSymmetricPareto:
      out += "(tail=" + format_double(m.index) +
             ",scale=" + format_double(m.scale) + ")";
      break;
    case DisplacementKind::kRademacher:
      out += "()";
      break;
  }
  out += ";d=" + std::to_string(m.dim);
  if (m.beta != minimal_beta(m) + 1.0) out += ";beta=" + format_double(m.beta);
  return out;
}

StableLimit stable_limit(const DisplacementModel& m) {
  StableLimit limit;
  limit.beta = m.beta;
  switch (m.kind) {
    case DisplacementKind::kPointMass:
      limit.alpha = 1.0;
      limit.limit_law = DisplacementModel::point_mass(m.location, m.dim);
      break;
    case DisplacementKind::kGaussian:
      limit.alpha = 0.5;
      limit.limit_law = DisplacementModel::gaussian(m.scale, m.dim);
      break;
    case DisplacementKind::kCauchy:
      limit.alpha = 1.0;
      limit.limit_law = DisplacementModel::cauchy(m.scale, m.dim);
      break;
    case DisplacementKind::kSymmetricStable:
      limit.alpha = 1.0 / m.index;
      limit.limit_law =
          DisplacementModel::symmetric_stable(m.index, m.scale, m.dim);
      break;
    case DisplacementKind::kRademacher:
      limit.alpha = 0.5;
      limit.limit_law = DisplacementModel::gaussian(1.0, m.dim);
      break;
    case DisplacementKind::kSymmetricPareto: {
      const double a = m.index;
      if (a < 2.0) {
        limit.alpha = 1.0 / a;
        const double sigma =
            m.scale * std::pow(stable_tail_constant(a), -1.0 / a);
        limit.limit_law = DisplacementModel::symmetric_stable(a, sigma, m.dim);
      } else if (a > 2.0) {
        limit.alpha = 0.5;
        limit.limit_law = DisplacementModel::gaussian(
            m.scale * std::sqrt(a / (a - 2.0)), m.dim);
      } else {
        throw std::domain_error(
            "symmetric-pareto with tail index 2 has no power normalization");
      }
      break;
    }
  }
  return limit;
}

double stable_sampler(double index, double scale, Rng& rng) {
  if (!(index > 0.0 && index <= 2.0)) {
    throw std::invalid_argument("stable index must be in (0, 2]");
  }
  const double v = kPi * (uniform_open01(rng) - 0.5);
  if (index == 1.0) return scale * std::tan(v);
  const double w = -std::log(uniform_open01(rng));
  const double x =
      std::sin(index * v) / std::pow(std::cos(v), 1.0 / index) *
      std::pow(std::cos((1.0 - index) * v) / w, (1.0 - index) / index);
  return scale * x;
}

double sample_scalar(const DisplacementModel& m, Rng& rng) {
  switch (m.kind) {
    case DisplacementKind::kPointMass:
      return m.location;
    case DisplacementKind::kGaussian:
      return std::normal_distribution<double>(0.0, m.scale)(rng);
    case DisplacementKind::kCauchy:
      return m.scale * std::tan(kPi * (uniform_open01(rng) - 0.5));
    case DisplacementKind::kSymmetricStable:
      return stable_sampler(m.index, m.scale, rng);
    case DisplacementKind::kSymmetricPareto: {
      const double sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
      return sign * m.scale * std::pow(uniform_open01(rng), -1.0 / m.index);
    }
    case DisplacementKind::kRademacher:
      return bernoulli(rng, 0.5) ? 1.0 : -1.0;
  }
  return 0.0;
}

void sample_displacement_into(const DisplacementModel& model, Rng& rng,
                              std::span<double> out) {
  for (double& x : out) x = sample_scalar(model, rng);
}

std::vector<double> sample_displacement(const DisplacementModel& model,
                                        Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(model.dim));
  sample_displacement_into(model, rng, out);
  return out;
}

std::vector<double> sample_limit(const StableLimit& limit, Rng& rng) {
  return sample_displacement(limit.limit_law, rng);
}

double cdf_displacement(const DisplacementModel& model, double x) {
  if (model.dim != 1) {
    throw CdfUnavailable("CDF is only exposed for d = 1");
  }
  return coordinate_cdf(model, x);
}

double cdf_left_displacement(const DisplacementModel& model, double x) {
  if (model.dim == 1 && model.kind == DisplacementKind::kPointMass) {
    return x > model.location ? 1.0 : 0.0;
  }
  return cdf_displacement(model, x);
}

double interval_probability(const DisplacementModel& model, double lo,
                            double hi) {
  const Reduced r = reduce(model);
  switch (r.shape) {
    case Shape::kAtom:
      return (lo <= model.location && model.location < hi) ? 1.0 : 0.0;
    case Shape::kNormal:
      return standard_interval(Shape::kNormal, lo / r.scale, hi / r.scale);
    case Shape::kCauchy:
      return standard_interval(Shape::kCauchy, lo / r.scale, hi / r.scale);
    case Shape::kOther:
      break;
  }
  throw CdfUnavailable("no closed-form CDF for this displacement kind");
}

double sample_in_interval(const DisplacementModel& model, double lo, double hi,
                          Rng& rng) {
  const Reduced r = reduce(model);
  if (r.shape != Shape::kNormal && r.shape != Shape::kCauchy) {
    throw CdfUnavailable("conditional sampling needs a continuous CDF");
  }
  // Reflect into the lower half so both CDF values stay small.
  const bool reflect = lo >= 0.0;
  double a = (reflect ? -hi : lo) / r.scale;
  double b = (reflect ? -lo : hi) / r.scale;
  auto lower = [&](double z) {
    return r.shape == Shape::kCauchy ? cauchy_lower(z) : normal_lower(z);
  };
  const double fa = lower(a);
  const double fb = lower(b);
  const double u = fa + uniform_open01(rng) * (fb - fa);
  double z = standard_quantile(r.shape, std::clamp(u, fa, fb));
  z = std::clamp(z, a, b);
  double x = (reflect ? -z : z) * r.scale;
  // Keep the half-open convention [lo, hi).
  if (x >= hi) x = std::nextafter(hi, lo);
  if (x < lo) x = lo;
  return x;
}

std::optional<double> tail_probability(const DisplacementModel& model,
                                       double r) {
  double q = 0.0;
  if (model.kind == DisplacementKind::kPointMass) {
    q = std::abs(model.location) > r ? 1.0 : 0.0;
  } else if (model.kind == DisplacementKind::kRademacher) {
    q = r < 1.0 ? 1.0 : 0.0;
  } else if (model.kind == DisplacementKind::kSymmetricPareto) {
    q = r < model.scale ? 1.0 : std::pow(r / model.scale, -model.index);
  } else {
    const Reduced red = reduce(model);
    if (red.shape == Shape::kOther) return std::nullopt;
    if (r <= 0.0) {
      q = 1.0;
    } else if (red.shape == Shape::kNormal) {
      q = std::erfc(r / (red.scale * kSqrt2));
    } else {
      q = 2.0 * std::atan2(red.scale, r) / kPi;
    }
  }
  if (q >= 1.0) return 1.0;
  return -std::expm1(model.dim * std::log1p(-q));
}

}  // namespace urnlab
