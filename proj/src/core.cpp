// SPDX-License-Identifier: Apache-2.0
#include "corridor/core.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "corridor/errors.hpp"

namespace corridor {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

EmpiricalHeight::EmpiricalHeight(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  sorted = std::make_shared<const std::vector<double>>(std::move(samples));
}

void validate(const HeightModel& model) {
  std::visit(overloaded{
                 [](const FixedHeight& m) {
                   if (!(m.h > 0.0)) throw ParameterError("fixed height must be > 0");
                 },
                 [](const UniformHeight& m) {
                   if (!(m.lo > 0.0 && m.lo < m.hi))
                     throw ParameterError("uniform height requires 0 < h_lo < h_hi");
                 },
                 [](const NormalHeight& m) {
                   if (!(m.mu > 0.0 && m.sigma > 0.0))
                     throw ParameterError("normal height requires mu > 0 and sigma > 0");
                 },
                 [](const EmpiricalHeight& m) {
                   if (!m.sorted || m.sorted->empty() || !(m.sorted->front() > 0.0))
                     throw ParameterError("empirical heights must be non-empty and positive");
                 },
             },
             model);
}

double mean_height(const HeightModel& model) {
  return std::visit(overloaded{
                        [](const FixedHeight& m) { return m.h; },
                        [](const UniformHeight& m) { return 0.5 * (m.lo + m.hi); },
                        [](const NormalHeight& m) {
                          // mean of the normal truncated to (0, inf)
                          const boost::math::normal_distribution<double> z;
                          const double a = -m.mu / m.sigma;
                          const double tail = boost::math::cdf(complement(z, a));
                          return m.mu + m.sigma * boost::math::pdf(z, a) / tail;
                        },
                        [](const EmpiricalHeight& m) {
                          return std::accumulate(m.sorted->begin(), m.sorted->end(), 0.0) /
                                 static_cast<double>(m.sorted->size());
                        },
                    },
                    model);
}

bool is_fixed(const HeightModel& model) noexcept {
  return std::holds_alternative<FixedHeight>(model);
}

double height_from_uniform(const HeightModel& model, double u) {
  return std::visit(overloaded{
                        [](const FixedHeight& m) { return m.h; },
                        [u](const UniformHeight& m) { return m.lo + (m.hi - m.lo) * u; },
                        [u](const NormalHeight& m) {
                          const boost::math::normal_distribution<double> z;
                          const double lower = boost::math::cdf(z, -m.mu / m.sigma);
                          const double p = lower + u * (1.0 - lower);
                          return m.mu + m.sigma * boost::math::quantile(z, p);
                        },
                        [u](const EmpiricalHeight& m) {
                          const auto n = m.sorted->size();
                          const auto i =
                              std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
                          return (*m.sorted)[i];
                        },
                    },
                    model);
}

std::string describe(const HeightModel& model) {
  std::ostringstream os;
  std::visit(
      overloaded{
          [&](const FixedHeight& m) { os << "fixed(" << m.h << ")"; },
          [&](const UniformHeight& m) { os << "uniform(" << m.lo << "," << m.hi << ")"; },
          [&](const NormalHeight& m) { os << "normal(" << m.mu << "," << m.sigma << ")"; },
          [&](const EmpiricalHeight& m) { os << "empirical(" << m.sorted->size() << " samples)"; },
      },
      model);
  return os.str();
}

CorridorGeometry::CorridorGeometry(double half_length, HeightModel height)
    : half_length_(half_length), height_(std::move(height)) {
  if (!(half_length_ > 0.0)) {
    throw ParameterError("corridor half-length R must be > 0");
  }
  validate(height_);
}

double CorridorGeometry::fixed_height() const {
  if (const auto* fixed = std::get_if<FixedHeight>(&height_)) {
    return fixed->h;
  }
  throw ParameterError("operation requires a fixed-height corridor, got " + describe(height_));
}

double CorridorGeometry::max_distance() const {
  const double h = fixed_height();
  return std::hypot(h, half_length_);
}

double carrier_factor(double carrier_frequency_hz) {
  if (!(carrier_frequency_hz > 0.0)) {
    throw ParameterError("carrier frequency must be > 0");
  }
  const double r = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_frequency_hz);
  return r * r;
}

double ChannelParams::carrier_factor() const noexcept {
  return carrier_frequency_hz ? corridor::carrier_factor(*carrier_frequency_hz) : 1.0;
}

void ChannelParams::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("path-loss exponent alpha must be > 0");
  if (!(q > 1.0)) throw ParameterError("shadowing shape q must be > 1 (mean undefined otherwise)");
  if (!(shadowing_scale() > 0.0)) throw ParameterError("shadowing scale gamma must be > 0");
  if (!(m > 0.0)) throw ParameterError("fading shape m must be > 0");
  if (carrier_frequency_hz && !(*carrier_frequency_hz > 0.0))
    throw ParameterError("carrier frequency must be > 0");
}

bool ChannelParams::has_integer_m() const noexcept {
  return std::isfinite(m) && m >= 1.0 && m == std::floor(m);
}

void ChannelParams::validate_integer_m() const {
  validate();
  if (!has_integer_m()) {
    throw ParameterError("analytic engine requires integer m >= 1");
  }
}

double path_loss(double d, const ChannelParams& params) {
  if (!(d > 0.0)) {
    throw DomainError("path_loss: distance must be > 0");
  }
  return params.carrier_factor() * std::pow(d, -params.alpha);
}

void validate(const SpatialModel& model) {
  std::visit(overloaded{
                 [](const Bpp& m) {
                   if (m.n < 1) throw ParameterError("BPP requires N >= 1");
                 },
                 [](const FiniteHppp& m) {
                   if (!(m.lambda > 0.0)) throw ParameterError("HPPP requires lambda > 0");
                 },
                 [](const Disc2D& m) {
                   if (m.n < 1) throw ParameterError("disc baseline requires N >= 1");
                 },
             },
             model);
}

std::string describe(const SpatialModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Bpp& m) { os << "bpp(N=" << m.n << ")"; },
                 [&](const FiniteHppp& m) { os << "hppp(lambda=" << m.lambda << ")"; },
                 [&](const Disc2D& m) { os << "disc2d(N=" << m.n << ")"; },
             },
             model);
  return os.str();
}

LinkDistance::LinkDistance(double h, double half_length)
    : h_(h), half_length_(half_length), d_max_(std::hypot(h, half_length)) {
  if (!(h > 0.0) || !(half_length > 0.0)) {
    throw ParameterError("link distance requires h > 0 and R > 0");
  }
}

double LinkDistance::pdf(double d) const noexcept {
  if (!(d > h_) || d > d_max_) {
    return 0.0;
  }
  return d / (half_length_ * std::sqrt(d * d - h_ * h_));
}

double LinkDistance::cdf(double d) const noexcept {
  if (d <= h_) return 0.0;
  if (d >= d_max_) return 1.0;
  return std::sqrt(d * d - h_ * h_) / half_length_;
}

double LinkDistance::from_offset(double y) const noexcept { return std::hypot(y, h_); }

double pathloss_value_pdf(double x, double h, double half_length, double alpha) {
  if (!(h > 0.0) || !(half_length > 0.0) || !(alpha > 0.0)) {
    throw ParameterError("pathloss_value_pdf requires h, R, alpha > 0");
  }
  const double lo = std::pow(h * h + half_length * half_length, -alpha / 2.0);
  const double hi = std::pow(h, -alpha);
  if (!(x >= lo) || !(x < hi)) {
    return 0.0;
  }
  const double radicand = std::pow(x, -2.0 / alpha) - h * h;
  if (!(radicand > 0.0)) {
    return 0.0;
  }
  return std::pow(x, -(alpha + 2.0) / alpha) / (alpha * half_length * std::sqrt(radicand));
}

}  // namespace corridor
