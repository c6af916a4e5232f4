// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <concepts>

#include "corridor/random.hpp"

namespace corridor {

/// Contract shared by the channel building blocks: pdf, cdf, sampler, mean.
template <class D>
concept Distribution = requires(const D& d, double x, RandomStream& rng) {
  { d.pdf(x) } -> std::convertible_to<double>;
  { d.cdf(x) } -> std::convertible_to<double>;
  { d.sample(rng) } -> std::convertible_to<double>;
  { d.mean() } -> std::convertible_to<double>;
};

/// Inverse-gamma shadowing S with shape q > 1 and scale gamma:
/// f(x) = gamma^q / (Gamma(q) x^(q+1)) exp(-gamma / x).
class InverseGamma {
 public:
  InverseGamma(double q, double gamma);

  double shape() const noexcept { return q_; }
  double scale() const noexcept { return gamma_; }

  double pdf(double x) const noexcept;
  /// d pdf / dx.
  double pdf_derivative(double x) const noexcept;
  double cdf(double x) const noexcept;
  double ccdf(double x) const noexcept;
  double quantile(double p) const;
  /// Value exceeded with probability p.
  double upper_quantile(double p) const;
  /// E[S ; S <= x] = gamma * Q(q - 1, gamma / x) / (q - 1).
  double partial_mean(double x) const noexcept;

  double mean() const noexcept { return gamma_ / (q_ - 1.0); }
  double mode() const noexcept { return gamma_ / (q_ + 1.0); }
  double median() const;

  /// Reciprocal of a Gamma(q, 1/gamma) variate.
  double sample(RandomStream& rng) const noexcept { return gamma_ / rng.gamma(q_); }

 private:
  double q_;
  double gamma_;
  double log_norm_;  // q log(gamma) - lgamma(q)
};

/// Nakagami-m power gain h ~ Gamma(m, 1/m), unit mean.
class GammaFading {
 public:
  explicit GammaFading(double m);

  double shape() const noexcept { return m_; }

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// P(h > x) = Q(m, m x).
  double ccdf(double x) const noexcept;
  double mean() const noexcept { return 1.0; }

  double sample(RandomStream& rng) const noexcept { return rng.gamma(m_) / m_; }

 private:
  double m_;
  double log_norm_;  // m log(m) - lgamma(m)
};

static_assert(Distribution<InverseGamma>);
static_assert(Distribution<GammaFading>);

/// Rising factorial (a)_k = a (a+1) ... (a+k-1).
double rising_factorial(double a, int k) noexcept;

}  // namespace corridor
