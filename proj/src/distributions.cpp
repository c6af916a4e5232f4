// SPDX-License-Identifier: Apache-2.0
#include "corridor/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "corridor/errors.hpp"

namespace corridor {

InverseGamma::InverseGamma(double q, double gamma) : q_(q), gamma_(gamma) {
  if (!(q > 1.0)) {
    throw ParameterError(
        "inverse-gamma shape q must be > 1 (unit-mean normalization needs a mean)");
  }
  if (!(gamma > 0.0)) {
    throw ParameterError("inverse-gamma scale must be > 0");
  }
  log_norm_ = q * std::log(gamma) - std::lgamma(q);
}

double InverseGamma::pdf(double x) const noexcept {
  if (!(x > 0.0) || std::isinf(x)) {
    return 0.0;
  }
  return std::exp(log_norm_ - (q_ + 1.0) * std::log(x) - gamma_ / x);
}

double InverseGamma::pdf_derivative(double x) const noexcept {
  if (!(x > 0.0) || std::isinf(x)) {
    return 0.0;
  }
  return pdf(x) * (gamma_ / (x * x) - (q_ + 1.0) / x);
}

double InverseGamma::cdf(double x) const noexcept {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_q(q_, gamma_ / x);
}

double InverseGamma::ccdf(double x) const noexcept {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_p(q_, gamma_ / x);
}

double InverseGamma::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("quantile probability must lie in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return INFINITY;
  return gamma_ / boost::math::gamma_q_inv(q_, p);
}

double InverseGamma::upper_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("quantile probability must lie in [0, 1]");
  }
  if (p == 0.0) return INFINITY;
  if (p == 1.0) return 0.0;
  return gamma_ / boost::math::gamma_p_inv(q_, p);
}

double InverseGamma::partial_mean(double x) const noexcept {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return mean();
  return mean() * boost::math::gamma_q(q_ - 1.0, gamma_ / x);
}

double InverseGamma::median() const { return quantile(0.5); }

GammaFading::GammaFading(double m) : m_(m) {
  if (!(m > 0.0) || std::isinf(m)) {
    throw ParameterError("fading shape m must be finite and > 0");
  }
  log_norm_ = m * std::log(m) - std::lgamma(m);
}

double GammaFading::pdf(double x) const noexcept {
  if (x < 0.0 || std::isinf(x)) return 0.0;
  if (x == 0.0) {
    if (m_ < 1.0) return INFINITY;
    return m_ == 1.0 ? 1.0 : 0.0;
  }
  return std::exp(log_norm_ + (m_ - 1.0) * std::log(x) - m_ * x);
}

double GammaFading::cdf(double x) const noexcept {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(m_, m_ * x);
}

double GammaFading::ccdf(double x) const noexcept {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(m_, m_ * x);
}

double rising_factorial(double a, int k) noexcept {
  double r = 1.0;
  for (int i = 0; i < k; ++i) {
    r *= a + i;
  }
  return r;
}

}  // namespace corridor
