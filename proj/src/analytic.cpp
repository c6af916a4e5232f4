// SPDX-License-Identifier: Apache-2.0
#include "corridor/analytic.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "corridor/errors.hpp"

namespace corridor {
namespace {

// (1 + s p / m)^(-m - j) and its companions, written to stay accurate for
// small s p.
double laplace_kernel(double sp_over_m, double power) {
  return std::exp(-power * std::log1p(sp_over_m));
}

double one_minus_laplace_kernel(double sp_over_m, double m) {
  return -std::expm1(-m * std::log1p(sp_over_m));
}

// j-th s-derivative of (1 + s p / m)^(-m): (-p/m)^j (m)_j (1 + s p / m)^(-m-j).
double kernel_derivative(int j, double s, double p, double m) {
  const double scaled = p / m;
  return std::pow(-scaled, j) * rising_factorial(m, j) * laplace_kernel(s * scaled, m + j);
}

void require_bpp_n(std::size_t n, std::size_t minimum) {
  if (n < minimum) {
    throw ParameterError("BPP operation requires N >= " + std::to_string(minimum));
  }
}

double binomial(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

double exact_pdf_impl(double x, double h, double R, const ChannelParams& channel,
                      const InverseGamma& shadowing, const QuadratureConfig& cfg) {
  if (!(x > 0.0) || std::isinf(x)) {
    return 0.0;
  }
  const double k = channel.carrier_factor();
  auto integrand = [&](double r) {
    const double inv_l = std::pow(r * r + h * h, channel.alpha / 2.0) / k;
    return inv_l * shadowing.pdf(x * inv_l);
  };
  return integrate(integrand, 0.0, R, cfg).value / R;
}

}  // namespace

// ---------------------------------------------------------------------------
// ReceivedPowerDistribution

ReceivedPowerDistribution::ReceivedPowerDistribution(const CorridorGeometry& geometry,
                                                     const ChannelParams& channel,
                                                     const PowerTableOptions& options)
    : geometry_(geometry),
      channel_(channel),
      shadowing_(channel.q, channel.shadowing_scale()),
      h_(geometry.fixed_height()),
      R_(geometry.half_length()),
      node_cfg_{options.node_rel_tol, 1e-300, 4000} {
  channel_.validate();
  if (!(options.tail_probability > 0.0 && options.tail_probability < 0.5) ||
      !(options.tolerance > 0.0)) {
    throw ParameterError("invalid power table options");
  }
  const double mean_loss =
      integrate([&](double r) { return 1.0 / inverse_path_loss(r); }, 0.0, R_, node_cfg_).value /
      R_;
  mean_ = shadowing_.mean() * mean_loss;

  const double loss_min = 1.0 / inverse_path_loss(R_);
  const double loss_max = 1.0 / inverse_path_loss(0.0);
  u_lo_ = std::log(loss_min * shadowing_.quantile(options.tail_probability));
  u_hi_ = std::log(loss_max * shadowing_.upper_quantile(options.tail_probability));
  build_table(options);
}

double ReceivedPowerDistribution::inverse_path_loss(double r) const {
  return std::pow(r * r + h_ * h_, channel_.alpha / 2.0) / channel_.carrier_factor();
}

ReceivedPowerDistribution::Node ReceivedPowerDistribution::exact_node(double u) const {
  const double x = std::exp(u);
  const double gam = shadowing_.scale();
  const double q = shadowing_.shape();
  QuadratureConfig cfg = node_cfg_;

  // Absolute floors sit well below the table tolerance once divided by R.
  Node node{};
  cfg.abs_tol = 1e-12 * R_;
  node.cdf =
      integrate([&](double r) { return shadowing_.cdf(x * inverse_path_loss(r)); }, 0.0, R_, cfg)
          .value /
      R_;
  // y f_S(y) with y = x / l(d) is the density of ln S evaluated at ln y.
  node.g = integrate(
               [&](double r) {
                 const double y = x * inverse_path_loss(r);
                 return y * shadowing_.pdf(y);
               },
               0.0, R_, cfg)
               .value /
           R_;
  node.dg = integrate(
                [&](double r) {
                  const double y = x * inverse_path_loss(r);
                  return y * shadowing_.pdf(y) * (gam / y - q);
                },
                0.0, R_, cfg)
                .value /
            R_;
  cfg.abs_tol = 1e-12 * R_ * mean_;
  node.partial_mean = integrate(
                          [&](double r) {
                            const double inv_l = inverse_path_loss(r);
                            return shadowing_.partial_mean(x * inv_l) / inv_l;
                          },
                          0.0, R_, cfg)
                          .value /
                      R_;
  return node;
}

void ReceivedPowerDistribution::build_table(const PowerTableOptions& options) {
  std::size_t intervals = 64;
  step_ = (u_hi_ - u_lo_) / static_cast<double>(intervals);
  std::vector<Node> nodes(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    nodes[i] = exact_node(u_lo_ + step_ * static_cast<double>(i));
  }
  auto load = [&](const std::vector<Node>& source) {
    const auto size = static_cast<Eigen::Index>(source.size());
    cdf_.resize(size);
    g_.resize(size);
    dg_.resize(size);
    partial_mean_.resize(size);
    partial_mean_slope_.resize(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const Node& n = source[static_cast<std::size_t>(i)];
      const double u = u_lo_ + step_ * static_cast<double>(i);
      cdf_(i) = n.cdf;
      g_(i) = n.g;
      dg_(i) = n.dg;
      partial_mean_(i) = n.partial_mean;
      partial_mean_slope_(i) = std::exp(u) * n.g;
    }
  };
  load(nodes);

  for (;;) {
    std::vector<Node> mids(intervals);
    double worst = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
      const double u = u_lo_ + step_ * (static_cast<double>(i) + 0.5);
      mids[i] = exact_node(u);
      worst = std::max(worst, std::abs(interpolate(cdf_, g_, u) - mids[i].cdf));
      worst = std::max(worst, std::abs(interpolate(g_, dg_, u) - mids[i].g));
      worst = std::max(worst, std::abs(interpolate(partial_mean_, partial_mean_slope_, u) -
                                       mids[i].partial_mean) /
                                  mean_);
    }
    // the midpoints are exact, so keep them either way
    std::vector<Node> merged(2 * intervals + 1);
    for (std::size_t i = 0; i < intervals; ++i) {
      merged[2 * i] = nodes[i];
      merged[2 * i + 1] = mids[i];
    }
    merged[2 * intervals] = nodes[intervals];
    nodes = std::move(merged);
    intervals *= 2;
    step_ *= 0.5;
    load(nodes);
    if (worst < options.tolerance) {
      break;
    }
    if (nodes.size() > options.max_nodes) {
      throw AccuracyError("received-power table did not reach the requested tolerance", worst,
                          worst, "table");
    }
  }
}

double ReceivedPowerDistribution::interpolate(const Eigen::VectorXd& values,
                                              const Eigen::VectorXd& slopes, double u) const {
  const double pos = (u - u_lo_) / step_;
  const auto last = values.size() - 1;
  auto i = static_cast<Eigen::Index>(std::floor(pos));
  i = std::clamp<Eigen::Index>(i, 0, last - 1);
  const double t = pos - static_cast<double>(i);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values(i) + h10 * step_ * slopes(i) + h01 * values(i + 1) +
         h11 * step_ * slopes(i + 1);
}

double ReceivedPowerDistribution::log_density(double u) const {
  if (u < u_lo_ || u > u_hi_) {
    return exact_node(u).g;
  }
  return std::max(0.0, interpolate(g_, dg_, u));
}

double ReceivedPowerDistribution::cdf_at_log(double u) const {
  if (u < u_lo_ || u > u_hi_) {
    return std::clamp(exact_node(u).cdf, 0.0, 1.0);
  }
  return std::clamp(interpolate(cdf_, g_, u), 0.0, 1.0);
}

double ReceivedPowerDistribution::partial_mean_at_log(double u) const {
  if (u < u_lo_ || u > u_hi_) {
    return exact_node(u).partial_mean;
  }
  return std::max(0.0, interpolate(partial_mean_, partial_mean_slope_, u));
}

double ReceivedPowerDistribution::pdf(double x) const {
  if (!(x > 0.0) || std::isinf(x)) return 0.0;
  return log_density(std::log(x)) / x;
}

double ReceivedPowerDistribution::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return cdf_at_log(std::log(x));
}

double ReceivedPowerDistribution::partial_mean(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return mean_;
  return partial_mean_at_log(std::log(x));
}

double ReceivedPowerDistribution::pdf_exact(double x) const {
  if (!(x > 0.0) || std::isinf(x)) return 0.0;
  return exact_node(std::log(x)).g / x;
}

double ReceivedPowerDistribution::cdf_exact(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return exact_node(std::log(x)).cdf;
}

double ReceivedPowerDistribution::partial_mean_exact(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return mean_;
  return exact_node(std::log(x)).partial_mean;
}

double ReceivedPowerDistribution::pdf_product_form(double x, const QuadratureConfig& cfg) const {
  if (!(x > 0.0) || std::isinf(x)) return 0.0;
  const double k = channel_.carrier_factor();
  const double w_lo = 1.0 / inverse_path_loss(R_);
  const double w_hi = 1.0 / inverse_path_loss(0.0);
  auto integrand = [&](double w) {
    const double f_loss = pathloss_value_pdf(w / k, h_, R_, channel_.alpha) / k;
    return f_loss * shadowing_.pdf(x / w) / w;
  };
  return integrate(integrand, w_lo, w_hi, cfg).value;
}

double received_power_pdf(double x, const CorridorGeometry& geometry,
                          const ChannelParams& channel) {
  channel.validate();
  const InverseGamma shadowing(channel.q, channel.shadowing_scale());
  return exact_pdf_impl(x, geometry.fixed_height(), geometry.half_length(), channel, shadowing,
                        {1e-10, 1e-300, 4000});
}

// ---------------------------------------------------------------------------
// Order statistics

double max_power_pdf_bpp(double x0, std::size_t n, const ReceivedPowerDistribution& power) {
  require_bpp_n(n, 1);
  if (!(x0 > 0.0) || std::isinf(x0)) return 0.0;
  const double f = power.pdf(x0);
  if (n == 1) return f;
  return static_cast<double>(n) * std::pow(power.cdf(x0), static_cast<double>(n - 1)) * f;
}

double max_power_pdf_hppp(double s0, double lambda, const ReceivedPowerDistribution& power) {
  if (!(lambda > 0.0)) throw ParameterError("HPPP requires lambda > 0");
  if (!(s0 > 0.0) || std::isinf(s0)) return 0.0;
  const double mass = lambda * power.geometry().length();
  return mass * power.pdf(s0) * std::exp(mass * (power.cdf(s0) - 1.0)) / -std::expm1(-mass);
}

double joint_top_two_pdf(double x0, double x_i, std::size_t n,
                         const ReceivedPowerDistribution& power) {
  require_bpp_n(n, 2);
  if (!(x_i > 0.0) || !(x_i < x0) || std::isinf(x0)) return 0.0;
  const double nn = static_cast<double>(n);
  return nn * (nn - 1.0) * power.pdf(x0) * power.pdf(x_i) *
         std::pow(power.cdf(x_i), static_cast<double>(n - 2));
}

double residual_mean_interference(double x0, double x_i, std::size_t n,
                                  const ReceivedPowerDistribution& power) {
  require_bpp_n(n, 2);
  if (!(x_i > 0.0)) throw DomainError("residual_mean_interference: xI must be > 0");
  if (x_i > x0) throw DomainError("residual_mean_interference: requires xI <= x0");
  if (n == 2) return 0.0;
  const double f = power.cdf(x_i);
  if (!(f > 0.0)) return 0.0;
  const double conditional_mean = std::min(power.partial_mean(x_i) / f, x_i);
  return static_cast<double>(n - 2) * conditional_mean;
}

// ---------------------------------------------------------------------------
// BPP Laplace transform

BppLaplace::BppLaplace(const ReceivedPowerDistribution& power, std::size_t n, double x0,
                       const QuadratureConfig& cfg)
    : power_(power), n_(n), m_(power.channel().m), cfg_(cfg) {
  require_bpp_n(n, 2);
  if (!(x0 > 0.0) || std::isinf(x0)) throw DomainError("BppLaplace: x0 must be finite and > 0");
  u0_ = std::log(x0);
  cdf0_ = power.cdf_at_log(u0_);
}

double BppLaplace::factor_derivative(int j, double s) const {
  if (j < 0) throw ContractError("derivative order must be >= 0");
  if (!(s >= 0.0)) throw DomainError("Laplace variable s must be >= 0");
  if (j == 0 && s == 0.0) return 1.0;
  if (!(cdf0_ > 0.0)) return j == 0 ? 1.0 : 0.0;
  const double lower = std::min(power_.log_lower(), u0_ - 1.0);
  auto integrand = [&](double u) {
    return kernel_derivative(j, s, std::exp(u), m_) * power_.log_density(u);
  };
  // fixed sign in u, so a purely relative tolerance is safe
  QuadratureConfig cfg = cfg_;
  cfg.abs_tol = 1e-300;
  return integrate(integrand, lower, u0_, cfg).value / cdf0_;
}

Eigen::VectorXd BppLaplace::derivatives(int k_max, double s) const {
  if (k_max < 0) throw ContractError("derivative order must be >= 0");
  if (static_cast<double>(k_max) >= m_) {
    throw ContractError("Laplace derivatives are only needed (and provided) for k <= m - 1");
  }
  Eigen::VectorXd g(k_max + 1);
  for (int j = 0; j <= k_max; ++j) {
    g(j) = factor_derivative(j, s);
  }
  // H = G^a with a = N - 1:
  // G H^(n+1) = sum_j C(n,j) [a G^(j+1) H^(n-j)] - sum_{j>=1} C(n,j) G^(j) H^(n+1-j)
  const double a = static_cast<double>(n_ - 1);
  Eigen::VectorXd out(k_max + 1);
  out(0) = std::pow(g(0), a);
  for (int n = 0; n < k_max; ++n) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      acc += binomial(n, j) * a * g(j + 1) * out(n - j);
    }
    for (int j = 1; j <= n; ++j) {
      acc -= binomial(n, j) * g(j) * out(n + 1 - j);
    }
    out(n + 1) = acc / g(0);
  }
  return out;
}

double BppLaplace::evaluate(double s) const { return derivatives(0, s)(0); }

double BppLaplace::derivative(int k, double s) const { return derivatives(k, s)(k); }

// ---------------------------------------------------------------------------
// HPPP Laplace transform

HpppLaplace::HpppLaplace(const ReceivedPowerDistribution& power, double lambda, double s0,
                         const QuadratureConfig& cfg)
    : power_(power), lambda_(lambda), m_(power.channel().m), cfg_(cfg) {
  if (!(lambda > 0.0)) throw ParameterError("HPPP requires lambda > 0");
  if (!(s0 > 0.0) || std::isinf(s0)) throw DomainError("HpppLaplace: s0 must be finite and > 0");
  u0_ = std::log(s0);
}

double HpppLaplace::exponent(double s) const {
  if (!(s >= 0.0)) throw DomainError("Laplace variable s must be >= 0");
  if (s == 0.0) return 0.0;
  const double mass = lambda_ * power_.geometry().length();
  const double lower = std::min(power_.log_lower(), u0_ - 1.0);
  auto integrand = [&](double u) {
    return one_minus_laplace_kernel(s * std::exp(u) / m_, m_) * power_.log_density(u);
  };
  QuadratureConfig cfg = cfg_;
  cfg.abs_tol = 1e-300;
  return mass * integrate(integrand, lower, u0_, cfg).value;
}

double HpppLaplace::exponent_derivative(int j, double s) const {
  if (j < 1) throw ContractError("exponent_derivative needs j >= 1");
  if (!(s >= 0.0)) throw DomainError("Laplace variable s must be >= 0");
  const double mass = lambda_ * power_.geometry().length();
  const double lower = std::min(power_.log_lower(), u0_ - 1.0);
  auto integrand = [&](double u) {
    return kernel_derivative(j, s, std::exp(u), m_) * power_.log_density(u);
  };
  QuadratureConfig cfg = cfg_;
  cfg.abs_tol = 1e-300;
  return -mass * integrate(integrand, lower, u0_, cfg).value;
}

double HpppLaplace::exponent_double_integral(double s, const QuadratureConfig& cfg) const {
  if (!(s >= 0.0)) throw DomainError("Laplace variable s must be >= 0");
  if (s == 0.0) return 0.0;
  const ChannelParams& ch = power_.channel();
  const InverseGamma& shadowing = power_.shadowing();
  const double h = power_.geometry().fixed_height();
  const double d_max = power_.geometry().max_distance();
  const double s0 = std::exp(u0_);
  auto loss = [&](double d) { return path_loss(d, ch); };
  auto integrand = [&](double d, double sigma) {
    const double jacobian = d / std::sqrt(d * d - h * h);
    return one_minus_laplace_kernel(s * sigma * loss(d) / m_, m_) * jacobian * shadowing.pdf(sigma);
  };
  const double value = nested_integrate_2d(
                           integrand, h, d_max, [](double) { return 0.0; },
                           [&](double d) { return s0 / loss(d); }, cfg)
                           .value;
  return 2.0 * lambda_ * value;
}

Eigen::VectorXd HpppLaplace::derivatives(int k_max, double s) const {
  if (k_max < 0) throw ContractError("derivative order must be >= 0");
  if (static_cast<double>(k_max) >= m_) {
    throw ContractError("Laplace derivatives are only needed (and provided) for k <= m - 1");
  }
  // L = exp(psi), psi = -eta: L^(n+1) = sum_j C(n,j) psi^(j+1) L^(n-j)
  Eigen::VectorXd psi(k_max + 1);
  psi(0) = -exponent(s);
  for (int j = 1; j <= k_max; ++j) {
    psi(j) = -exponent_derivative(j, s);
  }
  Eigen::VectorXd out(k_max + 1);
  out(0) = std::exp(psi(0));
  for (int n = 0; n < k_max; ++n) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      acc += binomial(n, j) * psi(j + 1) * out(n - j);
    }
    out(n + 1) = acc;
  }
  return out;
}

double HpppLaplace::evaluate(double s) const { return derivatives(0, s)(0); }

double HpppLaplace::derivative(int k, double s) const { return derivatives(k, s)(k); }

// ---------------------------------------------------------------------------
// Coverage

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0) || std::isinf(theta)) {
    throw DomainError("SIR threshold must be finite and > 0 (linear scale)");
  }
}

// sum_{k<m} (-s)^k / k! L^(k)(s), i.e. E[Q(m, s I)] for the conditional interference I.
double gamma_ccdf_series(const Eigen::VectorXd& derivs, double s) {
  double sum = 0.0;
  double coef = 1.0;
  for (Eigen::Index k = 0; k < derivs.size(); ++k) {
    if (k > 0) coef *= -s / static_cast<double>(k);
    sum += coef * derivs(k);
  }
  return sum;
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double coverage_bpp(double theta, std::size_t n, const ReceivedPowerDistribution& power,
                    const QuadratureConfig& cfg) {
  require_theta(theta);
  require_bpp_n(n, 2);
  power.channel().validate_integer_m();
  const double m = power.channel().m;
  const int k_max = static_cast<int>(m) - 1;
  const double nn = static_cast<double>(n);
  auto integrand = [&](double u0) {
    const double cdf0 = power.cdf_at_log(u0);
    if (!(cdf0 > 0.0)) return 0.0;
    const double weight = nn * std::pow(cdf0, nn - 1.0) * power.log_density(u0);
    if (weight == 0.0) return 0.0;
    const double x0 = std::exp(u0);
    const double s = m * theta / x0;
    const BppLaplace laplace(power, n, x0, cfg.inner());
    return weight * gamma_ccdf_series(laplace.derivatives(k_max, s), s);
  };
  QuadratureConfig outer = cfg;
  outer.abs_tol = std::min(cfg.abs_tol, 1e-10);
  return clamp_probability(integrate(integrand, power.log_lower(), power.log_upper(), outer).value);
}

double coverage_hppp(double theta, double lambda, const ReceivedPowerDistribution& power,
                     const QuadratureConfig& cfg) {
  require_theta(theta);
  if (!(lambda > 0.0)) throw ParameterError("HPPP requires lambda > 0");
  power.channel().validate_integer_m();
  const double m = power.channel().m;
  const int k_max = static_cast<int>(m) - 1;
  const double mass = lambda * power.geometry().length();
  const double non_empty = -std::expm1(-mass);
  auto integrand = [&](double u0) {
    const double weight =
        mass * power.log_density(u0) * std::exp(mass * (power.cdf_at_log(u0) - 1.0)) / non_empty;
    if (weight == 0.0) return 0.0;
    const double s0 = std::exp(u0);
    const double s = m * theta / s0;
    const HpppLaplace laplace(power, lambda, s0, cfg.inner());
    return weight * gamma_ccdf_series(laplace.derivatives(k_max, s), s);
  };
  QuadratureConfig outer = cfg;
  outer.abs_tol = std::min(cfg.abs_tol, 1e-10);
  return clamp_probability(integrate(integrand, power.log_lower(), power.log_upper(), outer).value);
}

namespace {

double dominant_coverage(double theta, std::size_t n, const ReceivedPowerDistribution& power,
                         const QuadratureConfig& cfg, bool with_residual) {
  require_theta(theta);
  require_bpp_n(n, 2);
  power.channel().validate();
  const double m = power.channel().m;
  const GammaFading fading(m);
  const double nn = static_cast<double>(n);
  const double u_lo = power.log_lower();
  const double u_hi = power.log_upper();

  // x = ln x0, y = ln xI, z = fading gain of the dominant interferer
  auto integrand = [&](double u0, double ui, double h) {
    const double cdf_i = power.cdf_at_log(ui);
    if (!(cdf_i > 0.0)) return 0.0;
    const double joint =
        nn * (nn - 1.0) * power.log_density(u0) * power.log_density(ui) * std::pow(cdf_i, nn - 2.0);
    if (joint == 0.0) return 0.0;
    const double x0 = std::exp(u0);
    const double xi = std::exp(ui);
    double residual = 0.0;
    if (with_residual && n > 2) {
      residual = (nn - 2.0) * std::min(power.partial_mean_at_log(ui) / cdf_i, xi);
    }
    const double arg = m * theta * (h * xi + residual) / x0;
    return boost::math::gamma_q(m, arg) * fading.pdf(h) * joint;
  };
  QuadratureConfig outer = cfg;
  outer.abs_tol = std::min(cfg.abs_tol, 1e-10);
  const double value =
      nested_integrate_3d(
          integrand, u_lo, u_hi, [&](double) { return u_lo; }, [](double u0) { return u0; },
          [](double, double) { return 0.0; }, [](double, double) { return INFINITY; }, outer)
          .value;
  return clamp_probability(value);
}

}  // namespace

double coverage_dominant_bpp(double theta, std::size_t n, const ReceivedPowerDistribution& power,
                             const QuadratureConfig& cfg) {
  return dominant_coverage(theta, n, power, cfg, true);
}

double coverage_single_dominant_bpp(double theta, std::size_t n,
                                    const ReceivedPowerDistribution& power,
                                    const QuadratureConfig& cfg) {
  return dominant_coverage(theta, n, power, cfg, false);
}

namespace {

double coverage_with(double theta, const SpatialModel& spatial, CoverageMethod method,
                     const ReceivedPowerDistribution& power, const QuadratureConfig& cfg) {
  if (const auto* bpp = std::get_if<Bpp>(&spatial)) {
    switch (method) {
      case CoverageMethod::Exact:
        return coverage_bpp(theta, bpp->n, power, cfg);
      case CoverageMethod::DominantMeanResidual:
        return coverage_dominant_bpp(theta, bpp->n, power, cfg);
      case CoverageMethod::SingleDominant:
        return coverage_single_dominant_bpp(theta, bpp->n, power, cfg);
    }
  }
  if (const auto* hppp = std::get_if<FiniteHppp>(&spatial)) {
    if (method != CoverageMethod::Exact) {
      throw ParameterError("dominant-interferer approximations are defined for the BPP model");
    }
    return coverage_hppp(theta, hppp->lambda, power, cfg);
  }
  throw ParameterError("no analytic coverage for the 2-D disc baseline; use the simulator");
}

}  // namespace

double coverage(const CoverageQuery& query) {
  validate(query.spatial);
  query.quadrature.validate();
  const ReceivedPowerDistribution power(query.geometry, query.channel);
  return coverage_with(query.theta, query.spatial, query.method, power, query.quadrature);
}

Eigen::ArrayXd coverage_curve(const Eigen::ArrayXd& thetas, const SpatialModel& spatial,
                              CoverageMethod method, const ReceivedPowerDistribution& power,
                              const QuadratureConfig& cfg) {
  validate(spatial);
  Eigen::ArrayXd out(thetas.size());
  for (Eigen::Index i = 0; i < thetas.size(); ++i) {
    out(i) = coverage_with(thetas(i), spatial, method, power, cfg);
  }
  return out;
}

}  // namespace corridor
