// SPDX-License-Identifier: Apache-2.0
#pragma once

// Analytic engine: received-power distribution, order statistics of the
// strongest UAVs, conditional Laplace transforms of the aggregate
// interference and the coverage probability under BPP and finite HPPP
// corridor deployments.
//
// Powers span many decades (d^-alpha with d in the hundreds of meters), so
// every outer integral runs over u = ln x, where the density of the received
// power becomes g(u) = x f(x).

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "corridor/core.hpp"
#include "corridor/distributions.hpp"
#include "corridor/quadrature.hpp"

namespace corridor {

struct PowerTableOptions {
  /// Probability mass left outside the tabulated support on each side.
  double tail_probability = 1e-14;
  /// Max interpolation error of the cached CDF (and of g, M / E[Pr]).
  double tolerance = 1e-8;
  /// Relative tolerance of the per-node quadratures.
  double node_rel_tol = 1e-11;
  std::size_t max_nodes = 1 << 14;
};

/// Distribution of Pr = S l(d) for one UAV uniform on a fixed-height corridor.
///
/// Exact values come from one quadrature over the ground offset r in [0, R]
/// (the w = l(d) product integral after the substitution d = sqrt(r^2 + h^2)).
/// Cached values use cubic Hermite interpolation on a uniform ln-x grid whose
/// slopes are exact derivatives, refined until the midpoint error is below
/// `PowerTableOptions::tolerance`.
class ReceivedPowerDistribution {
 public:
  ReceivedPowerDistribution(const CorridorGeometry& geometry, const ChannelParams& channel,
                            const PowerTableOptions& options = {});

  const CorridorGeometry& geometry() const noexcept { return geometry_; }
  const ChannelParams& channel() const noexcept { return channel_; }
  const InverseGamma& shadowing() const noexcept { return shadowing_; }

  // Cached evaluations.
  double pdf(double x) const;
  double cdf(double x) const;
  /// M(x) = integral_0^x p f(p) dp.
  double partial_mean(double x) const;

  /// x f(x) at x = e^u.
  double log_density(double u) const;
  double cdf_at_log(double u) const;
  double partial_mean_at_log(double u) const;

  // Quadrature evaluations.
  double pdf_exact(double x) const;
  double cdf_exact(double x) const;
  double partial_mean_exact(double x) const;
  /// Literal product-distribution form: integral over w of (1/w) f_l(w) f_S(x/w).
  double pdf_product_form(double x, const QuadratureConfig& cfg = {1e-9, 1e-300, 4000}) const;

  /// Tabulated support [ln x_lo, ln x_hi]; mass outside is below the tail probability.
  double log_lower() const noexcept { return u_lo_; }
  double log_upper() const noexcept { return u_hi_; }
  std::size_t table_size() const noexcept { return static_cast<std::size_t>(cdf_.size()); }

  /// E[Pr] = E[S] E[l(d)].
  double mean() const noexcept { return mean_; }

 private:
  struct Node {
    double cdf, g, dg, partial_mean;
  };
  Node exact_node(double u) const;
  double interpolate(const Eigen::VectorXd& values, const Eigen::VectorXd& slopes, double u) const;
  double inverse_path_loss(double r) const;
  void build_table(const PowerTableOptions& options);

  CorridorGeometry geometry_;
  ChannelParams channel_;
  InverseGamma shadowing_;
  double h_;
  double R_;
  QuadratureConfig node_cfg_;
  double mean_ = 0.0;
  double u_lo_ = 0.0;
  double u_hi_ = 0.0;
  double step_ = 0.0;
  Eigen::VectorXd cdf_, g_, dg_, partial_mean_, partial_mean_slope_;
};

/// Exact received-power density without building a table.
double received_power_pdf(double x, const CorridorGeometry& geometry, const ChannelParams& channel);

/// N F(x0)^(N-1) f(x0).
double max_power_pdf_bpp(double x0, std::size_t n, const ReceivedPowerDistribution& power);

/// Density of the maximum power of a finite HPPP conditioned on at least one UAV:
/// Lambda f(s0) exp(Lambda (F(s0) - 1)) / (1 - exp(-Lambda)), Lambda = lambda |L|.
double max_power_pdf_hppp(double s0, double lambda, const ReceivedPowerDistribution& power);

/// N (N-1) f(x0) f(xI) F(xI)^(N-2) on 0 < xI < x0, zero elsewhere.
double joint_top_two_pdf(double x0, double x_i, std::size_t n,
                         const ReceivedPowerDistribution& power);

/// Conditional mean of the interference from the N-2 UAVs weaker than the
/// dominant interferer: (N-2) M(xI) / F(xI).
double residual_mean_interference(double x0, double x_i, std::size_t n,
                                  const ReceivedPowerDistribution& power);

/// Conditional Laplace transform of the BPP interference given Pr0 = x0:
/// L(s) = G(s)^(N-1), G(s) = integral_0^x0 (1 + s p / m)^(-m) f(p) / F(x0) dp.
class BppLaplace {
 public:
  BppLaplace(const ReceivedPowerDistribution& power, std::size_t n, double x0,
             const QuadratureConfig& cfg = {});

  double evaluate(double s) const;
  /// k-th derivative in s, 0 <= k < m.
  double derivative(int k, double s) const;
  /// L, L', ..., L^(k_max).
  Eigen::VectorXd derivatives(int k_max, double s) const;

  /// j-th derivative of the single-interferer factor G.
  double factor_derivative(int j, double s) const;

 private:
  const ReceivedPowerDistribution& power_;
  std::size_t n_;
  double m_;
  double u0_;
  double cdf0_;
  QuadratureConfig cfg_;
};

/// Conditional Laplace transform of the finite-HPPP interference given Pr0 = s0:
/// L(s) = exp(-eta(s)),
/// eta(s) = 2 lambda int_h^D int_0^{s0 / l(d)} (1 - (1 + s sigma l(d) / m)^(-m))
///          d / sqrt(d^2 - h^2) f_S(sigma) dsigma dd.
class HpppLaplace {
 public:
  HpppLaplace(const ReceivedPowerDistribution& power, double lambda, double s0,
              const QuadratureConfig& cfg = {});

  double evaluate(double s) const;
  double derivative(int k, double s) const;
  Eigen::VectorXd derivatives(int k_max, double s) const;

  /// eta(s) through the reduction lambda |L| int_0^s0 (1 - (1 + s p / m)^-m) f(p) dp.
  double exponent(double s) const;
  /// eta(s) by direct iterated integration over (d, sigma).
  double exponent_double_integral(double s,
                                  const QuadratureConfig& cfg = {1e-8, 1e-300, 4000}) const;
  /// j-th derivative of eta, j >= 1.
  double exponent_derivative(int j, double s) const;

 private:
  const ReceivedPowerDistribution& power_;
  double lambda_;
  double m_;
  double u0_;
  QuadratureConfig cfg_;
};

enum class CoverageMethod {
  Exact,                 ///< Theorem-style sum over Laplace derivatives
  DominantMeanResidual,  ///< strongest interferer exact, the rest by conditional mean
  SingleDominant,        ///< strongest interferer only
};

struct CoverageQuery {
  /// SIR threshold, linear scale.
  double theta = 0.5;
  SpatialModel spatial = Bpp{10};
  ChannelParams channel{};
  CorridorGeometry geometry{500.0, 100.0};
  CoverageMethod method = CoverageMethod::Exact;
  QuadratureConfig quadrature{1e-7, 1e-12, 2000};
};

/// Coverage P(SIR > theta) with maximum-power association, BPP with N >= 2.
double coverage_bpp(double theta, std::size_t n, const ReceivedPowerDistribution& power,
                    const QuadratureConfig& cfg = {1e-7, 1e-12, 2000});

/// Coverage for a finite HPPP conditioned on a non-empty corridor.
double coverage_hppp(double theta, double lambda, const ReceivedPowerDistribution& power,
                     const QuadratureConfig& cfg = {1e-7, 1e-12, 2000});

/// Dominant-interferer approximation with the residual interference replaced
/// by its conditional mean. Valid for any m > 0.
double coverage_dominant_bpp(double theta, std::size_t n, const ReceivedPowerDistribution& power,
                             const QuadratureConfig& cfg = {1e-6, 1e-12, 2000});

/// Dominant-interferer approximation ignoring all but the strongest interferer.
double coverage_single_dominant_bpp(double theta, std::size_t n,
                                    const ReceivedPowerDistribution& power,
                                    const QuadratureConfig& cfg = {1e-6, 1e-12, 2000});

/// Dispatches on the spatial model and method; builds the power table.
double coverage(const CoverageQuery& query);

/// Coverage over a grid of linear thresholds sharing one power table.
Eigen::ArrayXd coverage_curve(const Eigen::ArrayXd& thetas, const SpatialModel& spatial,
                              CoverageMethod method, const ReceivedPowerDistribution& power,
                              const QuadratureConfig& cfg = {1e-7, 1e-12, 2000});

}  // namespace corridor
