// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>

namespace corridor {

/// Histogram density on a uniform grid [lo, hi) with `bins` cells.
/// Samples outside the grid are clamped into the edge bins; NaN is skipped.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(double lo, double hi, std::size_t bins);

  static EmpiricalDistribution from_samples(const Eigen::Ref<const Eigen::VectorXd>& samples,
                                            double lo, double hi, std::size_t bins);

  void add(double x);
  /// Recomputes densities from the counts; called by from_samples.
  void normalize();

  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }
  std::size_t bins() const noexcept { return static_cast<std::size_t>(counts_.size()); }
  double bin_width() const noexcept { return width_; }
  std::size_t total() const noexcept { return total_; }

  const Eigen::VectorXd& densities() const noexcept { return density_; }
  const Eigen::VectorXd& counts() const noexcept { return counts_; }
  Eigen::VectorXd centers() const;

  double pdf(double x) const;
  /// Piecewise-linear CDF of the histogram.
  double cdf(double x) const;

  bool same_grid(const EmpiricalDistribution& other) const noexcept;

 private:
  double lo_, hi_, width_;
  std::size_t total_ = 0;
  Eigen::VectorXd counts_;
  Eigen::VectorXd density_;
};

/// KL(p || q) in nats on a shared grid; empty q bins get density `epsilon`.
/// Throws ContractError when the grids differ.
double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q,
                     double epsilon = 1e-12);

/// sup |F_n - F| of the samples against a continuous CDF.
double ks_statistic(Eigen::VectorXd samples, const std::function<double(double)>& cdf);

/// Two-sample sup |F_a - F_b|.
double ks_two_sample(Eigen::VectorXd a, Eigen::VectorXd b);

/// Asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

/// Pearson chi-square p-value of observed counts against bin probabilities.
/// Bins with expected count below 5 are pooled with their neighbour.
double chi_square_p_value(const Eigen::Ref<const Eigen::VectorXd>& observed,
                          const Eigen::Ref<const Eigen::VectorXd>& probabilities);

struct MomentFit {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and (population) standard deviation.
MomentFit fit_normal_moments(const Eigen::Ref<const Eigen::VectorXd>& samples);

}  // namespace corridor
