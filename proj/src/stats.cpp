// SPDX-License-Identifier: Apache-2.0
#include "corridor/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "corridor/errors.hpp"

namespace corridor {

EmpiricalDistribution::EmpiricalDistribution(double lo, double hi, std::size_t bins)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("histogram needs finite lo < hi");
  }
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  width_ = (hi - lo) / static_cast<double>(bins);
  counts_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bins));
  density_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bins));
}

EmpiricalDistribution EmpiricalDistribution::from_samples(
    const Eigen::Ref<const Eigen::VectorXd>& samples, double lo, double hi, std::size_t bins) {
  EmpiricalDistribution out(lo, hi, bins);
  for (double x : samples) out.add(x);
  out.normalize();
  return out;
}

void EmpiricalDistribution::add(double x) {
  if (std::isnan(x)) return;
  const auto last = counts_.size() - 1;
  Eigen::Index i = 0;
  if (x >= hi_) {
    i = last;
  } else if (x > lo_) {
    i = std::min<Eigen::Index>(last, static_cast<Eigen::Index>((x - lo_) / width_));
  }
  counts_(i) += 1.0;
  ++total_;
}

void EmpiricalDistribution::normalize() {
  if (total_ == 0) {
    density_.setZero();
    return;
  }
  density_ = counts_ / (static_cast<double>(total_) * width_);
}

Eigen::VectorXd EmpiricalDistribution::centers() const {
  return Eigen::VectorXd::LinSpaced(counts_.size(), lo_ + 0.5 * width_, hi_ - 0.5 * width_);
}

double EmpiricalDistribution::pdf(double x) const {
  if (x < lo_ || x >= hi_) return 0.0;
  const auto i =
      std::min<Eigen::Index>(counts_.size() - 1, static_cast<Eigen::Index>((x - lo_) / width_));
  return density_(i);
}

double EmpiricalDistribution::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  const double pos = (x - lo_) / width_;
  const auto i = std::min<Eigen::Index>(counts_.size() - 1, static_cast<Eigen::Index>(pos));
  const double below = density_.head(i).sum() * width_;
  return below + density_(i) * (pos - static_cast<double>(i)) * width_;
}

bool EmpiricalDistribution::same_grid(const EmpiricalDistribution& other) const noexcept {
  return lo_ == other.lo_ && hi_ == other.hi_ && counts_.size() == other.counts_.size();
}

double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q,
                     double epsilon) {
  if (!p.same_grid(q)) throw ContractError("kl_divergence: histograms use different grids");
  double kl = 0.0;
  const auto& pd = p.densities();
  const auto& qd = q.densities();
  for (Eigen::Index i = 0; i < pd.size(); ++i) {
    if (pd(i) <= 0.0) continue;
    const double qi = qd(i) > 0.0 ? qd(i) : epsilon;
    kl += pd(i) * std::log(pd(i) / qi);
  }
  // Smoothing can push tiny negative totals when p and q are nearly equal.
  return std::max(0.0, kl * p.bin_width());
}

double ks_statistic(Eigen::VectorXd samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples(i));
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(Eigen::VectorXd a, Eigen::VectorXd b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  Eigen::Index i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a(i), b(j));
    while (i < a.size() && a(i) <= x) ++i;
    while (j < b.size() && b(j) <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double chi_square_p_value(const Eigen::Ref<const Eigen::VectorXd>& observed,
                          const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  if (observed.size() != probabilities.size() || observed.size() == 0) {
    throw ContractError("chi_square_p_value: size mismatch");
  }
  const double n = observed.sum();
  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (Eigen::Index i = 0; i < observed.size(); ++i) {
    o += observed(i);
    e += n * probabilities(i);
    if (e >= 5.0) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  if (exp.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  const double dof = static_cast<double>(exp.size() - 1);
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

MomentFit fit_normal_moments(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  if (samples.size() == 0) throw ParameterError("fit_normal_moments: no samples");
  MomentFit fit;
  fit.mean = samples.mean();
  fit.stddev = std::sqrt((samples.array() - fit.mean).square().mean());
  return fit;
}

}  // namespace corridor
