// SPDX-License-Identifier: Apache-2.0
#include "corridor/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include "corridor/distributions.hpp"
#include "corridor/errors.hpp"

namespace corridor {

std::string to_string(AssociationPolicy policy) {
  return policy == AssociationPolicy::MaxPower ? "maxpower" : "mindistance";
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Analytic:
      return "analytic";
    case Provenance::Simulated:
      return "simulated";
    case Provenance::Replayed:
      return "replayed";
  }
  return "unknown";
}

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

Eigen::VectorXd NetworkRealization::distances() const {
  return (ground.rowwise().squaredNorm() + heights.cwiseAbs2()).cwiseSqrt();
}

bool SirSample::infinite() const noexcept { return std::isinf(sir); }

NetworkRealization sample_network(const SpatialModel& spatial, const CorridorGeometry& geometry,
                                  const ChannelParams& channel, RandomStream& rng) {
  // Child streams first so their seeds never depend on the UAV count.
  RandomStream height_rng(rng());
  RandomStream shadow_rng(rng());

  const double R = geometry.half_length();
  NetworkRealization out;
  std::size_t n = 0;
  const bool disc = std::holds_alternative<Disc2D>(spatial);
  if (const auto* b = std::get_if<Bpp>(&spatial)) {
    n = b->n;
  } else if (const auto* p = std::get_if<FiniteHppp>(&spatial)) {
    n = static_cast<std::size_t>(rng.poisson(p->lambda * geometry.length()));
  } else {
    n = std::get<Disc2D>(spatial).n;
  }

  out.ground = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(n), 2);
  out.heights.resize(static_cast<Eigen::Index>(n));
  out.shadowing.resize(static_cast<Eigen::Index>(n));
  out.rx_powers.resize(static_cast<Eigen::Index>(n));

  const InverseGamma shadow(channel.q, channel.shadowing_scale());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    if (disc) {
      const double r = R * std::sqrt(rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      out.ground(i, 0) = r * std::cos(phi);
      out.ground(i, 1) = r * std::sin(phi);
    } else {
      out.ground(i, 0) = rng.uniform(-R, R);
    }
    out.heights(i) = height_from_uniform(geometry.height_model(), height_rng.uniform_open());
    out.shadowing(i) = shadow.sample(shadow_rng);
  }
  const Eigen::VectorXd d = out.distances();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    out.rx_powers(i) = out.shadowing(i) * path_loss(d(i), channel);
  }
  return out;
}

std::size_t associate(const NetworkRealization& realization, AssociationPolicy policy) {
  if (realization.empty()) throw EmptyNetworkError();
  Eigen::Index best = 0;
  if (policy == AssociationPolicy::MaxPower) {
    realization.rx_powers.maxCoeff(&best);  // first maximum wins ties
  } else {
    realization.distances().minCoeff(&best);
  }
  return static_cast<std::size_t>(best);
}

SirSample sir_sample(const NetworkRealization& realization, AssociationPolicy policy,
                     const ChannelParams& channel, RandomStream& rng) {
  SirSample out;
  out.serving_index = associate(realization, policy);
  out.n_uavs = realization.size();
  const bool faded = std::isfinite(channel.m);
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t i = 0; i < out.n_uavs; ++i) {
    const double h = faded ? rng.gamma(channel.m) / channel.m : 1.0;
    const double p = h * realization.rx_powers(static_cast<Eigen::Index>(i));
    if (i == out.serving_index) {
      signal = p;
    } else {
      interference += p;
    }
  }
  out.sir = out.n_uavs == 1 ? std::numeric_limits<double>::infinity() : signal / interference;
  return out;
}

Eigen::VectorXd simulate_sir(const SimulationConfig& config, const MonteCarloOptions& options) {
  if (options.trials == 0) throw ParameterError("trials must be >= 1");
  validate(config.spatial);
  validate(config.geometry.height_model());
  config.channel.validate();

  Eigen::VectorXd sir(static_cast<Eigen::Index>(options.trials));
  parallel_for(options.trials, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      RandomStream rng = RandomStream::for_trial(options.seed, t);
      const NetworkRealization net =
          sample_network(config.spatial, config.geometry, config.channel, rng);
      sir(static_cast<Eigen::Index>(t)) =
          net.empty() ? std::numeric_limits<double>::quiet_NaN()
                      : sir_sample(net, config.policy, config.channel, rng).sir;
    }
  });
  return sir;
}

CoverageCurve coverage_from_sir(const Eigen::Ref<const Eigen::VectorXd>& sir,
                                const Eigen::ArrayXd& theta_db, Provenance provenance) {
  std::vector<double> valid;
  valid.reserve(static_cast<std::size_t>(sir.size()));
  for (double s : sir) {
    if (!std::isnan(s)) valid.push_back(s);
  }
  std::sort(valid.begin(), valid.end());

  CoverageCurve out;
  out.theta_db = theta_db;
  out.coverage.resize(theta_db.size());
  out.standard_error.resize(theta_db.size());
  out.provenance = provenance;
  out.samples = valid.size();
  const double n = static_cast<double>(valid.size());
  for (Eigen::Index i = 0; i < theta_db.size(); ++i) {
    if (valid.empty()) {
      out.coverage(i) = std::numeric_limits<double>::quiet_NaN();
      out.standard_error(i) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double theta = db_to_linear(theta_db(i));
    const auto above = valid.end() - std::upper_bound(valid.begin(), valid.end(), theta);
    const double p = static_cast<double>(above) / n;
    out.coverage(i) = p;
    out.standard_error(i) = std::sqrt(p * (1.0 - p) / n);
  }
  return out;
}

CoverageCurve empirical_coverage(const SimulationConfig& config, const Eigen::ArrayXd& theta_db,
                                 const MonteCarloOptions& options) {
  return coverage_from_sir(simulate_sir(config, options), theta_db, Provenance::Simulated);
}

HeightStudyResult variable_height_study(double fixed_h, const HeightModel& variable,
                                        const SimulationConfig& base,
                                        const Eigen::ArrayXd& theta_db,
                                        const MonteCarloOptions& options) {
  SimulationConfig fixed = base;
  fixed.geometry = CorridorGeometry(base.geometry.half_length(), fixed_h);
  SimulationConfig var = base;
  var.geometry = CorridorGeometry(base.geometry.half_length(), variable);

  HeightStudyResult out;
  out.fixed = empirical_coverage(fixed, theta_db, options);
  out.variable = empirical_coverage(var, theta_db, options);
  out.max_gap = (out.fixed.coverage - out.variable.coverage).abs().maxCoeff();
  return out;
}

}  // namespace corridor
